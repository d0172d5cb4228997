#include <doctest.h>

#include <random>

#include <Eigen/Eigenvalues>

#include "latinhib/graph.hpp"

using namespace latinhib;

namespace {

constexpr double D = 4.9e-10;

// Equitable by construction: every vertex sees the same multiset of weights
// into each class (circulant blocks with equal class sizes).
CompartmentGraph circulant(std::size_t n, std::mt19937_64& rng) {
    std::uniform_real_distribution<double> len(200e-6, 2e-3);
    std::vector<Compartment> vs;
    for (std::size_t i = 0; i < n; ++i) vs.push_back({"A" + std::to_string(i), CompartmentClass::A});
    for (std::size_t i = 0; i < n; ++i) vs.push_back({"B" + std::to_string(i), CompartmentClass::B});
    std::vector<Channel> es;
    std::vector<double> cross(n), same(n);
    for (auto& c : cross) c = len(rng);
    for (auto& c : same) c = len(rng);
    for (std::size_t i = 0; i < n; ++i) {
        for (std::size_t s = 0; s < n; ++s) {
            es.push_back({i, n + (i + s) % n, cross[s], 500e-6});
        }
        if (n > 2) {
            es.push_back({i, (i + 1) % n, same[0], 500e-6});
            es.push_back({n + i, n + (i + 1) % n, same[1], 500e-6});
        }
    }
    return CompartmentGraph(vs, es, std::nullopt, 1.0, D);
}

}  // namespace

TEST_CASE("edge weight follows D/(l w)") {
    CHECK(edge_weight(1e-3, 1e-3, D) == doctest::Approx(4.9e-4).epsilon(1e-14));
    CHECK(edge_weight(500e-6, 500e-6, D) == doctest::Approx(1.96e-3).epsilon(1e-14));
    // w = l/k: doubling l divides the weight by four
    const double k = 1.3;
    CHECK(edge_weight(2e-3, 2e-3 / k, D) == doctest::Approx(edge_weight(1e-3, 1e-3 / k, D) / 4.0).epsilon(1e-14));
    CHECK_THROWS_AS(edge_weight(0.0, 1e-3, D), std::domain_error);
    CHECK_THROWS_AS(edge_weight(1e-3, -1.0, D), std::domain_error);
    CHECK_THROWS_AS(edge_weight(1e-3, 1e-3, 0.0), std::domain_error);
}

TEST_CASE("laplacian of small graphs") {
    const CompartmentGraph empty({{"A1", CompartmentClass::A}, {"B1", CompartmentClass::B}}, {}, 1e-3, 1.0, D);
    CHECK(build_laplacian(empty).isZero(0.0));

    const CompartmentGraph g = CompartmentGraph::pair(1e-3, 1.0, D);
    const Eigen::MatrixXd L = build_laplacian(g);
    const double d = 4.9e-4;
    CHECK(L(0, 0) == doctest::Approx(-d));
    CHECK(L(0, 1) == doctest::Approx(d));
    CHECK(L(1, 0) == doctest::Approx(d));
    CHECK(L(1, 1) == doctest::Approx(-d));

    // one vertex per class: always equitable and the quotient is L itself
    const auto r = check_equitable(g);
    REQUIRE(std::holds_alternative<LaplacianPair>(r));
    CHECK((std::get<LaplacianPair>(r).quotient - L).cwiseAbs().maxCoeff() < 1e-18);
}

TEST_CASE("vertices are stored A first") {
    const CompartmentGraph g = CompartmentGraph::from_ids(
        {{"B1", CompartmentClass::B}, {"A1", CompartmentClass::A}, {"B2", CompartmentClass::B}},
        {{"A1", "B1", 1e-3, std::nullopt}, {"A1", "B2", 2e-3, std::nullopt}}, std::nullopt, 1.0, D);
    CHECK(g.compartments()[0].id == "A1");
    CHECK(g.count_a() == 1);
    CHECK(g.index_of("B2").value() == 2);
    CHECK_THROWS(CompartmentGraph::from_ids({{"A1", CompartmentClass::A}, {"A1", CompartmentClass::B}}, {},
                                            std::nullopt, 1.0, D));
    CHECK_THROWS(CompartmentGraph::from_ids({{"A1", CompartmentClass::A}}, {{"A1", "A1", 1e-3, std::nullopt}},
                                            std::nullopt, 1.0, D));
}

TEST_CASE("parallelogram network is equitable with d_AB = a + b") {
    const CompartmentGraph g = CompartmentGraph::parallelogram(500e-6, 800e-6, 1.0, D);
    const auto r = check_equitable(g);
    REQUIRE(std::holds_alternative<LaplacianPair>(r));
    const LaplacianPair& lp = std::get<LaplacianPair>(r);
    const double a = D / (500e-6 * 500e-6);
    const double b = D / (800e-6 * 800e-6);
    CHECK(lp.d_ab() == doctest::Approx(a + b).epsilon(1e-12));
    CHECK(lp.d_ba() == doctest::Approx(a + b).epsilon(1e-12));
    CHECK(std::abs(lp.quotient.row(0).sum()) < 1e-18);
    CHECK(std::abs(lp.quotient.row(1).sum()) < 1e-18);

    // perturbing one channel weight by 10% breaks equitability
    std::vector<double> w;
    for (const auto& c : g.channels()) w.push_back(g.weight(c));
    w[0] *= 1.1;
    const auto bad = check_equitable(build_laplacian(g, w), g.count_a());
    REQUIRE(std::holds_alternative<NotEquitable>(bad));
    const NotEquitable& ne = std::get<NotEquitable>(bad);
    // row sums a(1.1)+b against a+b, relative to the larger
    CHECK(ne.discrepancy == doctest::Approx(0.1 * a / (1.1 * a + b)).epsilon(1e-9));
}

TEST_CASE("laplacian invariants on random equitable graphs") {
    std::mt19937_64 rng(11);
    for (std::size_t n = 1; n <= 4; ++n) {
        for (int rep = 0; rep < 5; ++rep) {
            const CompartmentGraph g = circulant(n, rng);
            const Eigen::MatrixXd L = build_laplacian(g);
            const double scale = L.cwiseAbs().maxCoeff();
            CHECK(L.rowwise().sum().cwiseAbs().maxCoeff() < 1e-12 * scale);
            CHECK((L - L.transpose()).cwiseAbs().maxCoeff() == 0.0);
            for (Eigen::Index i = 0; i < L.rows(); ++i) {
                for (Eigen::Index j = 0; j < L.cols(); ++j) {
                    if (i != j) CHECK(L(i, j) >= 0.0);
                }
            }
            Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> es(-L);
            CHECK(es.eigenvalues().minCoeff() > -1e-12 * scale);

            // (-L + gamma I)^-1 is entrywise positive
            const double gamma = 7.7e-4;
            const Eigen::MatrixXd M = (-L + gamma * Eigen::MatrixXd::Identity(L.rows(), L.cols())).inverse();
            CHECK(M.minCoeff() > 0.0);

            CHECK(std::holds_alternative<LaplacianPair>(check_equitable(g)));
        }
    }
}
