#include <doctest.h>

#include <cmath>
#include <random>

#include "latinhib/graph.hpp"
#include "latinhib/transceiver.hpp"

using namespace latinhib;

namespace {

constexpr double D = 4.9e-10;

Eigen::MatrixXd fd_jacobian(const Transceiver& tx, const Eigen::VectorXd& x, const Eigen::VectorXd& p_I) {
    const Eigen::Index n = x.size();
    Eigen::MatrixXd J(n, n);
    for (Eigen::Index k = 0; k < n; ++k) {
        const double h = 1e-6 * std::max(std::abs(x[k]), 1e-12);
        Eigen::VectorXd lo = x, hi = x;
        lo[k] -= h;
        hi[k] += h;
        J.col(k) = (tx.pack(transceiver_rhs(tx, tx.unpack(hi), p_I)) -
                    tx.pack(transceiver_rhs(tx, tx.unpack(lo), p_I))) / (2 * h);
    }
    return J;
}

Transceiver parallelogram_tx() {
    const auto g = CompartmentGraph::parallelogram(500e-6, 800e-6, 1.0, D);
    const ParameterSet p;
    return Transceiver::a_to_b(build_laplacian(g), g.count_a(), p, p);
}

}  // namespace

TEST_CASE("decoupled map matches the full steady state on equitable graphs") {
    const ParameterSet p;
    for (const auto& g : {CompartmentGraph::pair(500e-6, 1.0, D), CompartmentGraph::parallelogram(500e-6, 800e-6, 1.0, D),
                          CompartmentGraph::pair(3e-3, 2.0, D)}) {
        const auto lp = std::get<LaplacianPair>(check_equitable(g));
        const Transceiver tx = Transceiver::a_to_b(lp.laplacian, lp.count_a, p, p);
        const DecoupledTransceiver dt = DecoupledTransceiver::a_to_b(lp, p, p);
        for (double z = 1e-13; z < 1e-8; z *= 4.3) {
            const Eigen::VectorXd pI = Eigen::VectorXd::Constant(tx.n_sender, z);
            const TransceiverState s = transceiver_steady_state(tx, pI);
            for (Eigen::Index j = 0; j < tx.n_receiver; ++j) {
                CHECK(std::abs(s.complex[j] - dt.value(z)) <= 1e-10 * dt.value(z));
            }
            CHECK(std::abs(dt.value(z) - decoupled_T_AB(z, lp.d_ab(), lp.d_ba(), p)) <= 1e-12 * dt.value(z));
        }
        const Transceiver back = Transceiver::b_to_a(lp.laplacian, lp.count_a, p, p);
        const DecoupledTransceiver db = DecoupledTransceiver::b_to_a(lp, p, p);
        const TransceiverState s = transceiver_steady_state(back, Eigen::VectorXd::Constant(back.n_sender, 3e-10));
        CHECK(std::abs(s.complex[0] - db.value(3e-10)) <= 1e-10 * db.value(3e-10));
    }
}

TEST_CASE("decoupled slope against central differences") {
    const ParameterSet p;
    const auto lp = std::get<LaplacianPair>(check_equitable(CompartmentGraph::pair(500e-6, 1.0, D)));
    const DecoupledTransceiver dt = DecoupledTransceiver::a_to_b(lp, p, p, 1e-4, 2e-4);
    for (double z = 1e-12; z < 1e-8; z *= 3.1) {
        const double h = 1e-5 * z;
        const double fd = (dt.value(z + h) - dt.value(z - h)) / (2 * h);
        CHECK(std::abs(dt.slope(z) - fd) <= 1e-8 * std::abs(fd));
        CHECK(dt.slope(z) > 0.0);
        CHECK(std::abs(decoupled_T_AB_prime(z, lp.d_ab(), lp.d_ba(), p) -
                       (decoupled_T_AB(z + h, lp.d_ab(), lp.d_ba(), p) - decoupled_T_AB(z - h, lp.d_ab(), lp.d_ba(), p)) /
                           (2 * h)) <= 1e-8 * fd * 2);
    }
    CHECK(dt.value(0.0) == 0.0);
    CHECK(dt.value(1.0) < p.p_Ri);
}

TEST_CASE("analytic jacobian agrees with finite differences") {
    const Transceiver tx = parallelogram_tx();
    std::mt19937_64 rng(5);
    std::uniform_real_distribution<double> u(1e-11, 1e-8);
    for (int rep = 0; rep < 10; ++rep) {
        Eigen::VectorXd x(tx.state_size());
        for (Eigen::Index k = 0; k < x.size(); ++k) x[k] = u(rng);
        Eigen::VectorXd pI(tx.n_sender);
        for (Eigen::Index k = 0; k < pI.size(); ++k) pI[k] = u(rng);
        const Eigen::MatrixXd J = transceiver_jacobian(tx, tx.unpack(x));
        const Eigen::MatrixXd F = fd_jacobian(tx, x, pI);
        CHECK((J - F).cwiseAbs().maxCoeff() <= 1e-8 * J.cwiseAbs().maxCoeff());
    }
}

TEST_CASE("weighted one-norm measure is negative on random states") {
    const Transceiver tx = parallelogram_tx();
    std::mt19937_64 rng(17);
    std::uniform_real_distribution<double> u(0.0, 1.0);
    for (int rep = 0; rep < 100; ++rep) {
        TransceiverState s = tx.zero_state();
        for (Eigen::Index k = 0; k < s.sender.size(); ++k) s.sender[k] = 1e-6 * u(rng);
        for (Eigen::Index k = 0; k < s.receiver.size(); ++k) s.receiver[k] = 1e-6 * u(rng);
        for (Eigen::Index k = 0; k < s.complex.size(); ++k) s.complex[k] = tx.p_R * u(rng);
        const ContractionReport r = contraction_check(tx, s);
        CHECK(r.measure < 0.0);
        CHECK(r.k > 1.0);
        CHECK(r.k < r.k_upper);
    }
}

TEST_CASE("dc gain is entrywise nonnegative and matches the steady-state slope") {
    const Transceiver tx = parallelogram_tx();
    const Eigen::VectorXd pI = (Eigen::VectorXd(2) << 2e-10, 7e-10).finished();
    const TransceiverState s = transceiver_steady_state(tx, pI);
    const Eigen::MatrixXd G = linearize_transceiver(tx, s).dc_gain();
    CHECK(G.minCoeff() >= 0.0);
    for (Eigen::Index k = 0; k < 2; ++k) {
        Eigen::VectorXd hi = pI, lo = pI;
        const double h = 1e-5 * pI[k];
        hi[k] += h;
        lo[k] -= h;
        const Eigen::VectorXd fd =
            (transceiver_steady_state(tx, hi).complex - transceiver_steady_state(tx, lo).complex) / (2 * h);
        CHECK((G.col(k) - fd).cwiseAbs().maxCoeff() <= 1e-7 * G.cwiseAbs().maxCoeff());
    }
}

TEST_CASE("steady state agrees with integration and is a root of the rhs") {
    const Transceiver tx = parallelogram_tx();
    const Eigen::VectorXd pI = (Eigen::VectorXd(2) << 4e-10, 1e-11).finished();
    const TransceiverState s = transceiver_steady_state(tx, pI);
    const Eigen::VectorXd r = tx.pack(transceiver_rhs(tx, s, pI));
    CHECK(r.cwiseAbs().maxCoeff() < 1e-20);

    IntegratorControls c;
    c.upper_bound = Eigen::VectorXd::Constant(tx.state_size(), std::numeric_limits<double>::infinity());
    c.upper_bound.tail(tx.n_receiver).setConstant(tx.p_R);
    const auto xs = integrate_samples(transceiver_system(tx, pI), tx.pack(tx.zero_state()), {0.0, 100 * 3600.0}, c);
    const Eigen::VectorXd ss = tx.pack(s);
    CHECK((xs.back() - ss).cwiseAbs().maxCoeff() <= 1e-6 * ss.cwiseAbs().maxCoeff());
}

TEST_CASE("pack and unpack round trip") {
    const Transceiver tx = parallelogram_tx();
    Eigen::VectorXd v = Eigen::VectorXd::LinSpaced(tx.state_size(), 1, 6);
    CHECK(tx.pack(tx.unpack(v)) == v);
    CHECK(tx.state_size() == 6);
}
