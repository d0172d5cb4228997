#include "latinhib/network.hpp"

#include <cmath>
#include <limits>
#include <stdexcept>

namespace latinhib {

namespace {

constexpr const char* kSpeciesNames[] = {"m_T", "p_T", "m_I", "p_I"};

}  // namespace

std::vector<std::string> StateLayout::names(const std::vector<std::string>& ids) const {
    if (static_cast<Eigen::Index>(ids.size()) != n_a + n_b) {
        throw std::invalid_argument("StateLayout::names: one id per compartment required");
    }
    auto a = [&](Eigen::Index i) { return ids[static_cast<std::size_t>(i)]; };
    auto b = [&](Eigen::Index j) { return ids[static_cast<std::size_t>(n_a + j)]; };
    std::vector<std::string> out(static_cast<std::size_t>(size()));
    auto put = [&](Eigen::Index k, std::string s) { out[static_cast<std::size_t>(k)] = std::move(s); };
    for (int s = 0; s < 4; ++s) {
        for (Eigen::Index i = 0; i < n_a; ++i) put(cell_a(Species(s), i), a(i) + ":" + kSpeciesNames[s]);
        for (Eigen::Index j = 0; j < n_b; ++j) put(cell_b(Species(s), j), b(j) + ":" + kSpeciesNames[s]);
    }
    for (Eigen::Index i = 0; i < n_a; ++i) {
        put(x_a(i), a(i) + ":X");
        put(y_a(i), a(i) + ":Y");
        put(r_a(i), a(i) + ":R_A");
    }
    for (Eigen::Index j = 0; j < n_b; ++j) {
        put(x_b(j), b(j) + ":X");
        put(y_b(j), b(j) + ":Y");
        put(r_b(j), b(j) + ":R_B");
    }
    return out;
}

Eigen::VectorXd StateLayout::cone_signs() const {
    Eigen::VectorXd s(size());
    for (Eigen::Index i = 0; i < n_a; ++i) {
        s[cell_a(Species::m_T, i)] = 1.0;
        s[cell_a(Species::p_T, i)] = 1.0;
        s[cell_a(Species::m_I, i)] = -1.0;
        s[cell_a(Species::p_I, i)] = -1.0;
    }
    s.segment(tx_ab(), n_a + 2 * n_b).setConstant(-1.0);
    for (Eigen::Index j = 0; j < n_b; ++j) {
        s[cell_b(Species::m_T, j)] = -1.0;
        s[cell_b(Species::p_T, j)] = -1.0;
        s[cell_b(Species::m_I, j)] = 1.0;
        s[cell_b(Species::p_I, j)] = 1.0;
    }
    s.segment(tx_ba(), n_b + 2 * n_a).setConstant(1.0);
    return s;
}

CellState NetworkState::cell_a(Eigen::Index i) const {
    return {values[layout.cell_a(Species::m_T, i)], values[layout.cell_a(Species::p_T, i)],
            values[layout.cell_a(Species::m_I, i)], values[layout.cell_a(Species::p_I, i)]};
}

CellState NetworkState::cell_b(Eigen::Index j) const {
    return {values[layout.cell_b(Species::m_T, j)], values[layout.cell_b(Species::p_T, j)],
            values[layout.cell_b(Species::m_I, j)], values[layout.cell_b(Species::p_I, j)]};
}

void NetworkState::set_cell_a(Eigen::Index i, const CellState& s) {
    values[layout.cell_a(Species::m_T, i)] = s.m_T;
    values[layout.cell_a(Species::p_T, i)] = s.p_T;
    values[layout.cell_a(Species::m_I, i)] = s.m_I;
    values[layout.cell_a(Species::p_I, i)] = s.p_I;
}

void NetworkState::set_cell_b(Eigen::Index j, const CellState& s) {
    values[layout.cell_b(Species::m_T, j)] = s.m_T;
    values[layout.cell_b(Species::p_T, j)] = s.p_T;
    values[layout.cell_b(Species::m_I, j)] = s.m_I;
    values[layout.cell_b(Species::p_I, j)] = s.p_I;
}

namespace {

std::vector<std::string> ids_of(const CompartmentGraph& g) {
    std::vector<std::string> ids;
    for (const auto& c : g.compartments()) ids.push_back(c.id);
    return ids;
}

std::vector<std::string> default_ids(std::size_t na, std::size_t nb) {
    std::vector<std::string> ids;
    for (std::size_t i = 0; i < na; ++i) ids.push_back("A" + std::to_string(i + 1));
    for (std::size_t j = 0; j < nb; ++j) ids.push_back("B" + std::to_string(j + 1));
    return ids;
}

}  // namespace

NetworkModel::NetworkModel(const CompartmentGraph& g, const ParameterSet& params_a,
                           const std::optional<ParameterSet>& params_b)
    : NetworkModel(build_laplacian(g), g.count_a(), params_a, params_b.value_or(params_a), {}, ids_of(g)) {}

NetworkModel::NetworkModel(Eigen::MatrixXd laplacian, std::size_t count_a, const ParameterSet& params_a,
                           const ParameterSet& params_b, Eigen::VectorXd extra_loss, std::vector<std::string> ids)
    : params_a_(params_a), params_b_(params_b), laplacian_(std::move(laplacian)) {
    params_a_.validate();
    params_b_.validate();
    const Eigen::Index n = laplacian_.rows();
    if (laplacian_.cols() != n || static_cast<Eigen::Index>(count_a) > n) {
        throw std::invalid_argument("NetworkModel: bad Laplacian dimensions");
    }
    layout_ = StateLayout{static_cast<Eigen::Index>(count_a), n - static_cast<Eigen::Index>(count_a)};
    if (layout_.n_a == 0 || layout_.n_b == 0) throw std::invalid_argument("NetworkModel: need both compartment classes");
    extra_loss_ = extra_loss.size() == 0 ? Eigen::VectorXd::Zero(n) : std::move(extra_loss);
    if (extra_loss_.size() != n || (extra_loss_.array() < 0.0).any()) {
        throw std::invalid_argument("NetworkModel: extra loss must be nonnegative, one per compartment");
    }
    ids_ = ids.empty() ? default_ids(count_a, static_cast<std::size_t>(layout_.n_b)) : std::move(ids);
    if (static_cast<Eigen::Index>(ids_.size()) != n) throw std::invalid_argument("NetworkModel: id count mismatch");
    tx_ab_ = Transceiver::a_to_b(laplacian_, count_a, params_a_, params_b_, extra_loss_);
    tx_ba_ = Transceiver::b_to_a(laplacian_, count_a, params_b_, params_a_, extra_loss_);
}

std::optional<LaplacianPair> NetworkModel::equitable(double tol) const {
    auto r = check_equitable(laplacian_, count_a(), tol);
    if (auto* lp = std::get_if<LaplacianPair>(&r)) return *lp;
    return std::nullopt;
}

std::optional<std::pair<double, double>> NetworkModel::uniform_loss() const {
    const auto na = layout_.n_a;
    const Eigen::VectorXd a = extra_loss_.head(na);
    const Eigen::VectorXd b = extra_loss_.tail(layout_.n_b);
    auto uniform = [](const Eigen::VectorXd& v) {
        return v.maxCoeff() - v.minCoeff() <= 1e-12 * std::max(1.0, v.cwiseAbs().maxCoeff());
    };
    if (!uniform(a) || !uniform(b)) return std::nullopt;
    return std::make_pair(a.mean(), b.mean());
}

Eigen::VectorXd NetworkModel::upper_bound() const {
    Eigen::VectorXd ub = Eigen::VectorXd::Constant(layout_.size(), std::numeric_limits<double>::infinity());
    for (Eigen::Index j = 0; j < layout_.n_b; ++j) ub[layout_.r_b(j)] = params_b_.p_Ri;
    for (Eigen::Index i = 0; i < layout_.n_a; ++i) ub[layout_.r_a(i)] = params_a_.p_Ri;
    return ub;
}

NetworkState NetworkModel::zero_state() const { return {layout_, Eigen::VectorXd::Zero(layout_.size())}; }

namespace {

// One cell, written out flat so the network right-hand side stays independent
// of cell_rhs.
void cell_block(const ParameterSet& p, const Eigen::VectorXd& y, Eigen::VectorXd& dy, Eigen::Index n,
                Eigen::Index base, Eigen::Index i, double R) {
    const Eigen::Index mT = base + i;
    const Eigen::Index pT = base + n + i;
    const Eigen::Index mI = base + 2 * n + i;
    const Eigen::Index pI = base + 3 * n + i;
    dy[mT] = p.V_PLuxI * p.N_PLuxI * p.C * (activation(R, p) + p.leak_PLuxI) - p.gamma_mT * y[mT];
    dy[pT] = p.eps_T * y[mT] - p.gamma_T * y[pT];
    dy[mI] = p.V_PLtetO1 * p.N_PLtetO1 * p.C * (repression(y[pT], p) + p.leak_PLtetO1) - p.gamma_mI * y[mI];
    dy[pI] = p.eps_I * y[mI] - p.gamma_I * y[pI];
}

}  // namespace

void network_rhs(const NetworkModel& m, const Eigen::VectorXd& y, Eigen::VectorXd& dy) {
    const StateLayout& s = m.layout();
    if (y.size() != s.size()) throw std::invalid_argument("network_rhs: state size mismatch");
    dy.resize(s.size());
    const ParameterSet& pa = m.params_a();
    const ParameterSet& pb = m.params_b();
    const Eigen::MatrixXd& L = m.laplacian();
    const Eigen::VectorXd& loss = m.extra_loss();
    const Eigen::Index na = s.n_a;
    const Eigen::Index nb = s.n_b;
    const Eigen::Index n = na + nb;

    for (Eigen::Index i = 0; i < na; ++i) cell_block(pa, y, dy, na, s.cells_a(), i, y[s.r_a(i)]);
    for (Eigen::Index j = 0; j < nb; ++j) cell_block(pb, y, dy, nb, s.cells_b(), j, y[s.r_b(j)]);

    // X: made by A, sensed by B. Y: made by B, sensed by A. Both diffuse over L.
    auto x_at = [&](Eigen::Index v) { return v < na ? y[s.x_a(v)] : y[s.x_b(v - na)]; };
    auto y_at = [&](Eigen::Index v) { return v < na ? y[s.y_a(v)] : y[s.y_b(v - na)]; };
    for (Eigen::Index v = 0; v < n; ++v) {
        double lx = 0.0;
        double ly = 0.0;
        for (Eigen::Index w = 0; w < n; ++w) {
            const double l = L(v, w);
            if (l != 0.0) {
                lx += l * x_at(w);
                ly += l * y_at(w);
            }
        }
        if (v < na) {
            const Eigen::Index i = v;
            dy[s.x_a(i)] = pa.nu * y[s.cell_a(Species::p_I, i)] - (pa.gamma_X + loss[v]) * y[s.x_a(i)] + lx;
            const double bind = pa.k_on * y[s.y_a(i)] * (pa.p_Ri - y[s.r_a(i)]) - pa.k_off * y[s.r_a(i)];
            dy[s.y_a(i)] = -bind - (pb.gamma_X + loss[v]) * y[s.y_a(i)] + ly;
            dy[s.r_a(i)] = bind;
        } else {
            const Eigen::Index j = v - na;
            const double bind = pb.k_on * y[s.x_b(j)] * (pb.p_Ri - y[s.r_b(j)]) - pb.k_off * y[s.r_b(j)];
            dy[s.x_b(j)] = -bind - (pa.gamma_X + loss[v]) * y[s.x_b(j)] + lx;
            dy[s.r_b(j)] = bind;
            dy[s.y_b(j)] = pb.nu * y[s.cell_b(Species::p_I, j)] - (pb.gamma_X + loss[v]) * y[s.y_b(j)] + ly;
        }
    }
}

Eigen::VectorXd network_rhs(const NetworkModel& m, const Eigen::VectorXd& y) {
    Eigen::VectorXd dy;
    network_rhs(m, y, dy);
    return dy;
}

Eigen::MatrixXd network_jacobian(const NetworkModel& m, const Eigen::VectorXd& y) {
    const StateLayout& s = m.layout();
    if (y.size() != s.size()) throw std::invalid_argument("network_jacobian: state size mismatch");
    const ParameterSet& pa = m.params_a();
    const ParameterSet& pb = m.params_b();
    const Eigen::Index na = s.n_a;
    const Eigen::Index nb = s.n_b;
    Eigen::MatrixXd J = Eigen::MatrixXd::Zero(s.size(), s.size());

    auto cell = [&](const ParameterSet& p, Eigen::Index base, Eigen::Index n, Eigen::Index i, Eigen::Index r_index) {
        const Eigen::Index mT = base + i;
        const Eigen::Index pT = base + n + i;
        const Eigen::Index mI = base + 2 * n + i;
        const Eigen::Index pI = base + 3 * n + i;
        J(mT, mT) = -p.gamma_mT;
        J(mT, r_index) = p.V_PLuxI * p.N_PLuxI * p.C * activation_prime(y[r_index], p);
        J(pT, mT) = p.eps_T;
        J(pT, pT) = -p.gamma_T;
        J(mI, pT) = p.V_PLtetO1 * p.N_PLtetO1 * p.C * repression_prime(y[pT], p);
        J(mI, mI) = -p.gamma_mI;
        J(pI, mI) = p.eps_I;
        J(pI, pI) = -p.gamma_I;
    };
    for (Eigen::Index i = 0; i < na; ++i) cell(pa, s.cells_a(), na, i, s.r_a(i));
    for (Eigen::Index j = 0; j < nb; ++j) cell(pb, s.cells_b(), nb, j, s.r_b(j));

    // Transceiver blocks from their own Jacobians plus the production input.
    auto embed = [&](const Transceiver& tx, Eigen::Index base, const Eigen::VectorXd& local) {
        J.block(base, base, tx.state_size(), tx.state_size()) = transceiver_jacobian(tx, tx.unpack(local));
    };
    embed(m.tx_ab(), s.tx_ab(), y.segment(s.tx_ab(), na + 2 * nb));
    embed(m.tx_ba(), s.tx_ba(), y.segment(s.tx_ba(), nb + 2 * na));
    for (Eigen::Index i = 0; i < na; ++i) J(s.x_a(i), s.cell_a(Species::p_I, i)) = pa.nu;
    for (Eigen::Index j = 0; j < nb; ++j) J(s.y_b(j), s.cell_b(Species::p_I, j)) = pb.nu;
    return J;
}

OdeSystem network_system(const NetworkModel& m) {
    OdeSystem sys;
    sys.rhs = [&m](const Eigen::VectorXd& y, Eigen::VectorXd& dy) { network_rhs(m, y, dy); };
    sys.jacobian = [&m](const Eigen::VectorXd& y, Eigen::MatrixXd& J) { J = network_jacobian(m, y); };
    return sys;
}

}  // namespace latinhib
