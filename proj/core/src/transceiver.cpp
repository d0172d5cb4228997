#include "latinhib/transceiver.hpp"

#include <algorithm>
#include <cassert>
#include <cmath>
#include <limits>
#include <stdexcept>

namespace latinhib {

namespace {

Eigen::VectorXd loss_or_zero(const Eigen::VectorXd& loss, Eigen::Index n) {
    if (loss.size() == 0) return Eigen::VectorXd::Zero(n);
    if (loss.size() != n) throw std::invalid_argument("transceiver: extra loss size mismatch");
    return loss;
}

Transceiver make(const Eigen::MatrixXd& L, Eigen::Index n_sender, const ParameterSet& sender,
                 const ParameterSet& receiver, Eigen::VectorXd loss) {
    Transceiver tx;
    tx.laplacian = L;
    tx.extra_loss = std::move(loss);
    tx.n_sender = n_sender;
    tx.n_receiver = L.rows() - n_sender;
    tx.nu = sender.nu;
    tx.gamma = sender.gamma_X;
    tx.k_on = receiver.k_on;
    tx.k_off = receiver.k_off;
    tx.p_R = receiver.p_Ri;
    return tx;
}

void check_dims(const Transceiver& tx, const TransceiverState& st) {
    if (st.sender.size() != tx.n_sender || st.receiver.size() != tx.n_receiver ||
        st.complex.size() != tx.n_receiver) {
        throw std::invalid_argument("transceiver: state dimension mismatch");
    }
}

}  // namespace

Transceiver Transceiver::a_to_b(const Eigen::MatrixXd& L, std::size_t count_a, const ParameterSet& sender,
                                const ParameterSet& receiver, const Eigen::VectorXd& extra_loss) {
    if (L.rows() != L.cols() || static_cast<Eigen::Index>(count_a) > L.rows()) {
        throw std::invalid_argument("transceiver: bad Laplacian dimensions");
    }
    return make(L, static_cast<Eigen::Index>(count_a), sender, receiver, loss_or_zero(extra_loss, L.rows()));
}

Transceiver Transceiver::b_to_a(const Eigen::MatrixXd& L, std::size_t count_a, const ParameterSet& sender,
                                const ParameterSet& receiver, const Eigen::VectorXd& extra_loss) {
    if (L.rows() != L.cols() || static_cast<Eigen::Index>(count_a) > L.rows()) {
        throw std::invalid_argument("transceiver: bad Laplacian dimensions");
    }
    const Eigen::Index n = L.rows();
    const auto na = static_cast<Eigen::Index>(count_a);
    const Eigen::Index nb = n - na;
    // B compartments first, then A.
    Eigen::VectorXi order(n);
    for (Eigen::Index i = 0; i < nb; ++i) order[i] = static_cast<int>(na + i);
    for (Eigen::Index i = 0; i < na; ++i) order[nb + i] = static_cast<int>(i);
    Eigen::MatrixXd P(n, n);
    Eigen::VectorXd loss = loss_or_zero(extra_loss, n);
    Eigen::VectorXd permuted_loss(n);
    for (Eigen::Index i = 0; i < n; ++i) {
        permuted_loss[i] = loss[order[i]];
        for (Eigen::Index j = 0; j < n; ++j) P(i, j) = L(order[i], order[j]);
    }
    return make(P, nb, sender, receiver, std::move(permuted_loss));
}

Eigen::VectorXd Transceiver::pack(const TransceiverState& s) const {
    check_dims(*this, s);
    Eigen::VectorXd v(state_size());
    v << s.sender, s.receiver, s.complex;
    return v;
}

TransceiverState Transceiver::unpack(const Eigen::VectorXd& v) const {
    if (v.size() != state_size()) throw std::invalid_argument("transceiver: packed state size mismatch");
    return {v.head(n_sender), v.segment(n_sender, n_receiver), v.tail(n_receiver)};
}

TransceiverState Transceiver::zero_state() const {
    return {Eigen::VectorXd::Zero(n_sender), Eigen::VectorXd::Zero(n_receiver), Eigen::VectorXd::Zero(n_receiver)};
}

TransceiverState transceiver_rhs(const Transceiver& tx, const TransceiverState& st, const Eigen::VectorXd& p_I) {
    check_dims(tx, st);
    if (p_I.size() != tx.n_sender) throw std::invalid_argument("transceiver_rhs: input dimension mismatch");
    Eigen::VectorXd X(tx.size());
    X << st.sender, st.receiver;
    const Eigen::VectorXd diffusion = tx.laplacian * X;
    const Eigen::VectorXd decay = (tx.gamma + tx.extra_loss.array()).matrix().cwiseProduct(X);

    TransceiverState d;
    const Eigen::ArrayXd binding = tx.k_on * st.receiver.array() * (tx.p_R - st.complex.array()) -
                                   tx.k_off * st.complex.array();
    d.sender = tx.nu * p_I - decay.head(tx.n_sender) + diffusion.head(tx.n_sender);
    d.receiver = (-binding).matrix() - decay.tail(tx.n_receiver) + diffusion.tail(tx.n_receiver);
    d.complex = binding.matrix();
    return d;
}

TransceiverState transceiver_steady_state(const Transceiver& tx, const Eigen::VectorXd& p_I) {
    if (p_I.size() != tx.n_sender) throw std::invalid_argument("transceiver_steady_state: input dimension mismatch");
    if ((p_I.array() < 0.0).any()) throw std::domain_error("transceiver_steady_state: input must be nonnegative");
    Eigen::MatrixXd M = -tx.laplacian;
    M.diagonal().array() += tx.gamma + tx.extra_loss.array();
    Eigen::VectorXd rhs = Eigen::VectorXd::Zero(tx.size());
    rhs.head(tx.n_sender) = tx.nu * p_I;
    Eigen::LDLT<Eigen::MatrixXd> ldlt(M);
    assert(ldlt.info() == Eigen::Success);
    const Eigen::VectorXd X = ldlt.solve(rhs);

    TransceiverState st;
    st.sender = X.head(tx.n_sender);
    st.receiver = X.tail(tx.n_receiver);
    const double kd = tx.k_off / tx.k_on;
    st.complex = (tx.p_R * st.receiver.array() / (st.receiver.array() + kd)).matrix();
    return st;
}

Eigen::MatrixXd transceiver_jacobian(const Transceiver& tx, const TransceiverState& st) {
    check_dims(tx, st);
    const Eigen::Index n = tx.size();
    const Eigen::Index nr = tx.n_receiver;
    Eigen::MatrixXd J = Eigen::MatrixXd::Zero(tx.state_size(), tx.state_size());
    J.topLeftCorner(n, n) = tx.laplacian;
    J.topLeftCorner(n, n).diagonal().array() -= tx.gamma + tx.extra_loss.array();
    for (Eigen::Index j = 0; j < nr; ++j) {
        const Eigen::Index x = tx.n_sender + j;
        const Eigen::Index r = n + j;
        const double d_r = tx.k_on * (tx.p_R - st.complex[j]);
        const double d_x = tx.k_on * st.receiver[j] + tx.k_off;
        J(x, x) -= d_r;
        J(x, r) += d_x;
        J(r, x) += d_r;
        J(r, r) -= d_x;
    }
    return J;
}

Eigen::MatrixXd TransceiverLinearization::dc_gain() const { return -C * A.partialPivLu().solve(B); }

TransceiverLinearization linearize_transceiver(const Transceiver& tx, const TransceiverState& st) {
    TransceiverLinearization lin;
    lin.A = transceiver_jacobian(tx, st);
    lin.B = Eigen::MatrixXd::Zero(tx.state_size(), tx.n_sender);
    lin.B.topRows(tx.n_sender).diagonal().setConstant(tx.nu);
    lin.C = Eigen::MatrixXd::Zero(tx.n_receiver, tx.state_size());
    lin.C.rightCols(tx.n_receiver).setIdentity();
    return lin;
}

ContractionReport contraction_check(const Transceiver& tx, const TransceiverState& st) {
    const double k_upper = 1.0 + tx.gamma / (tx.k_on * tx.p_R);
    assert(k_upper > 1.0);
    ContractionReport rep;
    rep.k_upper = k_upper;
    rep.k = 0.5 * (1.0 + k_upper);
    rep.weights = Eigen::VectorXd::Ones(tx.state_size());
    rep.weights.tail(tx.n_receiver).setConstant(rep.k);

    const Eigen::MatrixXd J = transceiver_jacobian(tx, st);
    const Eigen::MatrixXd M = rep.weights.asDiagonal() * J * rep.weights.cwiseInverse().asDiagonal();
    rep.measure = -std::numeric_limits<double>::infinity();
    for (Eigen::Index j = 0; j < M.cols(); ++j) {
        double col = M(j, j);
        for (Eigen::Index i = 0; i < M.rows(); ++i) {
            if (i != j) col += std::abs(M(i, j));
        }
        rep.measure = std::max(rep.measure, col);
    }
    return rep;
}

OdeSystem transceiver_system(const Transceiver& tx, const Eigen::VectorXd& p_I) {
    OdeSystem sys;
    sys.rhs = [tx, p_I](const Eigen::VectorXd& x, Eigen::VectorXd& dx) {
        dx = tx.pack(transceiver_rhs(tx, tx.unpack(x), p_I));
    };
    sys.jacobian = [tx](const Eigen::VectorXd& x, Eigen::MatrixXd& J) {
        J = transceiver_jacobian(tx, tx.unpack(x));
    };
    return sys;
}

DecoupledTransceiver DecoupledTransceiver::a_to_b(const LaplacianPair& lp, const ParameterSet& sender,
                                                  const ParameterSet& receiver, double loss_a, double loss_b) {
    return {sender.nu, sender.gamma_X, receiver.k_on, receiver.k_off, receiver.p_Ri,
            lp.d_ab(), lp.d_ba(), loss_a, loss_b};
}

DecoupledTransceiver DecoupledTransceiver::b_to_a(const LaplacianPair& lp, const ParameterSet& sender,
                                                  const ParameterSet& receiver, double loss_a, double loss_b) {
    return {sender.nu, sender.gamma_X, receiver.k_on, receiver.k_off, receiver.p_Ri,
            lp.d_ba(), lp.d_ab(), loss_b, loss_a};
}

double DecoupledTransceiver::signal_gain() const {
    const double gs = gamma + loss_sender + d_out;
    const double gr = gamma + loss_receiver + d_in;
    return d_in * nu / (gs * gr - d_out * d_in);
}

double DecoupledTransceiver::value(double z) const {
    if (z < 0.0) throw std::domain_error("decoupled transceiver: input must be nonnegative");
    if (z == 0.0) return 0.0;
    const double x = signal_gain() * z;
    return p_R * x / (x + k_off / k_on);
}

double DecoupledTransceiver::slope(double z) const {
    if (z < 0.0) throw std::domain_error("decoupled transceiver: input must be nonnegative");
    const double g = signal_gain();
    const double kd = k_off / k_on;
    const double x = g * z;
    return p_R * kd * g / ((x + kd) * (x + kd));
}

double decoupled_T_AB(double z, double d_ab, double d_ba, const ParameterSet& p) {
    if (!(d_ab > 0.0) || !(d_ba > 0.0)) throw std::domain_error("decoupled_T_AB: weights must be positive");
    return DecoupledTransceiver{p.nu, p.gamma_X, p.k_on, p.k_off, p.p_Ri, d_ab, d_ba}.value(z);
}

double decoupled_T_AB_prime(double z, double d_ab, double d_ba, const ParameterSet& p) {
    if (!(d_ab > 0.0) || !(d_ba > 0.0)) throw std::domain_error("decoupled_T_AB_prime: weights must be positive");
    return DecoupledTransceiver{p.nu, p.gamma_X, p.k_on, p.k_off, p.p_Ri, d_ab, d_ba}.slope(z);
}

}  // namespace latinhib
