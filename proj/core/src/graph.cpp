#include "latinhib/graph.hpp"

#include <algorithm>
#include <cmath>
#include <set>
#include <stdexcept>
#include <string>

namespace latinhib {

const char* to_string(CompartmentClass c) { return c == CompartmentClass::A ? "A" : "B"; }

double edge_weight(double length, double width, double diffusivity) {
    if (!(length > 0.0) || !(width > 0.0) || !(diffusivity > 0.0)) {
        throw std::domain_error("edge_weight: channel length, width and diffusivity must be positive");
    }
    return diffusivity / (length * width);
}

CompartmentGraph::CompartmentGraph(std::vector<Compartment> compartments,
                                   std::vector<Channel> channels,
                                   std::optional<double> compartment_width,
                                   double width_factor,
                                   double diffusivity)
    : compartment_width_(compartment_width), width_factor_(width_factor), diffusivity_(diffusivity) {
    if (!(diffusivity > 0.0)) throw std::domain_error("graph: diffusivity must be positive");
    if (!(width_factor > 0.0)) throw std::domain_error("graph: width factor must be positive");
    if (compartment_width && !(*compartment_width > 0.0)) {
        throw std::domain_error("graph: compartment width must be positive");
    }

    std::set<std::string> ids;
    for (const auto& c : compartments) {
        if (c.id.empty()) throw std::invalid_argument("graph: empty compartment id");
        if (!ids.insert(c.id).second) throw std::invalid_argument("graph: duplicate compartment id '" + c.id + "'");
    }

    // Stable reorder: A compartments first.
    std::vector<std::size_t> order(compartments.size());
    for (std::size_t i = 0; i < order.size(); ++i) order[i] = i;
    std::stable_partition(order.begin(), order.end(),
                          [&](std::size_t i) { return compartments[i].cls == CompartmentClass::A; });
    std::vector<std::size_t> position(order.size());
    for (std::size_t k = 0; k < order.size(); ++k) {
        position[order[k]] = k;
        compartments_.push_back(compartments[order[k]]);
        if (compartments[order[k]].cls == CompartmentClass::A) ++count_a_;
    }

    std::set<std::pair<std::size_t, std::size_t>> seen;
    for (const auto& ch : channels) {
        if (ch.a >= compartments.size() || ch.b >= compartments.size()) {
            throw std::invalid_argument("graph: channel endpoint out of range");
        }
        if (ch.a == ch.b) throw std::invalid_argument("graph: self-loop channel");
        if (!(ch.length > 0.0)) throw std::domain_error("graph: channel length must be positive");
        if (ch.width && !(*ch.width > 0.0)) throw std::domain_error("graph: channel width must be positive");
        std::size_t a = position[ch.a];
        std::size_t b = position[ch.b];
        if (!seen.insert({std::min(a, b), std::max(a, b)}).second) {
            throw std::invalid_argument("graph: duplicate channel between '" + compartments_[a].id + "' and '" +
                                        compartments_[b].id + "'");
        }
        channels_.push_back(Channel{a, b, ch.length, ch.width});
    }
}

CompartmentGraph CompartmentGraph::from_ids(std::vector<Compartment> compartments,
                                            const std::vector<ChannelSpec>& channels,
                                            std::optional<double> compartment_width,
                                            double width_factor,
                                            double diffusivity) {
    auto find = [&](const std::string& id) {
        for (std::size_t i = 0; i < compartments.size(); ++i) {
            if (compartments[i].id == id) return i;
        }
        throw std::invalid_argument("graph: channel refers to unknown compartment '" + id + "'");
    };
    std::vector<Channel> resolved;
    resolved.reserve(channels.size());
    for (const auto& c : channels) resolved.push_back(Channel{find(c.a), find(c.b), c.length, c.width});
    return CompartmentGraph(std::move(compartments), std::move(resolved), compartment_width, width_factor,
                            diffusivity);
}

CompartmentGraph CompartmentGraph::pair(double length, double width_factor, double diffusivity) {
    return CompartmentGraph({{"A1", CompartmentClass::A}, {"B1", CompartmentClass::B}},
                            {Channel{0, 1, length, std::nullopt}}, std::nullopt, width_factor, diffusivity);
}

CompartmentGraph CompartmentGraph::parallelogram(double side, double diagonal, double width_factor,
                                                 double diffusivity) {
    return CompartmentGraph({{"A1", CompartmentClass::A},
                             {"A2", CompartmentClass::A},
                             {"B1", CompartmentClass::B},
                             {"B2", CompartmentClass::B}},
                            {Channel{0, 2, side, std::nullopt},
                             Channel{1, 3, side, std::nullopt},
                             Channel{1, 2, diagonal, std::nullopt},
                             Channel{0, 3, diagonal, std::nullopt}},
                            std::nullopt, width_factor, diffusivity);
}

double CompartmentGraph::channel_width(const Channel& c) const {
    if (c.width) return *c.width;
    if (compartment_width_) return *compartment_width_;
    return c.length / width_factor_;
}

double CompartmentGraph::weight(const Channel& c) const {
    return edge_weight(c.length, channel_width(c), diffusivity_);
}

std::optional<std::size_t> CompartmentGraph::index_of(const std::string& id) const {
    for (std::size_t i = 0; i < compartments_.size(); ++i) {
        if (compartments_[i].id == id) return i;
    }
    return std::nullopt;
}

CompartmentGraph CompartmentGraph::with_channel_length(std::size_t channel, double length) const {
    if (channel >= channels_.size()) throw std::out_of_range("graph: channel index out of range");
    auto channels = channels_;
    channels[channel].length = length;
    return CompartmentGraph(compartments_, std::move(channels), compartment_width_, width_factor_, diffusivity_);
}

Eigen::MatrixXd build_laplacian(const CompartmentGraph& g) {
    std::vector<double> w;
    w.reserve(g.channels().size());
    for (const auto& c : g.channels()) w.push_back(g.weight(c));
    return build_laplacian(g, w);
}

Eigen::MatrixXd build_laplacian(const CompartmentGraph& g, const std::vector<double>& weights) {
    if (weights.size() != g.channels().size()) {
        throw std::invalid_argument("build_laplacian: one weight per channel required");
    }
    const auto n = static_cast<Eigen::Index>(g.size());
    Eigen::MatrixXd L = Eigen::MatrixXd::Zero(n, n);
    for (std::size_t k = 0; k < weights.size(); ++k) {
        const auto i = static_cast<Eigen::Index>(g.channels()[k].a);
        const auto j = static_cast<Eigen::Index>(g.channels()[k].b);
        L(i, j) += weights[k];
        L(j, i) += weights[k];
    }
    // Diagonal from the off-diagonal row sum so every row sums to zero.
    for (Eigen::Index i = 0; i < n; ++i) {
        double s = 0.0;
        for (Eigen::Index j = 0; j < n; ++j) {
            if (j != i) s += L(i, j);
        }
        L(i, i) = -s;
    }
    return L;
}

EquitableResult check_equitable(const Eigen::MatrixXd& L, std::size_t count_a, double tol) {
    const auto n = static_cast<std::size_t>(L.rows());
    if (L.cols() != L.rows() || count_a > n) throw std::invalid_argument("check_equitable: bad dimensions");
    const std::size_t count_b = n - count_a;
    if (count_a == 0 || count_b == 0) {
        throw std::invalid_argument("check_equitable: both compartment classes must be present");
    }

    // Cross-class sums: for u in A the weight into B, for u in B the weight into A.
    std::vector<double> cross(n, 0.0);
    for (std::size_t u = 0; u < n; ++u) {
        const bool in_a = u < count_a;
        for (std::size_t v = 0; v < n; ++v) {
            if ((v < count_a) != in_a) {
                cross[u] += L(static_cast<Eigen::Index>(u), static_cast<Eigen::Index>(v));
            }
        }
    }

    NotEquitable worst{0, 0, 0.0};
    auto scan = [&](std::size_t lo, std::size_t hi) {
        auto [mn, mx] = std::minmax_element(cross.begin() + static_cast<std::ptrdiff_t>(lo),
                                            cross.begin() + static_cast<std::ptrdiff_t>(hi));
        const double scale = std::max(std::abs(*mx), std::abs(*mn));
        const double disc = scale > 0.0 ? (*mx - *mn) / scale : 0.0;
        if (disc > worst.discrepancy) {
            worst = NotEquitable{static_cast<std::size_t>(mx - cross.begin()),
                                 static_cast<std::size_t>(mn - cross.begin()), disc};
        }
    };
    scan(0, count_a);
    scan(count_a, n);
    if (worst.discrepancy > tol) return worst;

    double d_ab = 0.0;
    double d_ba = 0.0;
    for (std::size_t u = 0; u < count_a; ++u) d_ab += cross[u];
    for (std::size_t u = count_a; u < n; ++u) d_ba += cross[u];
    d_ab /= static_cast<double>(count_a);
    d_ba /= static_cast<double>(count_b);

    LaplacianPair out;
    out.laplacian = L;
    out.quotient << -d_ab, d_ab, d_ba, -d_ba;
    out.count_a = count_a;
    out.count_b = count_b;
    out.class_map.assign(n, 1);
    std::fill(out.class_map.begin(), out.class_map.begin() + static_cast<std::ptrdiff_t>(count_a), 0);
    return out;
}

EquitableResult check_equitable(const CompartmentGraph& g, double tol) {
    return check_equitable(build_laplacian(g), g.count_a(), tol);
}

}  // namespace latinhib
