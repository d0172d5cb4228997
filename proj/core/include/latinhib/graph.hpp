#pragma once

#include <cstddef>
#include <optional>
#include <string>
#include <variant>
#include <vector>

#include <Eigen/Dense>

namespace latinhib {

enum class CompartmentClass { A, B };

const char* to_string(CompartmentClass c);

struct Compartment {
    std::string id;
    CompartmentClass cls;
};

/// A channel between two compartments. Lengths and widths are in meters.
struct Channel {
    std::size_t a;
    std::size_t b;
    double length;
    std::optional<double> width;
};

/// Diffusion rate of one channel, d = D / (l * w)  [1/s].
/// Throws std::domain_error on non-positive geometry.
double edge_weight(double length, double width, double diffusivity);

//
// Compartment network. Vertices are stored with every A compartment ahead of
// every B compartment; channel endpoints refer to that order. Immutable once
// constructed.
//
class CompartmentGraph {
public:
    // Channel widths resolve in this order: per-channel width, then the
    // global compartment width, then length / width_factor.
    CompartmentGraph(std::vector<Compartment> compartments,
                     std::vector<Channel> channels,
                     std::optional<double> compartment_width,
                     double width_factor,
                     double diffusivity);

    // Same as above but channel endpoints are given by compartment id.
    struct ChannelSpec {
        std::string a;
        std::string b;
        double length;
        std::optional<double> width;
    };
    static CompartmentGraph from_ids(std::vector<Compartment> compartments,
                                     const std::vector<ChannelSpec>& channels,
                                     std::optional<double> compartment_width,
                                     double width_factor,
                                     double diffusivity);

    // One A and one B compartment joined by a single channel of the given length.
    static CompartmentGraph pair(double length, double width_factor, double diffusivity);

    // Four compartments A1, A2, B1, B2 with opposite channels of equal length:
    // A1-B1 and A2-B2 have length `side`, A2-B1 and A1-B2 have length `diagonal`.
    static CompartmentGraph parallelogram(double side, double diagonal,
                                          double width_factor, double diffusivity);

    const std::vector<Compartment>& compartments() const { return compartments_; }
    const std::vector<Channel>& channels() const { return channels_; }
    std::size_t size() const { return compartments_.size(); }
    std::size_t count_a() const { return count_a_; }
    std::size_t count_b() const { return compartments_.size() - count_a_; }
    std::optional<double> compartment_width() const { return compartment_width_; }
    double width_factor() const { return width_factor_; }
    double diffusivity() const { return diffusivity_; }

    double channel_width(const Channel& c) const;
    double weight(const Channel& c) const;
    std::optional<std::size_t> index_of(const std::string& id) const;

    // Copy with one channel length replaced; used for perturbation studies.
    CompartmentGraph with_channel_length(std::size_t channel, double length) const;

private:
    std::vector<Compartment> compartments_;
    std::vector<Channel> channels_;
    std::size_t count_a_ = 0;
    std::optional<double> compartment_width_;
    double width_factor_;
    double diffusivity_;
};

/// Weighted Laplacian: off-diagonals d_ij, diagonal minus the row sum.
Eigen::MatrixXd build_laplacian(const CompartmentGraph& g);

/// Laplacian from explicit weights, `weights[k]` belonging to `g.channels()[k]`.
Eigen::MatrixXd build_laplacian(const CompartmentGraph& g, const std::vector<double>& weights);

struct LaplacianPair {
    Eigen::MatrixXd laplacian;   // N x N, A compartments first
    Eigen::Matrix2d quotient;    // rows/cols ordered (A, B)
    std::vector<int> class_map;  // 0 for A, 1 for B
    std::size_t count_a = 0;
    std::size_t count_b = 0;

    // Total weight from any A compartment into class B, and vice versa.
    double d_ab() const { return quotient(0, 1); }
    double d_ba() const { return quotient(1, 0); }
};

struct NotEquitable {
    std::size_t vertex;         // compartment with the largest cross-class sum
    std::size_t other_vertex;   // same-class compartment with the smallest sum
    double discrepancy;         // relative difference of the two sums
};

using EquitableResult = std::variant<LaplacianPair, NotEquitable>;

/// Checks the A/B partition for equitability with relative tolerance `tol`.
EquitableResult check_equitable(const CompartmentGraph& g, double tol = 1e-9);

/// Same check on an already-assembled Laplacian (A compartments first).
EquitableResult check_equitable(const Eigen::MatrixXd& laplacian, std::size_t count_a,
                                double tol = 1e-9);

}  // namespace latinhib
