#pragma once

#include <cstddef>
#include <iosfwd>
#include <optional>
#include <string>
#include <vector>

#include "latinhib/kinetics.hpp"
#include "latinhib/patterning.hpp"

namespace latinhib {

enum class AxisSpacing { linear, log };

/// n points from lo to hi inclusive, strictly increasing.
std::vector<double> make_axis(double lo, double hi, std::size_t n, AxisSpacing spacing);

struct SweepSpec {
    ParameterSet base;
    std::vector<double> p_Ri;      // M, strictly increasing
    std::vector<double> lengths;   // m, strictly increasing
    double width_factor = 1.0;
    double diffusivity = 4.9e-10;
    FixedPointOptions fixed_points;
    unsigned threads = 0;          // 0: hardware concurrency

    /// The 64 x 64 default: p_Ri log over [1e-10, 1e-4] M, l12 linear over [0.1, 6] mm.
    static SweepSpec defaults();
    void validate() const;
};

// Values written to the matrix CSV.
enum class CellValue : int { failed = -1, homogeneous = 0, patterned = 1, marginal = 2 };

struct SweepCell {
    double p_Ri = 0.0;
    double length = 0.0;
    CellValue value = CellValue::failed;
    std::size_t fixed_points = 0;
    double middle_slope = 0.0;   // slope at the near-homogeneous point
    std::string error;
};

struct SweepGrid {
    std::vector<double> p_Ri;
    std::vector<double> lengths;
    std::vector<SweepCell> cells;  // row-major: lengths are rows, p_Ri columns

    const SweepCell& at(std::size_t row, std::size_t col) const { return cells[row * p_Ri.size() + col]; }
};

/// Classifies one parameter point of the two-compartment network.
SweepCell classify_point(const ParameterSet& base, double p_Ri, double length, double width_factor,
                         double diffusivity, const FixedPointOptions& opt = {});

/// Evaluates every cell; output order does not depend on the thread count.
SweepGrid run_sweep(const SweepSpec& spec);

/// Smallest length above `start` where the point is no longer patterned,
/// bracketed by doubling and refined by bisection to `rel_tol`. Empty if
/// still patterned at `max_length` or not patterned at `start`.
std::optional<double> length_cap(const ParameterSet& base, double p_Ri, double start, double max_length,
                                 double width_factor, double diffusivity, double rel_tol = 1e-3);

/// Header "length_um,<p_Ri values>", one row per length.
void write_sweep_csv(std::ostream& os, const SweepGrid& grid);

}  // namespace latinhib
