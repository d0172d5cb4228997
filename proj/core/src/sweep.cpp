#include "latinhib/sweep.hpp"

#include <atomic>
#include <cmath>
#include <iomanip>
#include <ostream>
#include <sstream>
#include <stdexcept>
#include <thread>

#include "latinhib/graph.hpp"
#include "latinhib/transceiver.hpp"

namespace latinhib {

std::vector<double> make_axis(double lo, double hi, std::size_t n, AxisSpacing spacing) {
    if (n == 0) throw std::invalid_argument("make_axis: empty axis");
    if (n == 1) return {lo};
    if (!(hi > lo)) throw std::invalid_argument("make_axis: upper end must exceed lower end");
    if (spacing == AxisSpacing::log && !(lo > 0.0)) throw std::invalid_argument("make_axis: log axis needs lo > 0");
    std::vector<double> a(n);
    for (std::size_t i = 0; i < n; ++i) {
        const double t = static_cast<double>(i) / static_cast<double>(n - 1);
        a[i] = spacing == AxisSpacing::linear ? lo + (hi - lo) * t
                                              : std::exp(std::log(lo) + (std::log(hi) - std::log(lo)) * t);
    }
    a.front() = lo;
    a.back() = hi;
    return a;
}

SweepSpec SweepSpec::defaults() {
    SweepSpec s;
    s.p_Ri = make_axis(1e-10, 1e-4, 64, AxisSpacing::log);
    s.lengths = make_axis(0.1e-3, 6e-3, 64, AxisSpacing::linear);
    return s;
}

void SweepSpec::validate() const {
    base.validate();
    auto increasing = [](const std::vector<double>& v) {
        if (v.empty()) return false;
        for (std::size_t i = 1; i < v.size(); ++i) {
            if (!(v[i] > v[i - 1])) return false;
        }
        return v.front() > 0.0;
    };
    if (!increasing(p_Ri)) throw std::invalid_argument("sweep: p_Ri axis must be positive and strictly increasing");
    if (!increasing(lengths)) throw std::invalid_argument("sweep: length axis must be positive and strictly increasing");
    if (!(width_factor > 0.0) || !(diffusivity > 0.0)) {
        throw std::invalid_argument("sweep: width factor and diffusivity must be positive");
    }
}

SweepCell classify_point(const ParameterSet& base, double p_Ri, double length, double width_factor,
                         double diffusivity, const FixedPointOptions& opt) {
    SweepCell cell;
    cell.p_Ri = p_Ri;
    cell.length = length;
    try {
        ParameterSet p = base;
        p.p_Ri = p_Ri;
        p.validate();
        const double d = width_factor * diffusivity / (length * length);
        const FixedPointReport rep = find_fixed_points(
            reduced_maps(p, p, DecoupledTransceiver{p.nu, p.gamma_X, p.k_on, p.k_off, p.p_Ri, d, d},
                         DecoupledTransceiver{p.nu, p.gamma_X, p.k_on, p.k_off, p.p_Ri, d, d}),
            opt);
        const Classification c = classify_patterning(rep);
        cell.fixed_points = rep.points.size();
        cell.middle_slope = rep.points[*rep.near_homogeneous].slope;
        cell.value = c.patterned ? CellValue::patterned : c.marginal ? CellValue::marginal : CellValue::homogeneous;
    } catch (const std::exception& e) {
        cell.value = CellValue::failed;
        cell.error = e.what();
    }
    return cell;
}

SweepGrid run_sweep(const SweepSpec& spec) {
    spec.validate();
    SweepGrid grid;
    grid.p_Ri = spec.p_Ri;
    grid.lengths = spec.lengths;
    const std::size_t cols = spec.p_Ri.size();
    const std::size_t total = cols * spec.lengths.size();
    grid.cells.resize(total);

    // Each worker claims the next index; every cell is written exactly once.
    std::atomic<std::size_t> next{0};
    auto work = [&] {
        for (std::size_t k = next++; k < total; k = next++) {
            grid.cells[k] = classify_point(spec.base, spec.p_Ri[k % cols], spec.lengths[k / cols], spec.width_factor,
                                           spec.diffusivity, spec.fixed_points);
        }
    };
    unsigned n = spec.threads ? spec.threads : std::max(1u, std::thread::hardware_concurrency());
    n = static_cast<unsigned>(std::min<std::size_t>(n, total));
    std::vector<std::thread> pool;
    for (unsigned t = 1; t < n; ++t) pool.emplace_back(work);
    work();
    for (auto& t : pool) t.join();
    return grid;
}

std::optional<double> length_cap(const ParameterSet& base, double p_Ri, double start, double max_length,
                                 double width_factor, double diffusivity, double rel_tol) {
    auto patterned = [&](double l) {
        return classify_point(base, p_Ri, l, width_factor, diffusivity).value == CellValue::patterned;
    };
    if (!patterned(start)) return std::nullopt;
    double lo = start;
    double hi = start;
    while (patterned(hi)) {
        lo = hi;
        if (hi >= max_length) return std::nullopt;
        hi = std::min(2.0 * hi, max_length);
    }
    while (hi - lo > rel_tol * hi) {
        const double mid = 0.5 * (lo + hi);
        if (patterned(mid)) lo = mid;
        else hi = mid;
    }
    return hi;
}

void write_sweep_csv(std::ostream& os, const SweepGrid& grid) {
    std::ostringstream line;
    line << std::setprecision(10);
    line << "length_um";
    for (double p : grid.p_Ri) line << ',' << p;
    os << line.str() << '\n';
    for (std::size_t r = 0; r < grid.lengths.size(); ++r) {
        line.str("");
        line << grid.lengths[r] * 1e6;
        for (std::size_t c = 0; c < grid.p_Ri.size(); ++c) line << ',' << static_cast<int>(grid.at(r, c).value);
        os << line.str() << '\n';
    }
}

}  // namespace latinhib
