#include <doctest.h>

#include <sstream>

#include "latinhib/sweep.hpp"

using namespace latinhib;

namespace {

SweepSpec small_spec(unsigned threads) {
    SweepSpec s = SweepSpec::defaults();
    s.p_Ri = make_axis(1e-10, 1e-4, 6, AxisSpacing::log);
    s.lengths = make_axis(100e-6, 6e-3, 5, AxisSpacing::linear);
    s.threads = threads;
    return s;
}

}  // namespace

TEST_CASE("axes") {
    const auto lin = make_axis(1.0, 3.0, 5, AxisSpacing::linear);
    CHECK(lin == std::vector<double>{1.0, 1.5, 2.0, 2.5, 3.0});
    const auto lg = make_axis(1e-10, 1e-4, 7, AxisSpacing::log);
    REQUIRE(lg.size() == 7);
    CHECK(lg.front() == 1e-10);
    CHECK(lg.back() == 1e-4);
    CHECK(lg[3] == doctest::Approx(1e-7).epsilon(1e-12));
    CHECK_THROWS(make_axis(0.0, 1.0, 3, AxisSpacing::log));
    CHECK_THROWS(make_axis(2.0, 1.0, 3, AxisSpacing::linear));

    const SweepSpec d = SweepSpec::defaults();
    CHECK(d.p_Ri.size() == 64);
    CHECK(d.lengths.size() == 64);
    CHECK(d.lengths.front() == doctest::Approx(100e-6));
    CHECK(d.lengths.back() == doctest::Approx(6e-3));
}

TEST_CASE("single points") {
    const ParameterSet p;
    CHECK(classify_point(p, 5e-7, 500e-6, 1.0, 4.9e-10).value == CellValue::patterned);
    CHECK(classify_point(p, 1e-12, 500e-6, 1.0, 4.9e-10).value == CellValue::homogeneous);
    const SweepCell c = classify_point(p, 1e-3, 500e-6, 1.0, 4.9e-10);
    CHECK(c.value == CellValue::homogeneous);
    CHECK(c.fixed_points == 1);
}

TEST_CASE("output does not depend on the thread count") {
    const SweepGrid a = run_sweep(small_spec(1));
    const SweepGrid b = run_sweep(small_spec(4));
    REQUIRE(a.cells.size() == 30);
    std::ostringstream sa, sb;
    write_sweep_csv(sa, a);
    write_sweep_csv(sb, b);
    CHECK(sa.str() == sb.str());
    for (std::size_t k = 0; k < a.cells.size(); ++k) CHECK(a.cells[k].value == b.cells[k].value);
    CHECK(a.at(1, 0).length == a.lengths[1]);
    CHECK(a.at(1, 2).p_Ri == a.p_Ri[2]);
}

TEST_CASE("sweep csv layout") {
    const SweepGrid g = run_sweep(small_spec(2));
    std::ostringstream os;
    write_sweep_csv(os, g);
    std::istringstream is(os.str());
    std::string line;
    std::getline(is, line);
    CHECK(line.rfind("length_um,", 0) == 0);
    CHECK(std::count(line.begin(), line.end(), ',') == 6);
    int rows = 0;
    while (std::getline(is, line)) ++rows;
    CHECK(rows == 5);
}

TEST_CASE("length cap lies inside the patterned band") {
    const ParameterSet p;
    const auto cap = length_cap(p, 5e-7, 500e-6, 0.1, 1.0, 4.9e-10);
    REQUIRE(cap.has_value());
    CHECK(*cap > 500e-6);
    CHECK(classify_point(p, 5e-7, 0.99 * *cap, 1.0, 4.9e-10).value == CellValue::patterned);
    CHECK(classify_point(p, 5e-7, 1.01 * *cap, 1.0, 4.9e-10).value != CellValue::patterned);
    CHECK_FALSE(length_cap(p, 1e-12, 500e-6, 0.1, 1.0, 4.9e-10).has_value());
}
