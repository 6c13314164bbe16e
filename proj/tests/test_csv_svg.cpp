#include <catch2/catch.hpp>

#include <cstdio>
#include <filesystem>
#include <sstream>

#include "fracres/csv.hpp"
#include "fracres/svg_plot.hpp"

using namespace fracres;

namespace {

TimeSeries small_series() {
    TimeSeries ts;
    ts.columns = {"t_over_T", "P0", "P3"};
    ts.rows = {{0.0, 1.0, 0.0}, {1.0, 0.75, 0.2}, {2.0, 0.5, 0.45}, {3.0, 0.25, 0.7}};
    return ts;
}

}  // namespace

TEST_CASE("CSV round-trips doubles exactly") {
    TimeSeries ts;
    ts.columns = {"t_over_T", "x"};
    ts.rows = {{0.0, 1.0 / 3.0}, {1.0, -2.5e-17}, {2.0, 0.1 + 0.2}, {3.0, 1e300}};

    std::stringstream buf;
    write_csv(ts, buf);
    const auto back = read_csv(buf);
    REQUIRE(back.columns == ts.columns);
    REQUIRE(back.rows.size() == ts.rows.size());
    for (std::size_t r = 0; r < ts.rows.size(); ++r)
        for (std::size_t c = 0; c < ts.columns.size(); ++c)
            CHECK(back.rows[r][c] == ts.rows[r][c]);  // bitwise
}

TEST_CASE("CSV uses LF line endings and 17 significant digits") {
    TimeSeries ts;
    ts.columns = {"t_over_T"};
    ts.rows = {{1.0 / 3.0}};
    std::stringstream buf;
    write_csv(ts, buf);
    CHECK(buf.str() == "t_over_T\n0.33333333333333331\n");
}

TEST_CASE("CSV reader rejects malformed input") {
    std::stringstream bad_cell("a,b\n1,zzz\n");
    CHECK_THROWS_WITH(read_csv(bad_cell), Catch::Matchers::Contains("zzz"));
    std::stringstream bad_width("a,b\n1\n");
    CHECK_THROWS_AS(read_csv(bad_width), std::runtime_error);
    std::stringstream empty("");
    CHECK_THROWS_AS(read_csv(empty), std::runtime_error);
}

TEST_CASE("column lookup names the missing column") {
    const auto ts = small_series();
    CHECK(ts.column_index("P3") == 2);
    CHECK_THROWS_WITH(ts.column_index("P9"), Catch::Matchers::Contains("P9"));
    CHECK(ts.column("P0").size() == 4);
}

TEST_CASE("SVG plot renders one polyline per column plus a legend") {
    const auto svg = render_line_plot_svg(small_series(), {"P0", "P3"});
    CHECK(svg.find("viewBox=\"0 0 960 600\"") != std::string::npos);
    std::size_t polylines = 0;
    for (std::size_t pos = 0; (pos = svg.find("<polyline", pos)) != std::string::npos; ++pos)
        ++polylines;
    CHECK(polylines == 2);
    CHECK(svg.find(">P0</text>") != std::string::npos);
    CHECK(svg.find(">P3</text>") != std::string::npos);
    CHECK(svg.find(">t_over_T</text>") != std::string::npos);

    // deterministic output
    CHECK(render_line_plot_svg(small_series(), {"P0", "P3"}) == svg);
}

TEST_CASE("SVG plot rejects unknown columns and empty series") {
    CHECK_THROWS_WITH(render_line_plot_svg(small_series(), {"nope"}),
                      Catch::Matchers::Contains("nope"));

    TimeSeries headers_only;
    headers_only.columns = {"t_over_T", "P0"};
    const auto path = std::filesystem::temp_directory_path() / "fracres_empty_plot.svg";
    std::filesystem::remove(path);
    CHECK_THROWS_AS(write_line_plot_svg(headers_only, {"P0"}, path.string()),
                    std::invalid_argument);
    CHECK(!std::filesystem::exists(path));  // nothing written on failure
}

TEST_CASE("flat and constant columns still produce a valid plot") {
    TimeSeries ts;
    ts.columns = {"t_over_T", "S"};
    ts.rows = {{0.0, 0.0}, {1.0, 0.0}, {2.0, 0.0}};
    const auto svg = render_line_plot_svg(ts, {"S"});
    CHECK(svg.find("<polyline") != std::string::npos);
}
