#include <catch2/catch.hpp>

#include <cstdio>
#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <sstream>
#include <string>

#include <json.hpp>

#include "fracres/csv.hpp"

namespace fs = std::filesystem;

namespace {

struct CliResult {
    int code;
    std::string output;  // stdout + stderr
};

// one scratch directory per test-process run, wiped on first touch
const fs::path& cli_dir() {
    static const fs::path dir = [] {
        auto d = fs::temp_directory_path() / "fracres_cli_tests";
        fs::remove_all(d);
        fs::create_directories(d);
        return d;
    }();
    return dir;
}

// The unit binary drives the installed CLI the way a shell user would.
CliResult run_cli(const std::string& args) {
    const fs::path capture = cli_dir() / "capture.txt";
    const std::string cmd = "cd '" + cli_dir().string() + "' && '" + FRACRES_CLI_PATH + "' " +
                            args + " > capture.txt 2>&1";
    const int status = std::system(cmd.c_str());
    std::ifstream in(capture);
    std::stringstream buf;
    buf << in.rdbuf();
    return {WEXITSTATUS(status), buf.str()};
}

fs::path write_scenario(const std::string& name, const std::string& body) {
    const auto path = cli_dir() / name;
    std::ofstream out(path);
    out << body;
    return path;
}

const std::string kTinyScenario =
    "L = 2\n"
    "n_max = 2\n"
    "drive = integer\n"
    "t_final_periods = 2\n"
    "dt_periods = 0.015625\n"
    "output_stride = 16\n";

}  // namespace

TEST_CASE("cli: dims reports the configuration counts") {
    const auto r = run_cli("dims 3 3");
    CHECK(r.code == 0);
    CHECK(r.output.find("full dimension: 64") != std::string::npos);
    CHECK(r.output.find("sum over sectors: 64") != std::string::npos);

    const auto r4 = run_cli("dims 4 4");
    CHECK(r4.code == 0);
    CHECK(r4.output.find("full dimension: 625") != std::string::npos);
}

TEST_CASE("cli: simulate writes a deterministic CSV and a summary") {
    write_scenario("tiny.scn", kTinyScenario);
    const auto r1 = run_cli("simulate tiny.scn --out tiny.csv");
    REQUIRE(r1.code == 0);
    CHECK(r1.output.find("wrote tiny.csv") != std::string::npos);
    CHECK(r1.output.find("final S") != std::string::npos);

    const auto ts = fracres::read_csv_file((cli_dir() / "tiny.csv").string());
    CHECK(ts.columns[0] == "t_over_T");
    CHECK(ts.rows.size() == 9);  // 2 periods / (16 * dt) + initial sample
    for (double s : ts.column("S")) CHECK(s < 1e-10);  // closed run stays pure
    for (double tr : ts.column("trace")) CHECK(tr == Approx(1.0).margin(1e-9));

    // byte-identical on a second run
    std::ifstream first(cli_dir() / "tiny.csv");
    std::stringstream buf1;
    buf1 << first.rdbuf();
    const auto r2 = run_cli("simulate tiny.scn --out tiny2.csv");
    REQUIRE(r2.code == 0);
    std::ifstream second(cli_dir() / "tiny2.csv");
    std::stringstream buf2;
    buf2 << second.rdbuf();
    CHECK(buf1.str() == buf2.str());
}

TEST_CASE("cli: compare pairs closed and open populations") {
    write_scenario("tiny_open.scn", kTinyScenario + "kappa_hz = [1e-4, 2e-4]\n");
    const auto r = run_cli("compare tiny_open.scn --out cmp.csv");
    REQUIRE(r.code == 0);
    CHECK(r.output.find("max |P0 - P0_D|") != std::string::npos);

    const auto ts = fracres::read_csv_file((cli_dir() / "cmp.csv").string());
    CHECK(ts.column_index("P0") == 1);
    CHECK(ts.column_index("P0_D") == 2);

    // with all rates zero the two columns coincide
    write_scenario("tiny_zero.scn", kTinyScenario);
    const auto rz = run_cli("compare tiny_zero.scn --out cmp0.csv");
    REQUIRE(rz.code == 0);
    const auto ts0 = fracres::read_csv_file((cli_dir() / "cmp0.csv").string());
    const auto closed = ts0.column("P0");
    const auto open = ts0.column("P0_D");
    for (std::size_t i = 0; i < closed.size(); ++i)
        CHECK(std::abs(closed[i] - open[i]) < 1e-8);
}

TEST_CASE("cli: resonances emits parseable JSON") {
    write_scenario("res.scn", "L = 3\ndrive = fractional\nm_max = 1\n");
    const auto r = run_cli("resonances res.scn --json");
    REQUIRE(r.code == 0);
    const auto j = nlohmann::json::parse(r.output);
    REQUIRE(j["entries"].size() == 2);
    CHECK(j["entries"][0]["omega_over_U"].get<double>() == Approx(0.5));
    CHECK(j["entries"][0]["kind"] == "fractional");
    CHECK(j["entries"][1]["omega_over_U"].get<double>() == Approx(1.0));
    CHECK(j["drive_matches"].size() == 1);

    const auto rt = run_cli("resonances res.scn");
    CHECK(rt.code == 0);
    CHECK(rt.output.find("fractional") != std::string::npos);
}

TEST_CASE("cli: plot renders selected columns") {
    write_scenario("tiny.scn", kTinyScenario);
    REQUIRE(run_cli("simulate tiny.scn --out plot_me.csv").code == 0);
    const auto r = run_cli("plot plot_me.csv --cols P0,S --out out.svg");
    REQUIRE(r.code == 0);
    std::ifstream svg(cli_dir() / "out.svg");
    std::stringstream buf;
    buf << svg.rdbuf();
    CHECK(buf.str().rfind("<svg", 0) == 0);
    CHECK(buf.str().find("<polyline") != std::string::npos);

    const auto bad = run_cli("plot plot_me.csv --cols nope --out bad.svg");
    CHECK(bad.code == 1);
    CHECK(bad.output.find("nope") != std::string::npos);
    CHECK(!fs::exists(cli_dir() / "bad.svg"));
}

TEST_CASE("cli: exit codes distinguish usage from parse errors") {
    CHECK(run_cli("").code == 1);                        // missing subcommand
    CHECK(run_cli("simulate missing.scn").code == 1);    // unreadable file
    write_scenario("bad.scn", "L = 0\n");
    const auto r = run_cli("simulate bad.scn");
    CHECK(r.code == 1);
    CHECK(r.output.find("L") != std::string::npos);
    write_scenario("badkey.scn", "L = 3\nwhatever = 1\n");
    const auto rk = run_cli("simulate badkey.scn");
    CHECK(rk.code == 1);
    CHECK(rk.output.find("whatever") != std::string::npos);
}

TEST_CASE("cli: integrator aborts surface as exit code 2") {
    // a step far outside the stability region blows the norm up immediately
    write_scenario("blowup.scn",
                   "L = 2\n"
                   "n_max = 2\n"
                   "U_over_J0 = 0.25\n"
                   "t_final_periods = 8\n"
                   "dt_periods = 0.5\n");
    const auto r = run_cli("simulate blowup.scn");
    CHECK(r.code == 2);
    CHECK(r.output.find("numerical abort") != std::string::npos);
}
