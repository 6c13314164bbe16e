#include <catch2/catch.hpp>

#include <string>

#include "fracres/scenario.hpp"

using namespace fracres;

TEST_CASE("minimal scenario picks up the documented defaults") {
    const auto cfg = parse_scenario_text("L = 3\ndrive = fractional\n");
    CHECK(cfg.L == 3);
    CHECK(cfg.U_over_J0 == 40.0);
    CHECK(cfg.resolved_n_max() == 3);  // unit filling: N = L
    CHECK(cfg.open_system == false);
    CHECK(cfg.output_stride == 1);

    const auto params = cfg.lattice_params();
    CHECK(params.drive_omega == Approx(0.5 * params.U));
    CHECK(params.U == Approx(40.0 * 2 * M_PI * 11.5e3));
    CHECK(params.omega == 0.0);  // the site term is rotated away

    const auto noise = cfg.noise_params();
    REQUIRE(noise.kappa.size() == 3);
    CHECK(!noise.any_nonzero());
}

TEST_CASE("rate lists parse into per-level noise parameters") {
    const auto cfg = parse_scenario_text(
        "L = 3\n"
        "open_system = true\n"
        "kappa_hz = [11.9e3, 24.39e3, 33.33e3]\n"
        "gamma_hz = [13.89e3, 31.25e3, 83.33e3]\n");
    const auto noise = cfg.noise_params();
    CHECK(noise.kappa == std::vector<double>{11.9e3, 24.39e3, 33.33e3});
    CHECK(noise.gamma == std::vector<double>{13.89e3, 31.25e3, 83.33e3});
}

TEST_CASE("comments, blank lines and explicit initial states") {
    const auto cfg = parse_scenario_text(
        "# a three-site run\n"
        "\n"
        "L = 3  # sites\n"
        "initial = [1, 2, 0]\n"
        "n_max = 3\n");
    REQUIRE(cfg.initial.has_value());
    CHECK(*cfg.initial == FockConfig{1, 2, 0});
    CHECK(cfg.total_particles() == 3);
}

TEST_CASE("parse errors name the key and the line") {
    using Catch::Matchers::Contains;
    CHECK_THROWS_WITH(parse_scenario_text("L = 0\n"), Contains("L"));
    CHECK_THROWS_WITH(parse_scenario_text("L = 3\nbogus_key = 1\n"),
                      Contains("line 2") && Contains("bogus_key"));
    CHECK_THROWS_WITH(parse_scenario_text("L = abc\n"), Contains("line 1") && Contains("L"));
    CHECK_THROWS_WITH(parse_scenario_text("drive = integer\n"), Contains("L"));
    CHECK_THROWS_WITH(parse_scenario_text("L = 3\nkappa_hz = [1, 2]\n"), Contains("kappa_hz"));
    CHECK_THROWS_WITH(parse_scenario_text("L = 3\nkappa_hz = 5\n"), Contains("kappa_hz"));
    CHECK_THROWS_WITH(parse_scenario_text("L = 3\nopen_system = maybe\n"),
                      Contains("open_system"));
    CHECK_THROWS_WITH(parse_scenario_text("L = 3\nn_max = 3\ninitial = [4, 0, 0]\n"),
                      Contains("initial"));
    CHECK_THROWS_WITH(parse_scenario_text("L = 3\ndt_periods = 0\n"), Contains("dt_periods"));
    CHECK_THROWS_AS(parse_scenario("/nonexistent/path.scn"), ScenarioParseError);
}

TEST_CASE("drive accepts a bare frequency ratio") {
    const auto cfg = parse_scenario_text("L = 2\ndrive = 0.75\n");
    CHECK(cfg.drive.kind == Drive::Kind::Ratio);
    CHECK(cfg.lattice_params().drive_omega == Approx(0.75 * cfg.lattice_params().U));
}

TEST_CASE("serialized configs round-trip to identical values") {
    ScenarioConfig cfg;
    cfg.L = 3;
    cfg.n_max = 3;
    cfg.U_over_J0 = 40.0;
    cfg.J0_hz = 2.3e9;
    cfg.omega_hz = 4.5e9;
    cfg.drive = {Drive::Kind::Ratio, 1.0 / 3.0};
    cfg.open_system = true;
    cfg.kappa_hz = {11.9e3, 24.39e3, 33.33e3};
    cfg.gamma_hz = {13.89e3, 31.25e3, 83.33e3};
    cfg.initial = FockConfig{1, 1, 1};
    cfg.t_final_periods = 17.25;
    cfg.dt_periods = 1.0 / 768.0;  // not representable in decimal
    cfg.output_stride = 12;
    cfg.m_max = 2;

    const auto round_tripped = parse_scenario_text(serialize_scenario(cfg));
    CHECK(round_tripped == cfg);

    ScenarioConfig defaults;
    defaults.L = 2;
    CHECK(parse_scenario_text(serialize_scenario(defaults)) == defaults);
}

TEST_CASE("the shipped scenario files parse and stay self-consistent") {
    for (const char* name : {"fig2_integer.scn", "fig2_fractional.scn", "fig4_fractional_L4.scn"}) {
        const auto cfg = parse_scenario(std::string(FRACRES_SCENARIO_DIR) + "/" + name);
        CHECK(cfg.open_system);
        CHECK(cfg.U_over_J0 == 40.0);
        CHECK(cfg.noise_params().any_nonzero());
        CHECK(cfg.lattice_params().validate().empty());
        const auto round_tripped = parse_scenario_text(serialize_scenario(cfg));
        CHECK(round_tripped == cfg);
    }
}
