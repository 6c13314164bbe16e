// fracres: command-line front end for the driven Bose-Hubbard simulator.
//
// Subcommands:
//   simulate    run one scenario file, write a CSV time series
//   compare     run the closed and open variants on the same grid
//   resonances  list the drive frequencies that activate hops
//   dims        print basis dimensions for a lattice size and cutoff
//   plot        render CSV columns as an SVG line plot
//
// Exit codes: 0 success, 1 usage or scenario errors, 2 numerical aborts.

#include <CLI11.hpp>
#include <json.hpp>

#include <cstdio>
#include <filesystem>
#include <iostream>
#include <sstream>
#include <string>
#include <vector>

#include "fracres/csv.hpp"
#include "fracres/resonance.hpp"
#include "fracres/run_scenario.hpp"
#include "fracres/scenario.hpp"
#include "fracres/svg_plot.hpp"

namespace {

constexpr const char* kScenarioHelp = R"(Scenario files are UTF-8 text, one 'key = value' per line, '#' comments,
lists as [a, b, c]. Keys and defaults:
  L                  lattice sites (required)
  n_max              per-site cutoff          default: total particle count
  U_over_J0          interaction/hopping      default: 40
  J0_hz              bare hopping, Hz         default: 11.5e3
  omega_hz           site frequency, Hz       default: 0 (metadata only; the
                     dynamics are integrated with this term rotated away)
  drive              integer | fractional | <Omega/U ratio>   default: integer
  open_system        true | false             default: false
  kappa_hz           decay rates 1/s, n_max entries     default: all zero
  gamma_hz           dephasing rates 1/s, n_max entries default: all zero
  initial            unit_filling | occupation list     default: unit_filling
  t_final_periods    run length in drive periods        default: 50
  dt_periods         step in drive periods              default: 0.00390625
  output_stride      steps between recorded samples     default: 1
  m_max              resonance order bound              default: 3
The environment variable FRACRES_THREADS caps worker threads.)";

std::string default_out(const std::string& input, const std::string& suffix) {
    return std::filesystem::path(input).stem().string() + suffix;
}

void print_summary(const fracres::ScenarioConfig& cfg, const fracres::RunSummary& s) {
    std::printf("mode: %s\n", cfg.open_system ? "open (decay + dephasing)" : "closed");
    std::printf("final S = %.6e\n", s.final_S);
    std::printf("final trace defect = %.3e\n", s.final_trace_defect);
    std::printf("max parity defect = %.3e\n", s.max_parity_defect);
    if (cfg.drive.omega_over_u() < 1.0 && s.peak_p3_t_over_T >= 0)
        std::printf("peak P3 at t/T = %.6g\n", s.peak_p3_t_over_T);
    if (cfg.drive.omega_over_u() >= 1.0 && s.p1_period_t_over_T >= 0)
        std::printf("P1 period = %.6g T\n", s.p1_period_t_over_T);
}

void warn_params(const fracres::ScenarioConfig& cfg) {
    for (const auto& w : cfg.lattice_params().validate())
        std::fprintf(stderr, "warning: %s\n", w.c_str());
}

int cmd_simulate(const std::string& file, std::string out) {
    const auto cfg = fracres::parse_scenario(file);
    warn_params(cfg);
    if (out.empty()) out = default_out(file, ".csv");
    const auto result = fracres::run_simulation(cfg);
    fracres::write_csv_file(result.series, out);
    std::printf("wrote %s (%zu samples, %zu columns)\n", out.c_str(), result.series.rows.size(),
                result.series.columns.size());
    print_summary(cfg, result.summary);
    return 0;
}

int cmd_compare(const std::string& file, std::string out) {
    const auto cfg = fracres::parse_scenario(file);
    warn_params(cfg);
    if (out.empty()) out = default_out(file, "_compare.csv");
    const auto result = fracres::run_comparison(cfg);
    fracres::write_csv_file(result.series, out);
    std::printf("wrote %s (%zu samples)\n", out.c_str(), result.series.rows.size());
    for (const auto& [name, dev] : result.max_deviation)
        std::printf("max |%s - %s_D| = %.6e\n", name.c_str(), name.c_str(), dev);
    return 0;
}

const char* kind_name(fracres::ResonanceClass::Kind k) {
    switch (k) {
        case fracres::ResonanceClass::Kind::Integer: return "integer";
        case fracres::ResonanceClass::Kind::Fractional: return "fractional";
        default: return "off-resonant";
    }
}

int cmd_resonances(const std::string& file, bool as_json, int m_max_override) {
    const auto cfg = fracres::parse_scenario(file);
    const auto params = cfg.lattice_params();
    const int m_max = m_max_override > 0 ? m_max_override : cfg.m_max;
    const auto report = fracres::resonance_frequencies(cfg.initial_config(), m_max, params);
    const auto matches = fracres::classify_drive(params.drive_omega, report);

    if (as_json) {
        nlohmann::json j;
        j["initial"] = cfg.initial_config();
        j["m_max"] = m_max;
        j["U_rad_per_s"] = params.U;
        j["drive_omega_over_U"] = cfg.drive.omega_over_u();
        j["free_transitions"] = report.free_transitions;
        j["entries"] = nlohmann::json::array();
        for (const auto& e : report.entries)
            j["entries"].push_back({{"omega_over_U", e.omega / params.U},
                                    {"omega_rad_per_s", e.omega},
                                    {"kind", kind_name(e.cls.kind)},
                                    {"order", e.cls.order},
                                    {"multiplicity", e.multiplicity}});
        j["drive_matches"] = nlohmann::json::array();
        for (const auto& e : matches)
            j["drive_matches"].push_back({{"kind", kind_name(e.cls.kind)}, {"order", e.cls.order}});
        std::printf("%s\n", j.dump(2).c_str());
        return 0;
    }

    std::printf("initial configuration: %s\n",
                fracres::config_label(cfg.initial_config(), cfg.resolved_n_max()).c_str());
    std::printf("drive: Omega/U = %g\n", cfg.drive.omega_over_u());
    std::printf("%-12s %-12s %-6s %s\n", "Omega/U", "kind", "order", "multiplicity");
    for (const auto& e : report.entries)
        std::printf("%-12g %-12s %-6d %d\n", e.omega / params.U, kind_name(e.cls.kind),
                    e.cls.order, e.multiplicity);
    std::printf("free (zero-cost) transitions: %d\n", report.free_transitions);
    if (matches.empty()) {
        std::printf("drive matches: none (off-resonant)\n");
    } else {
        std::printf("drive matches:");
        for (const auto& e : matches)
            std::printf(" %s order %d;", kind_name(e.cls.kind), e.cls.order);
        std::printf("\n");
    }
    return 0;
}

int cmd_dims(int L, int n_max) {
    const auto full = fracres::full_dimension(L, n_max);
    std::printf("L = %d sites, n_max = %d\n", L, n_max);
    std::printf("full dimension: %llu\n", static_cast<unsigned long long>(full));
    std::printf("%-4s %s\n", "N", "sector size");
    unsigned long long total = 0;
    for (int N = 0; N <= L * n_max; ++N) {
        const auto size = fracres::BasisMap::enumerate(L, n_max, fracres::Sector::fixed_n(N)).size();
        total += size;
        std::printf("%-4d %zu\n", N, size);
    }
    std::printf("sum over sectors: %llu\n", total);
    return 0;
}

int cmd_plot(const std::string& csv, const std::string& cols, std::string out) {
    std::vector<std::string> columns;
    std::stringstream ss(cols);
    std::string item;
    while (std::getline(ss, item, ',')) {
        if (!item.empty()) columns.push_back(item);
    }
    const auto ts = fracres::read_csv_file(csv);
    if (out.empty()) out = default_out(csv, ".svg");
    fracres::write_line_plot_svg(ts, columns, out);
    std::printf("wrote %s\n", out.c_str());
    return 0;
}

}  // namespace

int main(int argc, char** argv) {
    CLI::App app{"fracres: driven Bose-Hubbard chains, closed and open dynamics"};
    app.require_subcommand(1);
    app.footer(kScenarioHelp);

    std::string scenario_file, out_path, csv_file, cols;
    bool as_json = false;
    int m_max_override = 0, dims_l = 0, dims_nmax = 0;

    auto* simulate = app.add_subcommand("simulate", "run a scenario file, write a CSV series");
    simulate->add_option("file", scenario_file, "scenario file")->required();
    simulate->add_option("--out", out_path, "output CSV path (default: <stem>.csv)");

    auto* compare =
        app.add_subcommand("compare", "run closed and open variants on the same grid");
    compare->add_option("file", scenario_file, "scenario file")->required();
    compare->add_option("--out", out_path, "output CSV path (default: <stem>_compare.csv)");

    auto* resonances =
        app.add_subcommand("resonances", "list activating drive frequencies for the initial state");
    resonances->add_option("file", scenario_file, "scenario file")->required();
    resonances->add_flag("--json", as_json, "machine-readable output");
    resonances->add_option("--mmax", m_max_override, "override the resonance order bound");

    auto* dims = app.add_subcommand("dims", "print basis dimensions");
    dims->add_option("L", dims_l, "lattice sites")->required();
    dims->add_option("n_max", dims_nmax, "per-site cutoff")->required();

    auto* plot = app.add_subcommand("plot", "render CSV columns as an SVG line plot");
    plot->add_option("csv", csv_file, "input CSV file")->required();
    plot->add_option("--cols", cols, "comma-separated column names")->required();
    plot->add_option("--out", out_path, "output SVG path (default: <stem>.svg)");

    try {
        app.parse(argc, argv);
    } catch (const CLI::ParseError& e) {
        const int code = app.exit(e);
        return code == 0 ? 0 : 1;
    }

    try {
        if (simulate->parsed()) return cmd_simulate(scenario_file, out_path);
        if (compare->parsed()) return cmd_compare(scenario_file, out_path);
        if (resonances->parsed()) return cmd_resonances(scenario_file, as_json, m_max_override);
        if (dims->parsed()) return cmd_dims(dims_l, dims_nmax);
        if (plot->parsed()) return cmd_plot(csv_file, cols, out_path);
    } catch (const fracres::NumericalError& e) {
        std::fprintf(stderr, "numerical abort: %s\n", e.what());
        return 2;
    } catch (const std::exception& e) {
        std::fprintf(stderr, "error: %s\n", e.what());
        return 1;
    }
    return 1;
}
