#ifndef FRACRES_RUN_SCENARIO_HPP
#define FRACRES_RUN_SCENARIO_HPP

#include <future>
#include <map>
#include <string>
#include <vector>

#include "fracres/csv.hpp"
#include "fracres/evolution.hpp"
#include "fracres/observables.hpp"
#include "fracres/scenario.hpp"

namespace fracres {

struct RunSummary {
    bool open_system = false;
    double final_S = 0.0;
    double final_trace_defect = 0.0;
    double max_parity_defect = 0.0;
    // time of the highest recorded P3 sample (the slow fractional transfer)
    double peak_p3_t_over_T = -1.0;
    // spacing of the first two recorded P1 maxima (the fast integer cycle)
    double p1_period_t_over_T = -1.0;
};

struct SimulationResult {
    TimeSeries series;
    RunSummary summary;
};

namespace detail {

struct ScenarioContext {
    BasisMap basis;
    LatticeParams params;
    NoiseParams noise;
    Schedule schedule;
    StateVector psi0;
    SparseOperator number_op, parity_op;
    std::vector<StateVector> named;  // psi0..psi5 for L = 3, psi0 alone otherwise

    explicit ScenarioContext(const ScenarioConfig& cfg)
        : basis(BasisMap::enumerate(cfg.L, cfg.resolved_n_max())),
          params(cfg.lattice_params()),
          noise(cfg.noise_params()),
          schedule(cfg.schedule()),
          psi0(unit_config_state(basis, cfg.initial_config())) {
        auto [n, p] = symmetry_operators(basis);
        number_op = std::move(n);
        parity_op = std::move(p);
        const bool full_set = cfg.L == 3 && cfg.resolved_n_max() >= 3;
        for (int i = 0; i < (full_set ? 6 : 1); ++i) named.push_back(named_state(i, basis));
    }

    std::vector<std::string> series_columns() const {
        std::vector<std::string> cols{"t_over_T"};
        for (std::size_t i = 0; i < named.size(); ++i) cols.push_back("P" + std::to_string(i));
        cols.insert(cols.end(), {"S", "trace", "N_exp", "parity_exp"});
        for (std::size_t i = 0; i < basis.size(); ++i)
            cols.push_back("cfg_" + config_label(basis.config(i), basis.local_cutoff()));
        return cols;
    }

    template <class State>
    std::vector<double> sample_row(double tau, const State& state, double trace) const {
        std::vector<double> row;
        row.reserve(5 + named.size() + basis.size());
        row.push_back(tau);
        for (const auto& target : named) row.push_back(population(state, target));
        row.push_back(linear_entropy(state));
        row.push_back(trace);
        const auto [nexp, pexp] = symmetry_expectations(state, number_op, parity_op);
        row.push_back(nexp);
        row.push_back(pexp);
        for (double p : config_populations(state)) row.push_back(p);
        return row;
    }
};

inline void finish_summary(const TimeSeries& ts, RunSummary& summary) {
    const std::size_t trace_idx = ts.column_index("trace");
    const std::size_t parity_idx = ts.column_index("parity_exp");
    summary.final_trace_defect = std::abs(ts.rows.back()[trace_idx] - 1.0);
    summary.final_S = ts.rows.back()[ts.column_index("S")];
    for (const auto& row : ts.rows)
        summary.max_parity_defect =
            std::max(summary.max_parity_defect, std::abs(row[parity_idx] - 1.0));

    auto has = [&](const char* c) {
        for (const auto& name : ts.columns)
            if (name == c) return true;
        return false;
    };
    if (has("P3")) {
        const auto p3 = ts.column("P3");
        std::size_t best = 0;
        for (std::size_t i = 0; i < p3.size(); ++i)
            if (p3[i] > p3[best]) best = i;
        summary.peak_p3_t_over_T = ts.rows[best][0];
    }
    if (has("P1")) {
        // cycle length of the P1 envelope: spacing of the first two peaks
        // that dominate their 0.6-period neighborhood (the drive rides a
        // fast wiggle at twice the interaction frequency on top of the
        // slow hopping cycle, so bare local maxima are too fine-grained)
        const auto p1 = ts.column("P1");
        double peak_height = 0;
        for (double v : p1) peak_height = std::max(peak_height, v);
        std::vector<double> peaks_t;
        for (std::size_t i = 0; i < p1.size() && peaks_t.size() < 2; ++i) {
            if (p1[i] < 0.5 * peak_height) continue;
            bool dominant = true;
            for (std::size_t j = i; j-- > 0 && ts.rows[i][0] - ts.rows[j][0] <= 0.6;)
                dominant = dominant && p1[i] > p1[j];
            for (std::size_t j = i + 1; j < p1.size() && ts.rows[j][0] - ts.rows[i][0] <= 0.6; ++j)
                dominant = dominant && p1[i] >= p1[j];
            if (dominant && (peaks_t.empty() || ts.rows[i][0] - peaks_t.back() > 0.6))
                peaks_t.push_back(ts.rows[i][0]);
        }
        if (peaks_t.size() == 2) summary.p1_period_t_over_T = peaks_t[1] - peaks_t[0];
    }
}

}  // namespace detail

/// Run one scenario (closed or open per its open_system flag) and collect
/// the recorded samples. num_threads caps the integrator workers; 0 picks
/// the FRACRES_THREADS budget.
inline SimulationResult run_simulation(const ScenarioConfig& cfg, int num_threads = 0) {
    cfg.validate();
    const detail::ScenarioContext ctx(cfg);
    SimulationResult result;
    result.summary.open_system = cfg.open_system;
    result.series.columns = ctx.series_columns();

    EvolveOptions options;
    options.num_threads = num_threads;
    if (cfg.open_system) {
        evolve_open(ctx.basis, ctx.params, ctx.noise, ctx.schedule,
                    DensityMatrix::from_pure(ctx.psi0),
                    [&](long long, double tau, const DensityMatrix& rho) {
                        result.series.rows.push_back(
                            ctx.sample_row(tau, rho, rho.trace_real()));
                    },
                    options);
    } else {
        evolve_closed(ctx.basis, ctx.params, ctx.schedule, ctx.psi0,
                      [&](long long, double tau, const StateVector& psi) {
                          const double n = psi.norm();
                          result.series.rows.push_back(ctx.sample_row(tau, psi, n * n));
                      },
                      options);
    }
    detail::finish_summary(result.series, result.summary);
    return result;
}

struct ComparisonResult {
    TimeSeries series;  // t_over_T, P0, P0_D, P1, P1_D, ...
    std::vector<std::pair<std::string, double>> max_deviation;
};

/// Run the closed and open variants of one scenario on the same grid and
/// pair their named-state populations. The two runs are independent and
/// execute concurrently when the thread budget allows.
inline ComparisonResult run_comparison(const ScenarioConfig& cfg) {
    ScenarioConfig closed_cfg = cfg;
    closed_cfg.open_system = false;
    ScenarioConfig open_cfg = cfg;
    open_cfg.open_system = true;

    const int budget = thread_budget();
    SimulationResult closed_run, open_run;
    if (budget >= 2) {
        auto open_future = std::async(std::launch::async, [&] {
            return run_simulation(open_cfg, budget - budget / 2);
        });
        closed_run = run_simulation(closed_cfg, budget / 2);
        open_run = open_future.get();
    } else {
        closed_run = run_simulation(closed_cfg, 1);
        open_run = run_simulation(open_cfg, 1);
    }

    ComparisonResult out;
    out.series.columns = {"t_over_T"};
    std::vector<std::string> pop_cols;
    for (const auto& name : closed_run.series.columns)
        if (name.size() == 2 && name[0] == 'P' && name[1] >= '0' && name[1] <= '5')
            pop_cols.push_back(name);
    for (const auto& name : pop_cols) {
        out.series.columns.push_back(name);
        out.series.columns.push_back(name + "_D");
    }

    const std::size_t nrows = closed_run.series.rows.size();
    if (open_run.series.rows.size() != nrows)
        throw std::runtime_error("run_comparison: sample grids differ");
    out.series.rows.reserve(nrows);
    std::vector<double> dev(pop_cols.size(), 0.0);
    for (std::size_t r = 0; r < nrows; ++r) {
        std::vector<double> row{closed_run.series.rows[r][0]};
        for (std::size_t c = 0; c < pop_cols.size(); ++c) {
            const std::size_t idx = closed_run.series.column_index(pop_cols[c]);
            const double pc = closed_run.series.rows[r][idx];
            const double po = open_run.series.rows[r][idx];
            row.push_back(pc);
            row.push_back(po);
            dev[c] = std::max(dev[c], std::abs(pc - po));
        }
        out.series.rows.push_back(std::move(row));
    }
    for (std::size_t c = 0; c < pop_cols.size(); ++c)
        out.max_deviation.emplace_back(pop_cols[c], dev[c]);
    return out;
}

}  // namespace fracres

#endif
