#include <catch2/catch.hpp>

#include <cmath>
#include <vector>

#include "fracres/diagnostics.hpp"
#include "fracres/evolution.hpp"
#include "fracres/lindblad_oracle.hpp"
#include "fracres/observables.hpp"

using namespace fracres;

namespace {

LatticeParams dimensionless(int L, int n_max, double drive_ratio = 1.0) {
    LatticeParams p;
    p.L = L;
    p.n_max = n_max;
    p.U = 1.0;
    p.J0 = 0.025;
    p.drive_omega = drive_ratio * p.U;
    return p;
}

}  // namespace

TEST_CASE("rk4_step reproduces the classical tableau on a scalar") {
    const auto rhs = [](double, double y) { return -1.0 * y; };
    const double dt = 0.1;
    const double stepped = rk4_step(rhs, 0.0, 1.0, dt);

    // one step equals the degree-4 Taylor polynomial of exp(-dt) exactly
    const double h = -dt;
    const double poly = 1 + h + h * h / 2 + h * h * h / 6 + h * h * h * h / 24;
    CHECK(stepped == Approx(poly).epsilon(1e-15));
    CHECK(std::abs(stepped - std::exp(-dt)) < std::pow(dt, 5) / 120 * 1.5);

    // zero derivative leaves the state alone
    const auto zero_rhs = [](double, double y) { return 0.0 * y; };
    CHECK(rk4_step(zero_rhs, 0.0, 0.7, 0.5) == 0.7);

    const auto bad_rhs = [](double, double) { return std::nan(""); };
    CHECK_THROWS_AS(rk4_step(bad_rhs, 0.0, 1.0, 0.1), NumericalError);
    CHECK_THROWS_AS(rk4_step(rhs, 0.0, 1.0, 0.0), std::invalid_argument);
}

TEST_CASE("closed run: diagonal Hamiltonian leaves the initial config put") {
    const auto basis = BasisMap::enumerate(3, 3);
    auto params = dimensionless(3, 3);
    params.J0 = 0.0;
    const auto psi0 = named_state(0, basis);

    Schedule schedule{4.0, 1.0 / 64.0, 16};
    double min_p0 = 1.0;
    evolve_closed(basis, params, schedule, psi0, [&](long long, double, const StateVector& psi) {
        min_p0 = std::min(min_p0, population(psi, psi0));
    });
    CHECK(min_p0 == Approx(1.0).margin(1e-12));
}

TEST_CASE("closed run: two-site single-particle Rabi oscillation") {
    const auto basis = BasisMap::enumerate(2, 1);
    auto params = dimensionless(2, 1);
    params.J0 = 0.05;
    params.static_drive = true;  // constant hopping instead of the cosine

    const auto psi0 = unit_config_state(basis, {1, 0});
    Schedule schedule{20.0, 1.0 / 256.0, 8};

    double worst = 0.0;
    evolve_closed(basis, params, schedule, psi0,
                  [&](long long, double tau, const StateVector& psi) {
                      const double t = tau * params.drive_period();
                      const double expected = std::pow(std::cos(params.J0 * t), 2);
                      worst = std::max(worst, std::abs(population(psi, psi0) - expected));
                  });
    CHECK(worst < 1e-8);
}

TEST_CASE("closed run conserves the total particle number") {
    const auto basis = BasisMap::enumerate(3, 3);
    const auto params = dimensionless(3, 3);
    const auto [n_op, p_op] = symmetry_operators(basis);
    const auto psi0 = named_state(0, basis);

    Schedule schedule{4.0, 1.0 / 256.0, 32};
    double worst_n = 0.0, worst_parity = 0.0;
    const auto final_state = evolve_closed(
        basis, params, schedule, psi0, [&](long long, double, const StateVector& psi) {
            const auto [nexp, pexp] = symmetry_expectations(psi, n_op, p_op);
            worst_n = std::max(worst_n, std::abs(nexp - 3.0));
            worst_parity = std::max(worst_parity, std::abs(pexp - 1.0));
        });
    CHECK(worst_n < 1e-8);
    CHECK(worst_parity < 1e-8);
    CHECK(std::abs(final_state.norm() - 1.0) < 1e-9);
}

TEST_CASE("closed run aborts when the step size cannot hold the norm") {
    const auto basis = BasisMap::enumerate(2, 2);
    auto params = dimensionless(2, 2);
    params.J0 = 5.0;  // J0 dt >> 1: RK4 far outside its stability region
    const auto psi0 = unit_config_state(basis, {1, 1});
    Schedule schedule{8.0, 0.5, 1};
    CHECK_THROWS_AS(evolve_closed(basis, params, schedule, psi0), NumericalError);
}

TEST_CASE("open run with zero rates tracks the closed run") {
    const auto basis = BasisMap::enumerate(2, 2);
    const auto params = dimensionless(2, 2);
    const auto noise = NoiseParams::none(2);
    const auto psi0 = unit_config_state(basis, {1, 1});

    Schedule schedule{2.0, 1.0 / 256.0, 16};
    std::vector<std::vector<double>> closed_pops;
    evolve_closed(basis, params, schedule, psi0, [&](long long, double, const StateVector& psi) {
        closed_pops.push_back(config_populations(psi));
    });

    std::size_t sample = 0;
    double worst = 0.0;
    evolve_open(basis, params, noise, schedule, DensityMatrix::from_pure(psi0),
                [&](long long, double, const DensityMatrix& rho) {
                    const auto pops = config_populations(rho);
                    REQUIRE(sample < closed_pops.size());
                    for (std::size_t i = 0; i < pops.size(); ++i)
                        worst = std::max(worst, std::abs(pops[i] - closed_pops[sample][i]));
                    ++sample;
                });
    CHECK(sample == closed_pops.size());
    CHECK(worst < 1e-8);
}

TEST_CASE("open run: single-site amplitude damping against the exact law") {
    const auto basis = BasisMap::enumerate(1, 1);
    auto params = dimensionless(1, 1);
    params.J0 = 0.0;
    NoiseParams noise{{0.08}, {0.0}};

    const auto one = unit_config_state(basis, {1});
    Schedule schedule{3.0, 1.0 / 256.0, 16};

    double worst = 0.0;
    evolve_open(basis, params, noise, schedule, DensityMatrix::from_pure(one),
                [&](long long, double tau, const DensityMatrix& rho) {
                    const double t = tau * params.drive_period();
                    const double expected = std::exp(-noise.kappa[0] * t);
                    worst = std::max(worst, std::abs(population(rho, one) - expected));
                });
    CHECK(worst < 1e-10);
}

TEST_CASE("open run: pure dephasing kills coherence, not population") {
    const auto basis = BasisMap::enumerate(1, 1);
    auto params = dimensionless(1, 1);
    params.J0 = 0.0;
    NoiseParams noise{{0.0}, {0.1}};

    const auto plus = superposition_state(basis, {{{0}, 1.0}, {{1}, 1.0}});
    Schedule schedule{3.0, 1.0 / 256.0, 16};

    double worst_coherence = 0.0, worst_population = 0.0;
    evolve_open(basis, params, noise, schedule, DensityMatrix::from_pure(plus),
                [&](long long, double tau, const DensityMatrix& rho) {
                    const double t = tau * params.drive_period();
                    const double expected = 0.5 * std::exp(-0.5 * noise.gamma[0] * t);
                    worst_coherence = std::max(
                        worst_coherence, std::abs(std::abs(rho.elements(0, 1)) - expected));
                    worst_population =
                        std::max(worst_population, std::abs(rho.elements(1, 1).real() - 0.5));
                });
    CHECK(worst_coherence < 2e-9);
    CHECK(worst_population < 1e-12);
}

TEST_CASE("open run keeps CPTP structure on a short driven noisy chain") {
    const auto basis = BasisMap::enumerate(2, 2);
    const auto params = dimensionless(2, 2, 0.5);
    NoiseParams noise{{0.004, 0.007}, {0.003, 0.005}};
    const auto psi0 = unit_config_state(basis, {1, 1});

    Schedule schedule{4.0, 1.0 / 256.0, 64};
    double worst_trace = 0.0, worst_herm = 0.0, worst_eig = 0.0;
    evolve_open(basis, params, noise, schedule, DensityMatrix::from_pure(psi0),
                [&](long long, double, const DensityMatrix& rho) {
                    const auto d = cptp_diagnostics(rho);
                    worst_trace = std::max(worst_trace, d.trace_defect);
                    worst_herm = std::max(worst_herm, d.hermiticity_defect);
                    worst_eig = std::min(worst_eig, d.min_eigenvalue);
                });
    CHECK(worst_trace < 1e-10);
    CHECK(worst_herm < 1e-13);
    CHECK(worst_eig > -1e-10);
}

TEST_CASE("site-uniform noise keeps the state reflection-covariant") {
    // Decay moves weight onto single configurations whose own parity
    // expectation vanishes, so <P> drifts below 1 in proportion to the lost
    // population. What survives exactly is P rho P = rho.
    const auto basis = BasisMap::enumerate(3, 3);
    const auto params = dimensionless(3, 3, 0.5);
    NoiseParams noise{{0.003, 0.005, 0.008}, {0.002, 0.004, 0.009}};

    std::vector<std::size_t> perm(basis.size());
    for (std::size_t i = 0; i < basis.size(); ++i)
        perm[i] = basis.index_of(parity_reflect(basis.config(i)));

    Schedule schedule{4.0, 1.0 / 256.0, 64};
    double worst_covariance = 0.0;
    double final_parity = 1.0, final_trace = 1.0, final_n3 = 1.0;
    const auto fixed_n = BasisMap::enumerate(3, 3, Sector::fixed_n(3));
    const auto [n_op, p_op] = symmetry_operators(basis);
    evolve_open(basis, params, noise, schedule,
                DensityMatrix::from_pure(named_state(0, basis)),
                [&](long long, double, const DensityMatrix& rho) {
                    for (std::size_t c = 0; c < basis.size(); ++c)
                        for (std::size_t r = 0; r < basis.size(); ++r)
                            worst_covariance =
                                std::max(worst_covariance,
                                         std::abs(rho.elements(r, c) -
                                                  rho.elements(perm[r], perm[c])));
                    final_parity = symmetry_expectations(rho, n_op, p_op).second;
                    final_trace = rho.trace_real();
                    const auto cfgp = config_populations(rho);
                    final_n3 = 0.0;
                    for (std::size_t i = 0; i < fixed_n.size(); ++i)
                        final_n3 += cfgp[basis.index_of(fixed_n.config(i))];
                });
    CHECK(worst_covariance < 1e-12);
    // the parity deficit tracks the decayed (U(1)-broken) population
    const double decayed = final_trace - final_n3;
    CHECK(decayed > 1e-3);
    CHECK(std::abs(final_parity - 1.0) <= 1.5 * decayed);
    CHECK(std::abs(final_parity - 1.0) >= 0.25 * decayed);
}

TEST_CASE("open run rejects a non-positive initial matrix") {
    const auto basis = BasisMap::enumerate(1, 1);
    auto params = dimensionless(1, 1);
    params.J0 = 0.0;

    DensityMatrix rho;
    rho.basis = basis.key();
    rho.elements = DenseMatrix(2, 2);
    rho.elements(0, 0) = 1.5;
    rho.elements(1, 1) = -0.5;  // trace 1, Hermitian, but not a state
    Schedule schedule{1.0, 1.0 / 16.0, 1};
    CHECK_THROWS_AS(evolve_open(basis, params, NoiseParams::none(1), schedule, rho),
                    NumericalError);
}

TEST_CASE("oracle: zero-time propagation is the identity") {
    const auto basis = BasisMap::enumerate(2, 1);
    const auto params = dimensionless(2, 1);
    const auto rho0 = DensityMatrix::from_pure(unit_config_state(basis, {1, 0}));
    const auto out =
        oracle_propagate(basis, params, NoiseParams::none(1), Schedule{0.0, 1.0, 1}, rho0);
    for (std::size_t c = 0; c < 4; ++c)
        for (std::size_t r = 0; r < 4; ++r)
            CHECK(out.elements(r, c) == rho0.elements(r, c));
}

TEST_CASE("oracle: rate-free diagonal Hamiltonian only rotates phases") {
    const auto basis = BasisMap::enumerate(2, 2);
    auto params = dimensionless(2, 2);
    params.J0 = 0.0;
    const auto plus = superposition_state(basis, {{{2, 0}, 1.0}, {{0, 2}, 1.0}});
    const auto rho0 = DensityMatrix::from_pure(plus);

    const auto out = oracle_propagate(basis, params, NoiseParams::none(2),
                                      Schedule{1.0, 1.0 / 64.0, 1}, rho0);
    for (std::size_t i = 0; i < basis.size(); ++i)
        CHECK(out.elements(i, i).real() == Approx(rho0.elements(i, i).real()).margin(1e-12));
    CHECK(std::abs(out.elements(basis.index_of({2, 0}), basis.index_of({0, 2}))) ==
          Approx(0.5).margin(1e-10));
}

TEST_CASE("oracle and RK4 integrator agree on a driven open chain") {
    const auto basis = BasisMap::enumerate(2, 2);
    const auto params = dimensionless(2, 2);
    NoiseParams noise{{0.004, 0.007}, {0.003, 0.005}};
    const auto rho0 = DensityMatrix::from_pure(unit_config_state(basis, {1, 1}));

    Schedule schedule{1.0, 1.0 / 512.0, 512};
    const auto via_rk4 = evolve_open(basis, params, noise, schedule, rho0);
    const auto via_oracle = oracle_propagate(basis, params, noise, schedule, rho0);

    double worst = 0.0;
    for (std::size_t i = 0; i < basis.size(); ++i)
        worst = std::max(worst, std::abs(via_rk4.elements(i, i).real() -
                                         via_oracle.elements(i, i).real()));
    CHECK(worst < 1e-6);
}

TEST_CASE("halving dt cuts the global error sixteenfold") {
    const auto basis = BasisMap::enumerate(1, 1);
    auto params = dimensionless(1, 1);
    params.J0 = 0.0;
    NoiseParams noise{{0.1}, {0.0}};
    const auto one = unit_config_state(basis, {1});
    const auto rho0 = DensityMatrix::from_pure(one);

    auto global_error = [&](double dt_periods) {
        Schedule schedule{2.0, dt_periods, 1 << 20};
        const auto rho = evolve_open(basis, params, noise, schedule, rho0);
        const double t = 2.0 * params.drive_period();
        return std::abs(rho.elements(1, 1).real() - std::exp(-noise.kappa[0] * t));
    };

    const double coarse = global_error(1.0 / 64.0);
    const double fine = global_error(1.0 / 128.0);
    REQUIRE(coarse > 1e-13);  // stay above the roundoff floor
    const double ratio = coarse / fine;
    CHECK(ratio > 12.0);
    CHECK(ratio < 20.0);
}

TEST_CASE("closed observables are stable under step halving") {
    const auto basis = BasisMap::enumerate(3, 3);
    const auto params = dimensionless(3, 3, 0.5);
    const auto psi0 = named_state(0, basis);

    auto p0_curve = [&](double dt_periods, int stride) {
        std::vector<double> out;
        Schedule schedule{8.0, dt_periods, stride};
        evolve_closed(basis, params, schedule, psi0,
                      [&](long long, double, const StateVector& psi) {
                          out.push_back(population(psi, psi0));
                      });
        return out;
    };

    const auto coarse = p0_curve(1.0 / 256.0, 32);
    const auto fine = p0_curve(1.0 / 512.0, 64);
    REQUIRE(coarse.size() == fine.size());
    double worst = 0.0;
    for (std::size_t i = 0; i < coarse.size(); ++i)
        worst = std::max(worst, std::abs(coarse[i] - fine[i]));
    CHECK(worst < 1e-6);
}
