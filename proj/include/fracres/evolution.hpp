#ifndef FRACRES_EVOLUTION_HPP
#define FRACRES_EVOLUTION_HPP

#include <cmath>
#include <complex>
#include <cstdlib>
#include <functional>
#include <stdexcept>
#include <string>
#include <thread>
#include <type_traits>
#include <vector>

#ifdef _OPENMP
#include <omp.h>
#endif

#include "fracres/dense_matrix.hpp"
#include "fracres/diagnostics.hpp"
#include "fracres/fock_basis.hpp"
#include "fracres/lattice_model.hpp"
#include "fracres/sparse_operator.hpp"

namespace fracres {

/// Raised when an integration run violates its structural guarantees
/// (norm/trace drift, loss of positivity, non-finite values).
struct NumericalError : std::runtime_error {
    using std::runtime_error::runtime_error;
};

/// Time grid in units of the drive period T = 2*pi/Omega.
struct Schedule {
    double t_final_periods = 0.0;
    double dt_periods = 1.0 / 256.0;
    int output_stride = 1;

    void validate() const {
        if (!(dt_periods > 0)) throw std::invalid_argument("Schedule: dt must be > 0");
        if (t_final_periods < dt_periods)
            throw std::invalid_argument("Schedule: t_final must be >= dt");
        if (output_stride < 1) throw std::invalid_argument("Schedule: output_stride must be >= 1");
    }

    long long steps() const { return std::llround(t_final_periods / dt_periods); }
};

/// Worker count: FRACRES_THREADS if set, else the hardware concurrency.
inline int thread_budget() {
    static const int cached = [] {
        if (const char* env = std::getenv("FRACRES_THREADS")) {
            const int v = std::atoi(env);
            if (v >= 1) return v;
        }
        const unsigned hc = std::thread::hardware_concurrency();
        return hc ? static_cast<int>(hc) : 1;
    }();
    return cached;
}

struct EvolveOptions {
    bool check_positivity = true;  // eigensolve at recorded samples of open runs
    int num_threads = 0;           // 0 = thread_budget()
};

namespace detail {

template <class F>
inline void parallel_columns(std::size_t n, int threads, F&& f) {
#ifdef _OPENMP
    if (threads > 1 && n >= 256) {
#pragma omp parallel for schedule(static) num_threads(threads)
        for (long long k = 0; k < static_cast<long long>(n); ++k) f(static_cast<std::size_t>(k));
        return;
    }
#else
    (void)threads;
#endif
    for (std::size_t k = 0; k < n; ++k) f(k);
}

inline double state_max_abs(double x) { return std::abs(x); }
inline double state_max_abs(const std::complex<double>& x) { return std::abs(x); }
template <class T>
inline double state_max_abs(const std::vector<T>& v) {
    double m = 0;
    for (const auto& x : v) m = std::max(m, state_max_abs(x));
    return m;
}

inline double scaled_sum(double y, double s, double k) { return y + s * k; }
inline std::complex<double> scaled_sum(const std::complex<double>& y, double s,
                                       const std::complex<double>& k) {
    return y + s * k;
}
template <class T>
inline std::vector<T> scaled_sum(const std::vector<T>& y, double s, const std::vector<T>& k) {
    std::vector<T> out(y.size());
    for (std::size_t i = 0; i < y.size(); ++i) out[i] = scaled_sum(y[i], s, k[i]);
    return out;
}

}  // namespace detail

/// One classical Runge-Kutta step: stages k1..k4 combined with weights
/// 1/6, 1/3, 1/3, 1/6. Works on scalars, complex values and vectors thereof.
template <class State, class Rhs>
State rk4_step(Rhs&& rhs, double t, const State& state, double dt) {
    if (!(dt > 0)) throw std::invalid_argument("rk4_step: dt must be > 0");
    const State k1 = rhs(t, state);
    const State k2 = rhs(t + 0.5 * dt, detail::scaled_sum(state, 0.5 * dt, k1));
    const State k3 = rhs(t + 0.5 * dt, detail::scaled_sum(state, 0.5 * dt, k2));
    const State k4 = rhs(t + dt, detail::scaled_sum(state, dt, k3));
    for (const State* k : {&k1, &k2, &k3, &k4})
        if (!std::isfinite(detail::state_max_abs(*k)))
            throw NumericalError("rk4_step: non-finite stage value");
    State out = detail::scaled_sum(state, dt / 6.0, k1);
    out = detail::scaled_sum(out, dt / 3.0, k2);
    out = detail::scaled_sum(out, dt / 3.0, k3);
    return detail::scaled_sum(out, dt / 6.0, k4);
}

using ClosedObserver = std::function<void(long long step, double t_over_T, const StateVector&)>;
using OpenObserver = std::function<void(long long step, double t_over_T, const DensityMatrix&)>;

/*
 * Closed-system run: fixed-step RK4 on d|psi>/dt = -i H(t) |psi> with
 * H(t) = H0 - J0 cos(Omega t) Hop. As in the open-system engine, the
 * integration happens in the interaction picture of H0, where the only
 * phases the stepper has to carry are at the hopping scale J0; the diagonal
 * part is applied exactly when the lab-frame state is reconstructed at the
 * recorded samples. The norm is never renormalized -- drift is a step-size
 * diagnostic, and drift beyond 1e-3 aborts the run.
 */
inline StateVector evolve_closed(const BasisMap& basis, const LatticeParams& params,
                                 const Schedule& schedule, const StateVector& psi0,
                                 const ClosedObserver& observer = {},
                                 const EvolveOptions& options = {}) {
    schedule.validate();
    params.validate();
    if (!(psi0.basis == basis.key()))
        throw std::invalid_argument("evolve_closed: state/basis mismatch");
    if (std::abs(psi0.norm() - 1.0) > 1e-12)
        throw std::invalid_argument("evolve_closed: initial state is not normalized");

    const std::size_t n = basis.size();
    std::vector<double> energy(n);
    for (std::size_t i = 0; i < n; ++i) energy[i] = config_energy(basis.config(i), params);
    const SparseOperator hop =
        basis.sites() >= 2 ? build_hopping(basis) : SparseOperator(n, n, basis.key());

    const double T = params.drive_period();
    const double dt = schedule.dt_periods * T;
    const long long steps = schedule.steps();

    std::vector<cplx> y = psi0.amplitudes, k(n), ytmp(n), acc(n);

    // d sigma/dt = +iJ(t) Hop~(t) sigma with Hop~(r,c) = v e^{i(E_r - E_c)t}
    auto rhs = [&](double tau, const std::vector<cplx>& in, std::vector<cplx>& out) {
        const double J = params.drive_coefficient_periods(tau);
        const cplx iJ{0.0, J};
        const double t = tau * T;
        const auto& rp = hop.row_ptr();
        const auto& ci = hop.col_idx();
        const auto& va = hop.values();
        for (std::size_t r = 0; r < n; ++r) {
            cplx sum{0.0, 0.0};
            for (std::size_t kk = rp[r]; kk < rp[r + 1]; ++kk) {
                const double arg = (energy[r] - energy[ci[kk]]) * t;
                sum += va[kk] * cplx{std::cos(arg), std::sin(arg)} * in[ci[kk]];
            }
            out[r] = iJ * sum;
        }
    };

    StateVector snapshot;
    snapshot.basis = psi0.basis;
    auto record = [&](long long step) {
        if (!observer) return;
        const double t = step * schedule.dt_periods * T;
        snapshot.amplitudes.resize(n);
        for (std::size_t i = 0; i < n; ++i) {
            const double arg = -energy[i] * t;
            snapshot.amplitudes[i] = y[i] * cplx{std::cos(arg), std::sin(arg)};
        }
        observer(step, step * schedule.dt_periods, snapshot);
    };

    for (long long step = 0; step < steps; ++step) {
        if (step % schedule.output_stride == 0) record(step);
        const double tau = step * schedule.dt_periods;

        rhs(tau, y, k);
        for (std::size_t i = 0; i < n; ++i) {
            acc[i] = y[i] + (dt / 6.0) * k[i];
            ytmp[i] = y[i] + (0.5 * dt) * k[i];
        }
        rhs(tau + 0.5 * schedule.dt_periods, ytmp, k);
        for (std::size_t i = 0; i < n; ++i) {
            acc[i] += (dt / 3.0) * k[i];
            ytmp[i] = y[i] + (0.5 * dt) * k[i];
        }
        rhs(tau + 0.5 * schedule.dt_periods, ytmp, k);
        for (std::size_t i = 0; i < n; ++i) {
            acc[i] += (dt / 3.0) * k[i];
            ytmp[i] = y[i] + dt * k[i];
        }
        rhs(tau + schedule.dt_periods, ytmp, k);
        for (std::size_t i = 0; i < n; ++i) y[i] = acc[i] + (dt / 6.0) * k[i];

        double norm2 = 0;
        for (const auto& a : y) norm2 += std::norm(a);
        if (!(std::abs(std::sqrt(norm2) - 1.0) <= 1e-3))
            throw NumericalError("evolve_closed: norm drift " +
                                 std::to_string(std::sqrt(norm2) - 1.0) + " at step " +
                                 std::to_string(step + 1) + "; reduce dt");
    }
    record(steps);

    StateVector out;
    out.basis = psi0.basis;
    const double t_final = steps * schedule.dt_periods * T;
    out.amplitudes.resize(n);
    for (std::size_t i = 0; i < n; ++i) {
        const double arg = -energy[i] * t_final;
        out.amplitudes[i] = y[i] * cplx{std::cos(arg), std::sin(arg)};
    }
    (void)options;
    return out;
}

namespace detail {

/*
 * Precomputed pieces of the Lindblad right-hand side over the full basis.
 *
 * The master equation is integrated in the interaction picture of H0,
 * sigma(t) = e^{+iH0t} rho(t) e^{-iH0t}: the commutator with the diagonal
 * part disappears from the equation and reappears as phase factors on the
 * hopping and decay matrix elements. Fixed-step RK4 then only has to carry
 * phases at the drive/noise scale instead of the interaction scale, which
 * is what keeps the density-matrix spectrum clean over long runs (on the
 * 625-configuration chain the lab-frame RK4 loses positivity at the 1e-4
 * level where this formulation stays at roundoff). The lab-frame state is
 * reconstructed exactly whenever it is observed.
 *
 * Everything elementwise is folded into one real coefficient matrix W:
 * the dephasing jump term (a rank-L mask; dephasing operators are diagonal
 * and pick up no phases) and the anticommutator of all C^dag C (diagonal
 * for both channels).
 */
struct LindbladWork {
    std::size_t n = 0;
    std::vector<double> W;       // column-major n*n, real
    std::vector<double> energy;  // H0 diagonal
    SparseOperator hop;
    struct Lift {
        std::vector<std::uint32_t> row;   // configuration index after the decay
        std::vector<std::uint32_t> up;    // the same configuration with one more particle
        std::vector<double> amp;          // sqrt(n kappa)
        std::vector<double> freq;         // E(row) - E(up): phase frequency of the element
        std::vector<std::int64_t> pos;    // row -> slot in the lift list, -1 if absent
    };
    std::vector<Lift> decay;  // one per site with any nonzero decay rate

    LindbladWork(const BasisMap& basis, const LatticeParams& params, const NoiseParams& noise)
        : n(basis.size()), W(basis.size() * basis.size()), energy(basis.size()) {
        noise.validate(basis.local_cutoff());
        hop = basis.sites() >= 2 ? build_hopping(basis)
                                 : SparseOperator(n, n, basis.key());

        std::vector<double> kdiag(n, 0.0);
        const int L = basis.sites();
        std::vector<std::vector<double>> dephase_amp(L, std::vector<double>(n, 0.0));
        for (std::size_t i = 0; i < n; ++i) {
            const FockConfig& c = basis.config(i);
            energy[i] = config_energy(c, params);
            for (int j = 0; j < L; ++j) {
                const int occ = c[j];
                if (occ == 0) continue;
                kdiag[i] += occ * noise.kappa[occ - 1] +
                            static_cast<double>(occ) * occ * noise.gamma[occ - 1];
                dephase_amp[j][i] = occ * std::sqrt(noise.gamma[occ - 1]);
            }
        }
        for (std::size_t kcol = 0; kcol < n; ++kcol) {
            double* wc = W.data() + kcol * n;
            for (std::size_t r = 0; r < n; ++r) {
                double mask = 0;
                for (int j = 0; j < L; ++j) mask += dephase_amp[j][r] * dephase_amp[j][kcol];
                wc[r] = mask - 0.5 * (kdiag[r] + kdiag[kcol]);
            }
        }

        for (int j = 0; j < L; ++j) {
            Lift lift;
            lift.pos.assign(n, -1);
            bool any = false;
            for (std::size_t i = 0; i < n; ++i) {
                FockConfig c = basis.config(i);
                if (c[j] >= basis.local_cutoff()) continue;
                const int occ_up = c[j] + 1;
                const double rate = noise.kappa[occ_up - 1];
                if (rate == 0.0) continue;
                c[j] += 1;
                const std::size_t up = basis.index_of(c);
                lift.row.push_back(static_cast<std::uint32_t>(i));
                lift.up.push_back(static_cast<std::uint32_t>(up));
                lift.amp.push_back(std::sqrt(occ_up * rate));
                lift.freq.push_back(energy[i] - energy[up]);
                lift.pos[i] = static_cast<std::int64_t>(lift.row.size()) - 1;
                any = true;
            }
            if (any) decay.push_back(std::move(lift));
        }
    }

    /// Per-stage scratch: the hopping and decay matrix elements dressed with
    /// their interaction-picture phases at one instant.
    struct StagePhases {
        std::vector<cplx> hop_values;              // e^{i(E_r - E_c)t} * v, CSR-aligned
        std::vector<std::vector<cplx>> lift_amps;  // e^{i(E_row - E_up)t} * amp, per site
    };

    void dress(double t, StagePhases& phases) const {
        phases.hop_values.resize(hop.nnz());
        const auto& rp = hop.row_ptr();
        const auto& ci = hop.col_idx();
        const auto& va = hop.values();
        for (std::size_t r = 0; r < n; ++r) {
            for (std::size_t kk = rp[r]; kk < rp[r + 1]; ++kk) {
                const double arg = (energy[r] - energy[ci[kk]]) * t;
                phases.hop_values[kk] = va[kk] * cplx{std::cos(arg), std::sin(arg)};
            }
        }
        phases.lift_amps.resize(decay.size());
        for (std::size_t d = 0; d < decay.size(); ++d) {
            const auto& lift = decay[d];
            auto& out = phases.lift_amps[d];
            out.resize(lift.amp.size());
            for (std::size_t s = 0; s < lift.amp.size(); ++s) {
                const double arg = lift.freq[s] * t;
                out[s] = lift.amp[s] * cplx{std::cos(arg), std::sin(arg)};
            }
        }
    }

    /// out = RHS(sigma) at drive phase tau (in periods) with element phases
    /// evaluated at physical time t. Only the upper triangle is computed;
    /// the lower one is its mirror, so the result is Hermitian by
    /// construction every stage.
    void evaluate(double tau, double t, const LatticeParams& params, const DenseMatrix& sigma,
                  DenseMatrix& out, StagePhases& phases, int threads) const {
        const double J = params.drive_coefficient_periods(tau);
        const cplx iJ{0.0, J};
        const bool with_hop = hop.nnz() != 0 && J != 0.0;
        dress(t, phases);

        auto column = [&](std::size_t kcol, cplx* xcol) {
            const cplx* rc = sigma.col(kcol);
            const double* wc = W.data() + kcol * n;
            for (std::size_t r = 0; r <= kcol; ++r) xcol[r] = wc[r] * rc[r];

            if (with_hop) {
                const auto& rp = hop.row_ptr();
                const auto& ci = hop.col_idx();
                const auto& va = phases.hop_values;
                // +iJ (Hop~ sigma)(r,k) for the upper rows
                for (std::size_t r = 0; r <= kcol; ++r) {
                    cplx acc{0.0, 0.0};
                    for (std::size_t kk = rp[r]; kk < rp[r + 1]; ++kk)
                        acc += va[kk] * rc[ci[kk]];
                    xcol[r] += iJ * acc;
                }
                // -iJ (sigma Hop~)(r,k); Hop~ is Hermitian so column k is the
                // conjugate of row k
                for (std::size_t kk = rp[kcol]; kk < rp[kcol + 1]; ++kk) {
                    const cplx coeff = iJ * std::conj(va[kk]);
                    const cplx* rj = sigma.col(ci[kk]);
                    for (std::size_t r = 0; r <= kcol; ++r) xcol[r] -= coeff * rj[r];
                }
            }

            // decay jump terms sum_j C~ sigma C~^dag, gathered elementwise;
            // lift lists are ascending in row so the upper part is a prefix
            for (std::size_t d = 0; d < decay.size(); ++d) {
                const auto& lift = decay[d];
                if (lift.pos[kcol] < 0) continue;
                const auto& amps = phases.lift_amps[d];
                const cplx wk = std::conj(amps[static_cast<std::size_t>(lift.pos[kcol])]);
                const cplx* rup = sigma.col(lift.up[static_cast<std::size_t>(lift.pos[kcol])]);
                const std::size_t m = lift.row.size();
                for (std::size_t s = 0; s < m && lift.row[s] <= kcol; ++s)
                    xcol[lift.row[s]] += (amps[s] * wk) * rup[lift.up[s]];
            }

            cplx* oc = out.col(kcol);
            for (std::size_t r = 0; r < kcol; ++r) oc[r] = xcol[r];
            oc[kcol] = cplx{xcol[kcol].real(), 0.0};
        };

        // second pass: each column fills its lower part from the already
        // written upper triangle; only reads cross thread boundaries
        auto mirror = [&](std::size_t kcol) {
            cplx* oc = out.col(kcol);
            for (std::size_t r = kcol + 1; r < n; ++r) oc[r] = std::conj(out(kcol, r));
        };

#ifdef _OPENMP
        if (threads > 1 && n >= 256) {
#pragma omp parallel num_threads(threads)
            {
                std::vector<cplx> xcol(n);
#pragma omp for schedule(static, 4)
                for (long long k = 0; k < static_cast<long long>(n); ++k)
                    column(static_cast<std::size_t>(k), xcol.data());
#pragma omp for schedule(static, 4)
                for (long long k = 0; k < static_cast<long long>(n); ++k)
                    mirror(static_cast<std::size_t>(k));
            }
            return;
        }
#endif
        std::vector<cplx> xcol(n);
        for (std::size_t k = 0; k < n; ++k) column(k, xcol.data());
        for (std::size_t k = 0; k < n; ++k) mirror(k);
    }

    /// Undo the frame rotation: rho(t) = e^{-iH0t} sigma e^{+iH0t}.
    DensityMatrix to_lab_frame(const DenseMatrix& sigma, const BasisKey& key, double t) const {
        std::vector<cplx> u(n);
        for (std::size_t i = 0; i < n; ++i) {
            const double arg = -energy[i] * t;
            u[i] = cplx{std::cos(arg), std::sin(arg)};
        }
        DensityMatrix rho;
        rho.basis = key;
        rho.elements = DenseMatrix(n, n);
        for (std::size_t c = 0; c < n; ++c) {
            const cplx uc = std::conj(u[c]);
            const cplx* sc = sigma.col(c);
            cplx* oc = rho.elements.col(c);
            for (std::size_t r = 0; r < n; ++r) oc[r] = u[r] * sc[r] * uc;
        }
        return rho;
    }
};

/// One fused pass per stage: update the Runge-Kutta accumulator and prepare
/// the next stage input while the stage derivative is still cache-hot.
inline void rk4_combine(DenseMatrix& acc, double c_acc, const DenseMatrix& k, DenseMatrix& ytmp,
                        const DenseMatrix& y, double c_tmp, bool first_stage, int threads) {
    const std::size_t rows = y.rows();
    parallel_columns(y.cols(), threads, [&](std::size_t kcol) {
        cplx* pa = acc.col(kcol);
        cplx* pt = ytmp.col(kcol);
        const cplx* pk = k.col(kcol);
        const cplx* py = y.col(kcol);
        if (first_stage)
            for (std::size_t r = 0; r < rows; ++r) {
                pa[r] = py[r] + c_acc * pk[r];
                pt[r] = py[r] + c_tmp * pk[r];
            }
        else
            for (std::size_t r = 0; r < rows; ++r) {
                pa[r] += c_acc * pk[r];
                pt[r] = py[r] + c_tmp * pk[r];
            }
    });
}

inline void rk4_finish(DenseMatrix& y, const DenseMatrix& acc, double c, const DenseMatrix& k,
                       int threads) {
    const std::size_t rows = y.rows();
    parallel_columns(y.cols(), threads, [&](std::size_t kcol) {
        cplx* py = y.col(kcol);
        const cplx* pa = acc.col(kcol);
        const cplx* pk = k.col(kcol);
        for (std::size_t r = 0; r < rows; ++r) py[r] = pa[r] + c * pk[r];
    });
}

}  // namespace detail

/*
 * Open-system run: fixed-step RK4 on the Lindblad master equation
 *   d rho/dt = -i [H(t), rho] + sum_{j,l} ( C rho C^dag - 1/2 {C^dag C, rho} )
 * with per-site multilevel decay and dephasing channels. The right-hand
 * side is Hermitized every stage; the trace is monitored every step and
 * positivity at recorded samples.
 */
inline DensityMatrix evolve_open(const BasisMap& basis, const LatticeParams& params,
                                 const NoiseParams& noise, const Schedule& schedule,
                                 const DensityMatrix& rho0, const OpenObserver& observer = {},
                                 const EvolveOptions& options = {}) {
    schedule.validate();
    params.validate();
    if (basis.sector().kind != Sector::Kind::Full)
        throw std::invalid_argument("evolve_open: requires the full basis (decay breaks U(1))");
    if (!(rho0.basis == basis.key()))
        throw std::invalid_argument("evolve_open: state/basis mismatch");
    if (rho0.elements.hermiticity_defect() > 1e-12)
        throw std::invalid_argument("evolve_open: initial state is not Hermitian");
    if (std::abs(rho0.trace_real() - 1.0) > 1e-10)
        throw std::invalid_argument("evolve_open: initial state is not trace-1");

    const int threads = options.num_threads > 0 ? options.num_threads : thread_budget();
    const std::size_t n = basis.size();
    const detail::LindbladWork work(basis, params, noise);

    const double T = params.drive_period();
    const double dt = schedule.dt_periods * T;
    const long long steps = schedule.steps();

    // sigma is the interaction-picture state; frames coincide at t = 0
    DenseMatrix sigma = rho0.elements;
    DenseMatrix k(n, n), ytmp(n, n), acc(n, n);
    detail::LindbladWork::StagePhases phases;

    auto record = [&](long long step) {
        const DensityMatrix rho =
            work.to_lab_frame(sigma, rho0.basis, step * schedule.dt_periods * T);
        const double trace_defect = std::abs(rho.trace_real() - 1.0);
        if (!(trace_defect <= 1e-6))
            throw NumericalError("evolve_open: trace drift " + std::to_string(trace_defect) +
                                 " at step " + std::to_string(step));
        if (options.check_positivity) {
            const double lam = min_eigenvalue(rho.elements);
            if (!(lam >= -1e-6))
                throw NumericalError("evolve_open: negative eigenvalue " + std::to_string(lam) +
                                     " at step " + std::to_string(step));
        }
        if (observer) observer(step, step * schedule.dt_periods, rho);
        return rho;
    };

    for (long long step = 0; step < steps; ++step) {
        if (step % schedule.output_stride == 0) record(step);
        const double tau = step * schedule.dt_periods;
        const double mid = tau + 0.5 * schedule.dt_periods;
        const double end = tau + schedule.dt_periods;

        work.evaluate(tau, tau * T, params, sigma, k, phases, threads);
        detail::rk4_combine(acc, dt / 6.0, k, ytmp, sigma, 0.5 * dt, true, threads);
        work.evaluate(mid, mid * T, params, ytmp, k, phases, threads);
        detail::rk4_combine(acc, dt / 3.0, k, ytmp, sigma, 0.5 * dt, false, threads);
        work.evaluate(mid, mid * T, params, ytmp, k, phases, threads);
        detail::rk4_combine(acc, dt / 3.0, k, ytmp, sigma, dt, false, threads);
        work.evaluate(end, end * T, params, ytmp, k, phases, threads);
        detail::rk4_finish(sigma, acc, dt / 6.0, k, threads);

        cplx trace{0.0, 0.0};
        for (std::size_t i = 0; i < n; ++i) trace += sigma(i, i);
        if (!(std::abs(trace.real() - 1.0) <= 1e-6))
            throw NumericalError("evolve_open: trace drift " +
                                 std::to_string(trace.real() - 1.0) + " at step " +
                                 std::to_string(step + 1) + "; reduce dt");
    }
    return record(steps);
}

}  // namespace fracres

#endif
