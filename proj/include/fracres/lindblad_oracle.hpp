#ifndef FRACRES_LINDBLAD_ORACLE_HPP
#define FRACRES_LINDBLAD_ORACLE_HPP

#include <cmath>
#include <stdexcept>
#include <vector>

#include "fracres/dense_matrix.hpp"
#include "fracres/evolution.hpp"
#include "fracres/fock_basis.hpp"
#include "fracres/lattice_model.hpp"
#include "fracres/sparse_operator.hpp"

namespace fracres {

/// exp(A) by scaling-and-squaring around a Taylor core. A is scaled until
/// its max-column-sum norm is below 1/2, the series is summed to machine
/// convergence, and the result squared back up.
inline DenseMatrix matrix_exponential(const DenseMatrix& a) {
    if (a.rows() != a.cols()) throw std::invalid_argument("matrix_exponential: not square");
    const std::size_t n = a.rows();

    double norm1 = 0;
    for (std::size_t c = 0; c < n; ++c) {
        double s = 0;
        for (std::size_t r = 0; r < n; ++r) s += std::abs(a(r, c));
        norm1 = std::max(norm1, s);
    }
    int squarings = 0;
    double scale = 1.0;
    while (norm1 * scale > 0.5 && squarings < 64) {
        scale *= 0.5;
        ++squarings;
    }

    DenseMatrix b = a;
    b.scale(scale);

    DenseMatrix result = DenseMatrix::identity(n);
    DenseMatrix term = DenseMatrix::identity(n);
    for (int k = 1; k <= 64; ++k) {
        term = multiply(term, b);
        term.scale(1.0 / k);
        result.add_scaled(term, 1.0);
        if (term.max_abs() <= 1e-18 * std::max(1.0, result.max_abs())) break;
    }
    for (int s = 0; s < squarings; ++s) result = multiply(result, result);
    return result;
}

namespace detail {

inline void add_kron(DenseMatrix& dst, cplx alpha, const DenseMatrix& a, const DenseMatrix& b) {
    // dst += alpha * kron(a, b); dims: (na*nb) square
    const std::size_t na = a.rows(), nb = b.rows();
    for (std::size_t ac = 0; ac < na; ++ac)
        for (std::size_t ar = 0; ar < na; ++ar) {
            const cplx av = alpha * a(ar, ac);
            if (av == cplx{0.0, 0.0}) continue;
            for (std::size_t bc = 0; bc < nb; ++bc)
                for (std::size_t br = 0; br < nb; ++br) {
                    const cplx bv = b(br, bc);
                    if (bv == cplx{0.0, 0.0}) continue;
                    dst(ar * nb + br, ac * nb + bc) += av * bv;
                }
        }
}

inline DenseMatrix to_dense(const SparseOperator& op) {
    DenseMatrix m(op.rows(), op.cols());
    for (std::size_t r = 0; r < op.rows(); ++r)
        for (std::size_t k = op.row_ptr()[r]; k < op.row_ptr()[r + 1]; ++k)
            m(r, op.col_idx()[k]) += op.values()[k];
    return m;
}

inline DenseMatrix transpose(const DenseMatrix& m) {
    DenseMatrix out(m.cols(), m.rows());
    for (std::size_t c = 0; c < m.cols(); ++c)
        for (std::size_t r = 0; r < m.rows(); ++r) out(c, r) = m(r, c);
    return out;
}

inline DenseMatrix conjugate(const DenseMatrix& m) {
    DenseMatrix out(m.rows(), m.cols());
    for (std::size_t c = 0; c < m.cols(); ++c)
        for (std::size_t r = 0; r < m.rows(); ++r) out(r, c) = std::conj(m(r, c));
    return out;
}

inline DenseMatrix adjoint(const DenseMatrix& m) { return conjugate(transpose(m)); }

/// Column-major vectorization: the generator of vec(d rho/dt) built from
/// collapse operators and a Hamiltonian piece H via
/// vec(A rho B) = kron(B^T, A) vec(rho).
inline DenseMatrix lindblad_generator(const DenseMatrix& h,
                                      const std::vector<DenseMatrix>& collapse) {
    const std::size_t n = h.rows();
    DenseMatrix gen(n * n, n * n);
    const DenseMatrix eye = DenseMatrix::identity(n);
    add_kron(gen, cplx{0.0, -1.0}, eye, h);            // -i H rho
    add_kron(gen, cplx{0.0, 1.0}, transpose(h), eye);  // +i rho H
    for (const auto& c : collapse) {
        const DenseMatrix cdc = multiply(adjoint(c), c);
        add_kron(gen, cplx{1.0, 0.0}, conjugate(c), c);          // C rho C^dag
        add_kron(gen, cplx{-0.5, 0.0}, eye, cdc);                // -1/2 C^dag C rho
        add_kron(gen, cplx{-0.5, 0.0}, transpose(cdc), eye);     // -1/2 rho C^dag C
    }
    return gen;
}

}  // namespace detail

/*
 * Independent reference propagator for small systems: within each step the
 * Hamiltonian is frozen at the midpoint time, the full Lindblad generator
 * is built densely over vec(rho) and exponentiated, and the resulting map
 * applied. Converges to the exact solution as dt -> 0 and shares no code
 * path with the RK4 engine beyond operator assembly inputs.
 */
inline DensityMatrix oracle_propagate(const BasisMap& basis, const LatticeParams& params,
                                      const NoiseParams& noise, const Schedule& schedule,
                                      const DensityMatrix& rho0,
                                      const OpenObserver& observer = {}) {
    params.validate();
    if (basis.size() > 64)
        throw std::invalid_argument("oracle_propagate: basis dimension above 64");
    if (!(rho0.basis == basis.key()))
        throw std::invalid_argument("oracle_propagate: state/basis mismatch");
    if (schedule.t_final_periods == 0.0) return rho0;  // zero-time propagation
    schedule.validate();

    const std::size_t n = basis.size();
    const DenseMatrix h0 = detail::to_dense(build_H0(params, basis));
    const DenseMatrix hop = basis.sites() >= 2
                                ? detail::to_dense(build_hopping(basis))
                                : DenseMatrix(n, n);

    std::vector<DenseMatrix> collapse;
    for (const auto& op : all_collapse_operators(basis, noise))
        if (op.nnz() != 0) collapse.push_back(detail::to_dense(op));

    const double T = params.drive_period();
    const double dt = schedule.dt_periods * T;
    const long long steps = schedule.steps();

    DensityMatrix state = rho0;
    std::vector<cplx> scratch(n * n);

    const bool constant_h = params.static_drive || params.J0 == 0.0;
    DenseMatrix cached_map;
    if (constant_h) {
        DenseMatrix h = h0;
        h.add_scaled(hop, cplx{-params.J0, 0.0});
        DenseMatrix gen = detail::lindblad_generator(h, collapse);
        gen.scale(dt);
        cached_map = matrix_exponential(gen);
    }

    for (long long step = 0; step < steps; ++step) {
        if (observer && step % schedule.output_stride == 0)
            observer(step, step * schedule.dt_periods, state);

        const DenseMatrix* map = &cached_map;
        DenseMatrix step_map;
        if (!constant_h) {
            const double tau_mid = (step + 0.5) * schedule.dt_periods;
            DenseMatrix h = h0;
            h.add_scaled(hop, cplx{-params.drive_coefficient_periods(tau_mid), 0.0});
            DenseMatrix gen = detail::lindblad_generator(h, collapse);
            gen.scale(dt);
            step_map = matrix_exponential(gen);
            map = &step_map;
        }

        // vec(rho) is the raw column-major buffer
        const cplx* x = state.elements.data();
        for (std::size_t r = 0; r < n * n; ++r) {
            cplx acc{0.0, 0.0};
            const std::size_t nn = n * n;
            for (std::size_t c = 0; c < nn; ++c) acc += (*map)(r, c) * x[c];
            scratch[r] = acc;
        }
        std::copy(scratch.begin(), scratch.end(), state.elements.data());
    }
    if (observer) observer(steps, steps * schedule.dt_periods, state);
    return state;
}

}  // namespace fracres

#endif
