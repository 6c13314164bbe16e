#ifndef FRACRES_OBSERVABLES_HPP
#define FRACRES_OBSERVABLES_HPP

#include <cmath>
#include <map>
#include <stdexcept>
#include <string>
#include <vector>

#include "fracres/dense_matrix.hpp"
#include "fracres/fock_basis.hpp"
#include "fracres/sparse_operator.hpp"

namespace fracres {

namespace detail {
inline double clamp_population(double p, const char* what) {
    if (p < -1e-9)
        throw std::runtime_error(std::string(what) + ": population " + std::to_string(p) +
                                 " below tolerance, integration is suspect");
    return p < 0.0 ? 0.0 : p;
}
}  // namespace detail

/// |<target|psi>|^2
inline double population(const StateVector& psi, const StateVector& target) {
    if (!(psi.basis == target.basis))
        throw std::invalid_argument("population: basis mismatch");
    cplx overlap{0.0, 0.0};
    for (std::size_t i = 0; i < psi.amplitudes.size(); ++i)
        overlap += std::conj(target.amplitudes[i]) * psi.amplitudes[i];
    return std::norm(overlap);
}

/// <target| rho |target>, clamped to [0, 1] against harmless roundoff.
inline double population(const DensityMatrix& rho, const StateVector& target) {
    if (!(rho.basis == target.basis))
        throw std::invalid_argument("population: basis mismatch");
    const std::size_t n = rho.dim();
    cplx val{0.0, 0.0};
    for (std::size_t c = 0; c < n; ++c) {
        if (target.amplitudes[c] == cplx{0.0, 0.0}) continue;
        cplx acc{0.0, 0.0};
        const cplx* colp = rho.elements.col(c);
        for (std::size_t r = 0; r < n; ++r) acc += std::conj(target.amplitudes[r]) * colp[r];
        val += acc * target.amplitudes[c];
    }
    return std::min(1.0, detail::clamp_population(val.real(), "population"));
}

/// Probability of each basis configuration: |c_l|^2 for pure states,
/// diagonal of rho for mixed ones.
inline std::vector<double> config_populations(const StateVector& psi) {
    std::vector<double> p(psi.amplitudes.size());
    for (std::size_t i = 0; i < p.size(); ++i) p[i] = std::norm(psi.amplitudes[i]);
    return p;
}

inline std::vector<double> config_populations(const DensityMatrix& rho) {
    std::vector<double> p(rho.dim());
    for (std::size_t i = 0; i < p.size(); ++i)
        p[i] = detail::clamp_population(rho.elements(i, i).real(), "config_populations");
    return p;
}

/// S(rho) = 1 - tr(rho^2). Zero for pure states.
inline double linear_entropy(const DensityMatrix& rho) {
    return 1.0 - rho.purity();
}

/// Linear entropy of a pure state. The normalized projector |psi><psi| has
/// tr(rho^2) = 1 identically, so this is exactly zero; the overload exists
/// so closed and open runs share an output schema.
inline double linear_entropy(const StateVector&) { return 0.0; }

/// (<N>, <P>) for a pure state.
inline std::pair<double, double> symmetry_expectations(const StateVector& psi,
                                                       const SparseOperator& number_op,
                                                       const SparseOperator& parity_op) {
    return {number_op.expectation(psi).real(), parity_op.expectation(psi).real()};
}

/// (<N>, <P>) = (tr(N rho), tr(P rho)) for a mixed state.
inline std::pair<double, double> symmetry_expectations(const DensityMatrix& rho,
                                                       const SparseOperator& number_op,
                                                       const SparseOperator& parity_op) {
    if (!(rho.basis == number_op.basis()) || !(rho.basis == parity_op.basis()))
        throw std::invalid_argument("symmetry_expectations: basis mismatch");
    auto trace_with = [&](const SparseOperator& op) {
        cplx s{0.0, 0.0};
        for (std::size_t r = 0; r < op.rows(); ++r)
            for (std::size_t k = op.row_ptr()[r]; k < op.row_ptr()[r + 1]; ++k)
                s += op.values()[k] * rho.elements(op.col_idx()[k], r);
        return s.real();
    };
    return {trace_with(number_op), trace_with(parity_op)};
}

/// One recorded instant of a run: time in drive periods plus named values.
struct ObservableSample {
    double t_over_T = 0.0;
    std::map<std::string, double> values;
};

}  // namespace fracres

#endif
