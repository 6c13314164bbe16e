#ifndef FRACRES_SPARSE_OPERATOR_HPP
#define FRACRES_SPARSE_OPERATOR_HPP

#include <algorithm>
#include <complex>
#include <cstdint>
#include <stdexcept>
#include <vector>

#include "fracres/fock_basis.hpp"

namespace fracres {

// Entries with magnitude below this are dropped at assembly.
inline constexpr double kSparseDropTol = 1e-15;

/*
 * Complex sparse matrix in compressed-sparse-row form, tied to the basis it
 * was built over. Assembly goes through a triplet list; duplicate entries are
 * summed and near-zeros dropped. Immutable once built.
 */
class SparseOperator {
public:
    SparseOperator() = default;

    SparseOperator(std::size_t rows, std::size_t cols, BasisKey basis = {})
        : rows_(rows), cols_(cols), row_ptr_(rows + 1, 0), basis_(basis) {}

    struct Triplet {
        std::uint32_t row, col;
        cplx value;
    };

    static SparseOperator from_triplets(std::size_t rows, std::size_t cols,
                                        std::vector<Triplet> t, BasisKey basis = {}) {
        std::sort(t.begin(), t.end(), [](const Triplet& a, const Triplet& b) {
            return a.row != b.row ? a.row < b.row : a.col < b.col;
        });
        SparseOperator m(rows, cols, basis);
        m.col_idx_.reserve(t.size());
        m.values_.reserve(t.size());
        std::size_t i = 0;
        for (std::size_t r = 0; r < rows; ++r) {
            while (i < t.size() && t[i].row == r) {
                cplx v = t[i].value;
                const std::uint32_t c = t[i].col;
                ++i;
                while (i < t.size() && t[i].row == r && t[i].col == c) v += t[i++].value;
                if (std::abs(v) >= kSparseDropTol) {
                    m.col_idx_.push_back(c);
                    m.values_.push_back(v);
                }
            }
            m.row_ptr_[r + 1] = m.col_idx_.size();
        }
        return m;
    }

    std::size_t rows() const { return rows_; }
    std::size_t cols() const { return cols_; }
    std::size_t nnz() const { return values_.size(); }
    const BasisKey& basis() const { return basis_; }

    const std::vector<std::size_t>& row_ptr() const { return row_ptr_; }
    const std::vector<std::uint32_t>& col_idx() const { return col_idx_; }
    const std::vector<cplx>& values() const { return values_; }

    cplx coeff(std::size_t r, std::size_t c) const {
        for (std::size_t k = row_ptr_[r]; k < row_ptr_[r + 1]; ++k)
            if (col_idx_[k] == c) return values_[k];
        return {0.0, 0.0};
    }

    /// y = A x
    std::vector<cplx> apply(const std::vector<cplx>& x) const {
        if (x.size() != cols_) throw std::invalid_argument("SparseOperator::apply: size mismatch");
        std::vector<cplx> y(rows_, cplx{0.0, 0.0});
        apply_into(x.data(), y.data());
        return y;
    }

    void apply_into(const cplx* x, cplx* y) const {
        for (std::size_t r = 0; r < rows_; ++r) {
            cplx acc{0.0, 0.0};
            for (std::size_t k = row_ptr_[r]; k < row_ptr_[r + 1]; ++k)
                acc += values_[k] * x[col_idx_[k]];
            y[r] = acc;
        }
    }

    /// y += alpha * A x  (no allocation; used by the integrators)
    void apply_add_into(cplx alpha, const cplx* x, cplx* y) const {
        for (std::size_t r = 0; r < rows_; ++r) {
            cplx acc{0.0, 0.0};
            for (std::size_t k = row_ptr_[r]; k < row_ptr_[r + 1]; ++k)
                acc += values_[k] * x[col_idx_[k]];
            y[r] += alpha * acc;
        }
    }

    StateVector apply(const StateVector& psi) const {
        if (!(psi.basis == basis_))
            throw std::invalid_argument("SparseOperator::apply: basis mismatch");
        StateVector out;
        out.basis = psi.basis;
        out.amplitudes = apply(psi.amplitudes);
        return out;
    }

    /// <psi| A |psi>
    cplx expectation(const StateVector& psi) const {
        const auto y = apply(psi);
        cplx s{0.0, 0.0};
        for (std::size_t i = 0; i < y.amplitudes.size(); ++i)
            s += std::conj(psi.amplitudes[i]) * y.amplitudes[i];
        return s;
    }

    SparseOperator adjoint() const {
        std::vector<Triplet> t;
        t.reserve(nnz());
        for (std::size_t r = 0; r < rows_; ++r)
            for (std::size_t k = row_ptr_[r]; k < row_ptr_[r + 1]; ++k)
                t.push_back({col_idx_[k], static_cast<std::uint32_t>(r), std::conj(values_[k])});
        return from_triplets(cols_, rows_, std::move(t), basis_);
    }

    SparseOperator scaled(cplx alpha) const {
        SparseOperator m = *this;
        for (auto& v : m.values_) v *= alpha;
        return m;
    }

    friend SparseOperator add(const SparseOperator& a, cplx beta, const SparseOperator& b) {
        if (a.rows_ != b.rows_ || a.cols_ != b.cols_)
            throw std::invalid_argument("SparseOperator: dimension mismatch in add");
        std::vector<Triplet> t;
        t.reserve(a.nnz() + b.nnz());
        for (std::size_t r = 0; r < a.rows_; ++r) {
            for (std::size_t k = a.row_ptr_[r]; k < a.row_ptr_[r + 1]; ++k)
                t.push_back({static_cast<std::uint32_t>(r), a.col_idx_[k], a.values_[k]});
            for (std::size_t k = b.row_ptr_[r]; k < b.row_ptr_[r + 1]; ++k)
                t.push_back({static_cast<std::uint32_t>(r), b.col_idx_[k], beta * b.values_[k]});
        }
        return from_triplets(a.rows_, a.cols_, std::move(t), a.basis_);
    }

    /// Gustavson row-by-row product.
    friend SparseOperator multiply(const SparseOperator& a, const SparseOperator& b) {
        if (a.cols_ != b.rows_)
            throw std::invalid_argument("SparseOperator: dimension mismatch in multiply");
        std::vector<Triplet> t;
        std::vector<cplx> acc(b.cols_, cplx{0.0, 0.0});
        std::vector<std::uint32_t> touched;
        for (std::size_t r = 0; r < a.rows_; ++r) {
            touched.clear();
            for (std::size_t ka = a.row_ptr_[r]; ka < a.row_ptr_[r + 1]; ++ka) {
                const cplx va = a.values_[ka];
                const std::uint32_t j = a.col_idx_[ka];
                for (std::size_t kb = b.row_ptr_[j]; kb < b.row_ptr_[j + 1]; ++kb) {
                    const std::uint32_t c = b.col_idx_[kb];
                    if (acc[c] == cplx{0.0, 0.0}) touched.push_back(c);
                    acc[c] += va * b.values_[kb];
                }
            }
            std::sort(touched.begin(), touched.end());
            for (std::uint32_t c : touched) {
                t.push_back({static_cast<std::uint32_t>(r), c, acc[c]});
                acc[c] = {0.0, 0.0};
            }
        }
        return from_triplets(a.rows_, b.cols_, std::move(t), a.basis_);
    }

    double max_abs() const {
        double m = 0;
        for (const auto& v : values_) m = std::max(m, std::abs(v));
        return m;
    }

    /// max-entry norm of A - A^dagger
    double hermiticity_defect() const {
        return add(*this, cplx{-1.0, 0.0}, adjoint()).max_abs();
    }

private:
    std::size_t rows_ = 0, cols_ = 0;
    std::vector<std::size_t> row_ptr_{0};
    std::vector<std::uint32_t> col_idx_;
    std::vector<cplx> values_;
    BasisKey basis_;
};

/// AB - BA with the usual zero-dropping.
inline SparseOperator commutator(const SparseOperator& a, const SparseOperator& b) {
    if (a.rows() != b.rows() || a.cols() != b.cols())
        throw std::invalid_argument("commutator: dimension mismatch");
    return add(multiply(a, b), cplx{-1.0, 0.0}, multiply(b, a));
}

}  // namespace fracres

#endif
