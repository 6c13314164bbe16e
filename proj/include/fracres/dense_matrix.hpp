#ifndef FRACRES_DENSE_MATRIX_HPP
#define FRACRES_DENSE_MATRIX_HPP

#include <complex>
#include <cstddef>
#include <stdexcept>
#include <vector>

#include "fracres/fock_basis.hpp"

namespace fracres {

/*
 * Column-major dense complex matrix. This is the workhorse storage for
 * density matrices and the superoperator oracle; kernels that care about
 * layout (the Lindblad right-hand side) work on raw columns.
 */
class DenseMatrix {
public:
    DenseMatrix() = default;
    DenseMatrix(std::size_t rows, std::size_t cols)
        : rows_(rows), cols_(cols), data_(rows * cols, cplx{0.0, 0.0}) {}

    static DenseMatrix identity(std::size_t n) {
        DenseMatrix m(n, n);
        for (std::size_t i = 0; i < n; ++i) m(i, i) = 1.0;
        return m;
    }

    std::size_t rows() const { return rows_; }
    std::size_t cols() const { return cols_; }

    cplx& operator()(std::size_t r, std::size_t c) { return data_[c * rows_ + r]; }
    const cplx& operator()(std::size_t r, std::size_t c) const { return data_[c * rows_ + r]; }

    cplx* col(std::size_t c) { return data_.data() + c * rows_; }
    const cplx* col(std::size_t c) const { return data_.data() + c * rows_; }

    cplx* data() { return data_.data(); }
    const cplx* data() const { return data_.data(); }
    std::size_t size() const { return data_.size(); }

    void set_zero() { std::fill(data_.begin(), data_.end(), cplx{0.0, 0.0}); }

    cplx trace() const {
        cplx s{0.0, 0.0};
        for (std::size_t i = 0; i < rows_ && i < cols_; ++i) s += (*this)(i, i);
        return s;
    }

    /// max-entry norm of M - M^dagger (square matrices)
    double hermiticity_defect() const {
        double m = 0;
        for (std::size_t c = 0; c < cols_; ++c)
            for (std::size_t r = 0; r <= c; ++r)
                m = std::max(m, std::abs((*this)(r, c) - std::conj((*this)(c, r))));
        return m;
    }

    double max_abs() const {
        double m = 0;
        for (const auto& v : data_) m = std::max(m, std::abs(v));
        return m;
    }

    /// Frobenius inner product tr(A^dagger B) restricted to A = B = *this.
    double frobenius_norm_sq() const {
        double s = 0;
        for (const auto& v : data_) s += std::norm(v);
        return s;
    }

    friend DenseMatrix multiply(const DenseMatrix& a, const DenseMatrix& b) {
        if (a.cols_ != b.rows_) throw std::invalid_argument("DenseMatrix: dimension mismatch");
        DenseMatrix out(a.rows_, b.cols_);
        for (std::size_t c = 0; c < b.cols_; ++c) {
            cplx* oc = out.col(c);
            for (std::size_t k = 0; k < a.cols_; ++k) {
                const cplx bkc = b(k, c);
                if (bkc == cplx{0.0, 0.0}) continue;
                const cplx* ak = a.col(k);
                for (std::size_t r = 0; r < a.rows_; ++r) oc[r] += ak[r] * bkc;
            }
        }
        return out;
    }

    void add_scaled(const DenseMatrix& other, cplx alpha) {
        if (other.rows_ != rows_ || other.cols_ != cols_)
            throw std::invalid_argument("DenseMatrix: dimension mismatch");
        for (std::size_t i = 0; i < data_.size(); ++i) data_[i] += alpha * other.data_[i];
    }

    void scale(cplx alpha) {
        for (auto& v : data_) v *= alpha;
    }

private:
    std::size_t rows_ = 0, cols_ = 0;
    std::vector<cplx> data_;
};

/// Density matrix: dense square matrix aligned with a basis.
struct DensityMatrix {
    DenseMatrix elements;
    BasisKey basis;

    std::size_t dim() const { return elements.rows(); }

    static DensityMatrix from_pure(const StateVector& psi) {
        DensityMatrix rho;
        rho.basis = psi.basis;
        const std::size_t n = psi.amplitudes.size();
        rho.elements = DenseMatrix(n, n);
        for (std::size_t c = 0; c < n; ++c) {
            const cplx pc = std::conj(psi.amplitudes[c]);
            cplx* colp = rho.elements.col(c);
            for (std::size_t r = 0; r < n; ++r) colp[r] = psi.amplitudes[r] * pc;
        }
        return rho;
    }

    double trace_real() const { return elements.trace().real(); }

    /// tr(rho^2); cheap because rho is Hermitian.
    double purity() const { return elements.frobenius_norm_sq(); }
};

}  // namespace fracres

#endif
