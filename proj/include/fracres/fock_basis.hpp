#ifndef FRACRES_FOCK_BASIS_HPP
#define FRACRES_FOCK_BASIS_HPP

#include <algorithm>
#include <cmath>
#include <complex>
#include <cstdint>
#include <optional>
#include <stdexcept>
#include <string>
#include <vector>

namespace fracres {

using cplx = std::complex<double>;

// Occupation-number vector (n_1, ..., n_L). Entries are per-site boson counts.
using FockConfig = std::vector<int>;

/// Lattice reflection: (n_1, ..., n_L) -> (n_L, ..., n_1). Involution.
inline FockConfig parity_reflect(const FockConfig& c) {
    return FockConfig(c.rbegin(), c.rend());
}

/// Compact label "120" for a configuration; sites joined with '_' once
/// occupations need more than one digit.
inline std::string config_label(const FockConfig& c, int n_max) {
    std::string s;
    const bool wide = n_max > 9;
    for (std::size_t j = 0; j < c.size(); ++j) {
        if (wide && j > 0) s += '_';
        s += std::to_string(c[j]);
    }
    return s;
}

/// D_{N,L} = (N+L-1)! / (N! (L-1)!), evaluated in exact integer arithmetic.
/// Throws std::overflow_error if the value does not fit in 64 bits.
inline std::uint64_t dimension_count(int N, int L) {
    if (N < 0 || L < 1) throw std::invalid_argument("dimension_count: need N >= 0, L >= 1");
    std::uint64_t r = 1;
    // binom(N+L-1, L-1) built up one factor at a time; every partial result
    // r*(N+i)/i is itself a binomial coefficient, so the division is exact.
    for (std::uint64_t i = 1; i + 1 <= static_cast<std::uint64_t>(L); ++i) {
        std::uint64_t num;
        if (__builtin_mul_overflow(r, static_cast<std::uint64_t>(N) + i, &num))
            throw std::overflow_error("dimension_count: 64-bit overflow");
        r = num / i;
    }
    return r;
}

/// (n_max+1)^L with overflow checking.
inline std::uint64_t full_dimension(int L, int n_max) {
    if (L < 1 || n_max < 0) throw std::invalid_argument("full_dimension: need L >= 1, n_max >= 0");
    std::uint64_t r = 1;
    const std::uint64_t base = static_cast<std::uint64_t>(n_max) + 1;
    for (int j = 0; j < L; ++j) {
        if (__builtin_mul_overflow(r, base, &r))
            throw std::overflow_error("full_dimension: 64-bit overflow");
    }
    return r;
}

struct Sector {
    enum class Kind { Full, FixedN, FixedNPositiveParity };
    Kind kind = Kind::Full;
    int N = -1;  // total particle number; meaningful unless Full

    static Sector full() { return {Kind::Full, -1}; }
    static Sector fixed_n(int N) { return {Kind::FixedN, N}; }
    static Sector fixed_n_positive_parity(int N) { return {Kind::FixedNPositiveParity, N}; }

    bool operator==(const Sector&) const = default;
};

/// Identity of the space a state or operator lives in; used to reject
/// mixing objects built over different bases.
struct BasisKey {
    int L = 0;
    int n_max = 0;
    Sector sector = Sector::full();
    bool operator==(const BasisKey&) const = default;
};

/*
 * Ordered list of Fock configurations plus the inverse index lookup.
 * Configurations are enumerated in lexicographic order, so output is
 * reproducible run to run. Immutable after construction.
 */
class BasisMap {
public:
    static BasisMap enumerate(int L, int n_max, Sector sector = Sector::full()) {
        if (L < 1) throw std::invalid_argument("BasisMap: L must be >= 1");
        if (n_max < 0) throw std::invalid_argument("BasisMap: n_max must be >= 0");
        BasisMap b;
        b.L_ = L;
        b.n_max_ = n_max;
        b.sector_ = sector;
        switch (sector.kind) {
            case Sector::Kind::Full: {
                const std::uint64_t dim = full_dimension(L, n_max);
                if (dim > (1u << 26))
                    throw std::invalid_argument("BasisMap: full basis too large to enumerate");
                b.configs_.reserve(dim);
                FockConfig c(L, 0);
                for (std::uint64_t i = 0; i < dim; ++i) {
                    b.configs_.push_back(c);
                    // odometer increment on the last site keeps lex order
                    for (int j = L - 1; j >= 0; --j) {
                        if (++c[j] <= n_max) break;
                        c[j] = 0;
                    }
                }
                break;
            }
            case Sector::Kind::FixedN:
            case Sector::Kind::FixedNPositiveParity: {
                const int N = sector.N;
                if (N < 0) throw std::invalid_argument("BasisMap: sector N must be >= 0");
                if (static_cast<long long>(N) > static_cast<long long>(L) * n_max)
                    throw std::invalid_argument("BasisMap: N exceeds L*n_max, sector is empty");
                FockConfig c(L, 0);
                b.emit_fixed_n(c, 0, N);
                break;
            }
        }
        return b;
    }

    int sites() const { return L_; }
    int local_cutoff() const { return n_max_; }
    const Sector& sector() const { return sector_; }
    std::size_t size() const { return configs_.size(); }
    const FockConfig& config(std::size_t i) const { return configs_[i]; }
    const std::vector<FockConfig>& configs() const { return configs_; }
    BasisKey key() const { return {L_, n_max_, sector_}; }

    std::optional<std::size_t> find(const FockConfig& c) const {
        if (static_cast<int>(c.size()) != L_) return std::nullopt;
        for (int n : c)
            if (n < 0 || n > n_max_) return std::nullopt;
        if (sector_.kind == Sector::Kind::Full) {
            std::size_t idx = 0;
            for (int j = 0; j < L_; ++j) idx = idx * (n_max_ + 1) + c[j];
            return idx;
        }
        auto it = std::lower_bound(configs_.begin(), configs_.end(), c);
        if (it == configs_.end() || *it != c) return std::nullopt;
        return static_cast<std::size_t>(it - configs_.begin());
    }

    std::size_t index_of(const FockConfig& c) const {
        auto idx = find(c);
        if (!idx)
            throw std::invalid_argument("BasisMap: configuration " +
                                        config_label(c, n_max_) + " not in basis");
        return *idx;
    }

private:
    void emit_fixed_n(FockConfig& c, int site, int remaining) {
        if (site == L_ - 1) {
            if (remaining <= n_max_) {
                c[site] = remaining;
                if (sector_.kind != Sector::Kind::FixedNPositiveParity ||
                    !std::lexicographical_compare(c.rbegin(), c.rend(), c.begin(), c.end())) {
                    // parity sector keeps one representative per reflection
                    // orbit: the config that is lex <= its mirror image
                    configs_.push_back(c);
                }
                c[site] = 0;
            }
            return;
        }
        for (int n = 0; n <= std::min(n_max_, remaining); ++n) {
            c[site] = n;
            emit_fixed_n(c, site + 1, remaining - n);
        }
        c[site] = 0;
    }

    int L_ = 0;
    int n_max_ = 0;
    Sector sector_;
    std::vector<FockConfig> configs_;
};

/// Complex amplitudes aligned with a BasisMap.
struct StateVector {
    std::vector<std::complex<double>> amplitudes;
    BasisKey basis;

    double norm() const {
        double s = 0;
        for (const auto& a : amplitudes) s += std::norm(a);
        return std::sqrt(s);
    }
};

/// Basis state |c> as a StateVector.
inline StateVector unit_config_state(const BasisMap& basis, const FockConfig& c) {
    StateVector psi;
    psi.basis = basis.key();
    psi.amplitudes.assign(basis.size(), {0.0, 0.0});
    psi.amplitudes[basis.index_of(c)] = 1.0;
    return psi;
}

/// Normalized superposition of basis configurations; throws if any
/// constituent is missing from the basis or the weights vanish.
inline StateVector superposition_state(const BasisMap& basis,
                                       const std::vector<std::pair<FockConfig, double>>& terms) {
    StateVector psi;
    psi.basis = basis.key();
    psi.amplitudes.assign(basis.size(), {0.0, 0.0});
    double norm2 = 0;
    for (const auto& [c, w] : terms) {
        psi.amplitudes[basis.index_of(c)] += w;
        norm2 += w * w;
    }
    if (norm2 <= 0) throw std::invalid_argument("superposition_state: zero state");
    const double inv = 1.0 / std::sqrt(norm2);
    for (auto& a : psi.amplitudes) a *= inv;
    return psi;
}

/// The six positive-parity states of the three-site chain at unit filling.
/// psi0 = |1...1> generalizes to any L; psi1..psi5 are defined for L = 3.
inline StateVector named_state(int which, const BasisMap& basis) {
    if (which == 0)
        return unit_config_state(basis, FockConfig(basis.sites(), 1));
    if (basis.sites() != 3)
        throw std::invalid_argument("named_state: psi1..psi5 are defined for L = 3");
    const double r = 1.0;  // relative weights; normalization handled below
    switch (which) {
        case 1: return superposition_state(basis, {{{1, 2, 0}, r}, {{0, 2, 1}, r}});
        case 2: return superposition_state(basis, {{{1, 0, 2}, r}, {{2, 0, 1}, r}});
        case 3: return superposition_state(basis, {{{2, 1, 0}, r}, {{0, 1, 2}, r}});
        case 4: return unit_config_state(basis, {0, 3, 0});
        case 5: return superposition_state(basis, {{{3, 0, 0}, r}, {{0, 0, 3}, r}});
        default: throw std::invalid_argument("named_state: index must be 0..5");
    }
}

}  // namespace fracres

#endif
