#ifndef FRACRES_LATTICE_MODEL_HPP
#define FRACRES_LATTICE_MODEL_HPP

#include <cmath>
#include <stdexcept>
#include <string>
#include <vector>

#include "fracres/fock_basis.hpp"
#include "fracres/sparse_operator.hpp"

namespace fracres {

/*
 * Model parameters. hbar = 1 throughout: omega, U, J0 and the drive
 * frequency are angular frequencies (rad/s), noise rates are plain rates
 * (1/s). J(t) = J0 cos(Omega t) unless static_drive is set, in which case
 * J(t) = J0 (used for constant-hopping checks).
 */
struct LatticeParams {
    int L = 0;
    int n_max = 0;
    double omega = 0.0;
    double U = 0.0;
    double J0 = 0.0;
    double drive_omega = 0.0;
    bool static_drive = false;

    double drive_period() const { return 2.0 * M_PI / drive_omega; }

    double drive_coefficient(double t) const {
        return static_drive ? J0 : J0 * std::cos(drive_omega * t);
    }

    /// Same drive evaluated at a time given in drive periods; keeps the
    /// cosine argument an exact multiple of 2*pi*tau for grid times.
    double drive_coefficient_periods(double tau) const {
        return static_drive ? J0 : J0 * std::cos(2.0 * M_PI * tau);
    }

    /// Throws on hard violations, returns non-fatal warnings.
    std::vector<std::string> validate() const {
        if (L < 1) throw std::invalid_argument("LatticeParams: L must be >= 1");
        if (n_max < 0) throw std::invalid_argument("LatticeParams: n_max must be >= 0");
        if (!(U > 0)) throw std::invalid_argument("LatticeParams: U must be > 0");
        if (J0 < 0) throw std::invalid_argument("LatticeParams: J0 must be >= 0");
        if (!(drive_omega > 0)) throw std::invalid_argument("LatticeParams: drive frequency must be > 0");
        std::vector<std::string> warnings;
        if (U < 10.0 * J0)
            warnings.push_back("U < 10*J0: outside the strongly interacting regime, "
                               "the resonance picture may not apply");
        return warnings;
    }
};

/// Per-site decay and dephasing rates. kappa[n-1] is the decay rate
/// |n> -> |n-1>, gamma[n-1] the dephasing rate of the |n-1>,|n> pair,
/// for n = 1..n_max.
struct NoiseParams {
    std::vector<double> kappa;
    std::vector<double> gamma;

    static NoiseParams none(int n_max) {
        return {std::vector<double>(n_max, 0.0), std::vector<double>(n_max, 0.0)};
    }

    bool any_nonzero() const {
        for (double k : kappa)
            if (k != 0.0) return true;
        for (double g : gamma)
            if (g != 0.0) return true;
        return false;
    }

    void validate(int n_max) const {
        if (static_cast<int>(kappa.size()) != n_max || static_cast<int>(gamma.size()) != n_max)
            throw std::invalid_argument("NoiseParams: rate lists must have n_max entries");
        for (double k : kappa)
            if (k < 0) throw std::invalid_argument("NoiseParams: negative decay rate");
        for (double g : gamma)
            if (g < 0) throw std::invalid_argument("NoiseParams: negative dephasing rate");
    }
};

enum class CollapseKind { Decay, Dephase };

namespace detail {
inline void require_full_sector(const BasisMap& basis, const char* what) {
    if (basis.sector().kind != Sector::Kind::Full)
        throw std::invalid_argument(std::string(what) +
                                    ": requires the full (particle-non-conserving) basis");
}
inline void require_site(const BasisMap& basis, int site, const char* what) {
    if (site < 1 || site > basis.sites())
        throw std::invalid_argument(std::string(what) + ": site index out of range");
}
}  // namespace detail

/// a_site with matrix element sqrt(n). Sites are 1-based.
inline SparseOperator ladder_down(const BasisMap& basis, int site) {
    detail::require_full_sector(basis, "ladder_down");
    detail::require_site(basis, site, "ladder_down");
    const int j = site - 1;
    std::vector<SparseOperator::Triplet> t;
    for (std::size_t i = 0; i < basis.size(); ++i) {
        const FockConfig& c = basis.config(i);
        if (c[j] == 0) continue;
        FockConfig d = c;
        d[j] -= 1;
        t.push_back({static_cast<std::uint32_t>(basis.index_of(d)),
                     static_cast<std::uint32_t>(i), std::sqrt(static_cast<double>(c[j]))});
    }
    return SparseOperator::from_triplets(basis.size(), basis.size(), std::move(t), basis.key());
}

/// a^dagger_site; annihilates states already at the local cutoff.
inline SparseOperator ladder_up(const BasisMap& basis, int site) {
    return ladder_down(basis, site).adjoint();
}

/// n_site, diagonal.
inline SparseOperator number_operator(const BasisMap& basis, int site) {
    detail::require_site(basis, site, "number_operator");
    const int j = site - 1;
    std::vector<SparseOperator::Triplet> t;
    for (std::size_t i = 0; i < basis.size(); ++i) {
        const int n = basis.config(i)[j];
        if (n != 0)
            t.push_back({static_cast<std::uint32_t>(i), static_cast<std::uint32_t>(i),
                         static_cast<double>(n)});
    }
    return SparseOperator::from_triplets(basis.size(), basis.size(), std::move(t), basis.key());
}

/// Local energy of one configuration: sum_j (omega n_j + U/2 n_j^2).
/// Accumulated over integer totals so mirror configurations get the exact
/// same floating-point value.
inline double config_energy(const FockConfig& c, const LatticeParams& params) {
    long long ntot = 0, nsq = 0;
    for (int n : c) {
        ntot += n;
        nsq += static_cast<long long>(n) * n;
    }
    return params.omega * static_cast<double>(ntot) + 0.5 * params.U * static_cast<double>(nsq);
}

/// Diagonal part H0 = sum_j (omega n_j + U/2 n_j^2).
inline SparseOperator build_H0(const LatticeParams& params, const BasisMap& basis) {
    std::vector<SparseOperator::Triplet> t;
    for (std::size_t i = 0; i < basis.size(); ++i) {
        const double e = config_energy(basis.config(i), params);
        t.push_back({static_cast<std::uint32_t>(i), static_cast<std::uint32_t>(i), e});
    }
    return SparseOperator::from_triplets(basis.size(), basis.size(), std::move(t), basis.key());
}

/// Nearest-neighbor hopping sum_{j<L} (a^dag_j a_{j+1} + a^dag_{j+1} a_j),
/// open boundary, unit coefficient. The drive strength is applied by
/// hamiltonian_at / the integrators.
inline SparseOperator build_hopping(const BasisMap& basis) {
    if (basis.sites() < 2)
        throw std::invalid_argument("build_hopping: need at least two sites");
    if (basis.sector().kind == Sector::Kind::FixedNPositiveParity)
        throw std::invalid_argument("build_hopping: not defined on a parity-reduced basis");
    const int L = basis.sites();
    const int n_max = basis.local_cutoff();
    std::vector<SparseOperator::Triplet> t;
    FockConfig d;
    for (std::size_t i = 0; i < basis.size(); ++i) {
        const FockConfig& c = basis.config(i);
        for (int j = 0; j + 1 < L; ++j) {
            // both hop directions across the bond (j, j+1)
            for (int dir = 0; dir < 2; ++dir) {
                const int src = dir == 0 ? j + 1 : j;
                const int dst = dir == 0 ? j : j + 1;
                if (c[src] == 0 || c[dst] == n_max) continue;
                d = c;
                d[src] -= 1;
                d[dst] += 1;
                auto target = basis.find(d);
                if (!target) continue;
                const double amp =
                    std::sqrt(static_cast<double>((c[dst] + 1) * c[src]));
                t.push_back({static_cast<std::uint32_t>(*target),
                             static_cast<std::uint32_t>(i), amp});
            }
        }
    }
    return SparseOperator::from_triplets(basis.size(), basis.size(), std::move(t), basis.key());
}

/// H(t) = H0 - J0 cos(Omega t) * Hop
inline SparseOperator hamiltonian_at(double t, const LatticeParams& params,
                                     const SparseOperator& H0, const SparseOperator& hop) {
    if (H0.rows() != hop.rows() || H0.cols() != hop.cols())
        throw std::invalid_argument("hamiltonian_at: dimension mismatch");
    return add(H0, cplx{-params.drive_coefficient(t), 0.0}, hop);
}

/// Collapse operator of one loss channel at one site, embedded in the full
/// lattice basis. Decay: <n-1|C|n> = sqrt(n kappa_{n,n-1}). Dephase:
/// <n|C|n> = n sqrt(gamma_{n-1,n}), zero on the vacuum level.
inline SparseOperator build_collapse(const BasisMap& basis, const NoiseParams& noise,
                                     int site, CollapseKind kind) {
    detail::require_full_sector(basis, "build_collapse");
    detail::require_site(basis, site, "build_collapse");
    noise.validate(basis.local_cutoff());
    const int j = site - 1;
    std::vector<SparseOperator::Triplet> t;
    for (std::size_t i = 0; i < basis.size(); ++i) {
        const FockConfig& c = basis.config(i);
        const int n = c[j];
        if (n == 0) continue;
        if (kind == CollapseKind::Decay) {
            const double rate = noise.kappa[n - 1];
            if (rate == 0.0) continue;
            FockConfig d = c;
            d[j] -= 1;
            t.push_back({static_cast<std::uint32_t>(basis.index_of(d)),
                         static_cast<std::uint32_t>(i), std::sqrt(n * rate)});
        } else {
            const double rate = noise.gamma[n - 1];
            if (rate == 0.0) continue;
            t.push_back({static_cast<std::uint32_t>(i), static_cast<std::uint32_t>(i),
                         n * std::sqrt(rate)});
        }
    }
    return SparseOperator::from_triplets(basis.size(), basis.size(), std::move(t), basis.key());
}

/// All collapse operators: decay then dephasing, site-major order.
inline std::vector<SparseOperator> all_collapse_operators(const BasisMap& basis,
                                                          const NoiseParams& noise) {
    std::vector<SparseOperator> ops;
    for (int site = 1; site <= basis.sites(); ++site)
        ops.push_back(build_collapse(basis, noise, site, CollapseKind::Decay));
    for (int site = 1; site <= basis.sites(); ++site)
        ops.push_back(build_collapse(basis, noise, site, CollapseKind::Dephase));
    return ops;
}

/// Total number operator N and the reflection operator P (a permutation
/// matrix with P^2 = 1).
inline std::pair<SparseOperator, SparseOperator> symmetry_operators(const BasisMap& basis) {
    std::vector<SparseOperator::Triplet> tn, tp;
    for (std::size_t i = 0; i < basis.size(); ++i) {
        const FockConfig& c = basis.config(i);
        long long ntot = 0;
        for (int n : c) ntot += n;
        if (ntot != 0)
            tn.push_back({static_cast<std::uint32_t>(i), static_cast<std::uint32_t>(i),
                          static_cast<double>(ntot)});
        tp.push_back({static_cast<std::uint32_t>(basis.index_of(parity_reflect(c))),
                      static_cast<std::uint32_t>(i), 1.0});
    }
    auto N = SparseOperator::from_triplets(basis.size(), basis.size(), std::move(tn), basis.key());
    auto P = SparseOperator::from_triplets(basis.size(), basis.size(), std::move(tp), basis.key());
    return {std::move(N), std::move(P)};
}

}  // namespace fracres

#endif
