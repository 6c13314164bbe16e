#ifndef FRACRES_RESONANCE_HPP
#define FRACRES_RESONANCE_HPP

#include <algorithm>
#include <cmath>
#include <complex>
#include <cstdlib>
#include <stdexcept>
#include <vector>

#include "fracres/fock_basis.hpp"
#include "fracres/lattice_model.hpp"

namespace fracres {

/// A single- or two-site hop out of a configuration. Sites are 1-based;
/// |from - to| = 1 marks a direct hop, 2 a two-hop process through the
/// intermediate site.
struct HopEvent {
    int from_site = 0;
    int to_site = 0;
    FockConfig config;

    void validate() const {
        const int d = std::abs(from_site - to_site);
        if (from_site == to_site || (d != 1 && d != 2))
            throw std::invalid_argument("HopEvent: sites must differ by 1 or 2");
        if (from_site < 1 || to_site < 1 || from_site > static_cast<int>(config.size()) ||
            to_site > static_cast<int>(config.size()))
            throw std::invalid_argument("HopEvent: site index out of range");
        if (config[from_site - 1] < 1)
            throw std::invalid_argument("HopEvent: source site is empty");
    }

    FockConfig after() const {
        validate();
        FockConfig d = config;
        d[from_site - 1] -= 1;
        d[to_site - 1] += 1;
        return d;
    }
};

struct ResonanceClass {
    enum class Kind { Integer, Fractional, OffResonant };
    Kind kind = Kind::OffResonant;
    int order = 1;  // the m in m*Omega = Delta E (or Delta E / 2)
};

struct ResonanceEntry {
    double omega;          // drive frequency, rad/s
    ResonanceClass cls;
    int multiplicity = 1;  // distinct hop events sharing this frequency
};

struct ResonanceReport {
    std::vector<ResonanceEntry> entries;  // sorted by omega, then kind, then order
    int free_transitions = 0;             // hops with zero energy cost
};

/// Energy cost of a direct hop: Delta E = U (n_to - n_from + 1).
/// Equals config_energy(after) - config_energy(before).
inline double hop_energy_diff(const HopEvent& e, const LatticeParams& params) {
    e.validate();
    if (std::abs(e.from_site - e.to_site) != 2) {
        const int dn = e.config[e.to_site - 1] - e.config[e.from_site - 1];
        return params.U * static_cast<double>(dn + 1);
    }
    // two-hop composite: same form, evaluated between the end sites
    const int dn = e.config[e.to_site - 1] - e.config[e.from_site - 1];
    return params.U * static_cast<double>(dn + 1);
}

/// Phase factor exp(i U t (n_{j+1} - n_j - 1)) picked up by the bond-j
/// hopping term in the frame rotating with H0.
inline std::complex<double> rotating_phase(double t, const FockConfig& c, int j,
                                           const LatticeParams& params) {
    if (j < 1 || j >= static_cast<int>(c.size()))
        throw std::invalid_argument("rotating_phase: bond index out of range");
    const double arg = params.U * t * static_cast<double>(c[j] - c[j - 1] - 1);
    return std::complex<double>(std::cos(arg), std::sin(arg));
}

/// Drive frequencies that activate hops out of configuration c, up to
/// multi-photon order m_max. Direct (adjacent-site) hops give the integer
/// set m*Omega = U(dn + 1); two-hop (next-nearest) processes give the
/// fractional set m*Omega = U(dn + 1)/2. Zero-cost hops are counted
/// separately as free transitions; only positive frequencies are reported.
inline ResonanceReport resonance_frequencies(const FockConfig& c, int m_max,
                                             const LatticeParams& params) {
    if (m_max < 1) throw std::invalid_argument("resonance_frequencies: m_max must be >= 1");
    const int L = static_cast<int>(c.size());
    ResonanceReport report;
    std::vector<ResonanceEntry> raw;

    auto add_hops = [&](int dist, ResonanceClass::Kind kind, double denominator) {
        for (int j = 0; j + dist < L; ++j) {
            for (int dir = 0; dir < 2; ++dir) {
                const int from = dir == 0 ? j : j + dist;
                const int to = dir == 0 ? j + dist : j;
                if (c[from] < 1) continue;
                const int dn = c[to] - c[from];
                const double delta_e = params.U * static_cast<double>(dn + 1);
                if (delta_e == 0.0) {
                    report.free_transitions += 1;
                    continue;
                }
                if (delta_e < 0.0) continue;  // the mirrored hop carries the + branch
                for (int m = 1; m <= m_max; ++m)
                    raw.push_back({delta_e / (denominator * m), {kind, m}, 1});
            }
        }
    };

    add_hops(1, ResonanceClass::Kind::Integer, 1.0);
    add_hops(2, ResonanceClass::Kind::Fractional, 2.0);

    std::sort(raw.begin(), raw.end(), [](const ResonanceEntry& a, const ResonanceEntry& b) {
        if (a.omega != b.omega) return a.omega < b.omega;
        if (a.cls.kind != b.cls.kind) return a.cls.kind < b.cls.kind;
        return a.cls.order < b.cls.order;
    });
    for (const auto& e : raw) {
        if (!report.entries.empty()) {
            auto& last = report.entries.back();
            if (last.omega == e.omega && last.cls.kind == e.cls.kind &&
                last.cls.order == e.cls.order) {
                last.multiplicity += 1;
                continue;
            }
        }
        report.entries.push_back(e);
    }
    return report;
}

/// Classes in the report matching a given drive frequency (relative
/// tolerance 1e-9); empty result means the drive is off-resonant.
inline std::vector<ResonanceEntry> classify_drive(double drive_omega,
                                                  const ResonanceReport& report) {
    std::vector<ResonanceEntry> hits;
    for (const auto& e : report.entries)
        if (std::abs(e.omega - drive_omega) <= 1e-9 * std::max(std::abs(e.omega), drive_omega))
            hits.push_back(e);
    return hits;
}

}  // namespace fracres

#endif
