#ifndef FRACRES_SCENARIO_HPP
#define FRACRES_SCENARIO_HPP

#include <cmath>
#include <cstdio>
#include <fstream>
#include <optional>
#include <sstream>
#include <stdexcept>
#include <string>
#include <vector>

#include "fracres/evolution.hpp"
#include "fracres/fock_basis.hpp"
#include "fracres/lattice_model.hpp"

namespace fracres {

struct ScenarioParseError : std::runtime_error {
    using std::runtime_error::runtime_error;
};

struct Drive {
    enum class Kind { Integer, Fractional, Ratio };
    Kind kind = Kind::Integer;
    double ratio = 1.0;  // Omega/U; meaningful for Kind::Ratio

    double omega_over_u() const {
        switch (kind) {
            case Kind::Integer: return 1.0;
            case Kind::Fractional: return 0.5;
            default: return ratio;
        }
    }
    bool operator==(const Drive&) const = default;
};

/*
 * Everything one run needs, read from a plain "key = value" text file.
 * Hamiltonian inputs are ordinary frequencies in Hz (converted to angular
 * internally); noise entries are plain rates in 1/s. omega_hz is carried
 * for the record only: the dynamics are integrated with the local frequency
 * term rotated away, which leaves every reported observable unchanged.
 */
struct ScenarioConfig {
    int L = 0;
    int n_max = -1;  // -1: defaults to the total particle count of the initial state
    double U_over_J0 = 40.0;
    double J0_hz = 11.5e3;
    double omega_hz = 0.0;
    Drive drive;
    bool open_system = false;
    std::vector<double> kappa_hz;  // empty: all zero
    std::vector<double> gamma_hz;
    std::optional<FockConfig> initial;  // nullopt: unit filling
    double t_final_periods = 50.0;
    double dt_periods = 1.0 / 256.0;
    int output_stride = 1;
    int m_max = 3;

    bool operator==(const ScenarioConfig&) const = default;

    FockConfig initial_config() const {
        return initial ? *initial : FockConfig(L, 1);
    }

    int total_particles() const {
        int n = 0;
        for (int v : initial_config()) n += v;
        return n;
    }

    int resolved_n_max() const { return n_max >= 0 ? n_max : total_particles(); }

    LatticeParams lattice_params() const {
        LatticeParams p;
        p.L = L;
        p.n_max = resolved_n_max();
        p.omega = 0.0;  // rotating-frame choice; omega_hz is metadata
        p.J0 = 2.0 * M_PI * J0_hz;
        p.U = U_over_J0 * p.J0;
        p.drive_omega = drive.omega_over_u() * p.U;
        return p;
    }

    NoiseParams noise_params() const {
        NoiseParams n;
        n.kappa = kappa_hz.empty() ? std::vector<double>(resolved_n_max(), 0.0) : kappa_hz;
        n.gamma = gamma_hz.empty() ? std::vector<double>(resolved_n_max(), 0.0) : gamma_hz;
        return n;
    }

    Schedule schedule() const { return {t_final_periods, dt_periods, output_stride}; }

    void validate() const {
        auto fail = [](const std::string& msg) { throw ScenarioParseError(msg); };
        if (L < 1) fail("L: must be a positive integer");
        const auto init = initial_config();
        if (static_cast<int>(init.size()) != L) fail("initial: needs exactly L entries");
        const int nm = resolved_n_max();
        if (nm < 1) fail("n_max: must be >= 1");
        for (int v : init)
            if (v < 0 || v > nm) fail("initial: occupations must lie in [0, n_max]");
        if (!(U_over_J0 > 0)) fail("U_over_J0: must be > 0");
        if (!(J0_hz > 0)) fail("J0_hz: must be > 0");
        if (omega_hz < 0) fail("omega_hz: must be >= 0");
        if (drive.kind == Drive::Kind::Ratio && !(drive.ratio > 0))
            fail("drive: frequency ratio must be > 0");
        if (!kappa_hz.empty() && static_cast<int>(kappa_hz.size()) != nm)
            fail("kappa_hz: needs exactly n_max entries");
        if (!gamma_hz.empty() && static_cast<int>(gamma_hz.size()) != nm)
            fail("gamma_hz: needs exactly n_max entries");
        for (double v : kappa_hz)
            if (v < 0) fail("kappa_hz: rates must be >= 0");
        for (double v : gamma_hz)
            if (v < 0) fail("gamma_hz: rates must be >= 0");
        if (!(dt_periods > 0)) fail("dt_periods: must be > 0");
        if (t_final_periods < dt_periods) fail("t_final_periods: must be >= dt_periods");
        if (output_stride < 1) fail("output_stride: must be >= 1");
        if (m_max < 1) fail("m_max: must be >= 1");
        if (full_dimension(L, nm) > (1u << 16))
            fail("L/n_max: full basis dimension above 65536, not a desk-scale run");
    }
};

namespace detail {

inline std::string trim(const std::string& s) {
    const auto b = s.find_first_not_of(" \t\r");
    if (b == std::string::npos) return "";
    const auto e = s.find_last_not_of(" \t\r");
    return s.substr(b, e - b + 1);
}

inline double parse_real(const std::string& v, int line, const std::string& key) {
    std::size_t used = 0;
    double out = 0;
    try {
        out = std::stod(v, &used);
    } catch (const std::exception&) {
        used = 0;
    }
    if (used != v.size())
        throw ScenarioParseError("line " + std::to_string(line) + ": " + key +
                                 ": expected a number, got '" + v + "'");
    return out;
}

inline long long parse_int(const std::string& v, int line, const std::string& key) {
    std::size_t used = 0;
    long long out = 0;
    try {
        out = std::stoll(v, &used);
    } catch (const std::exception&) {
        used = 0;
    }
    if (used != v.size())
        throw ScenarioParseError("line " + std::to_string(line) + ": " + key +
                                 ": expected an integer, got '" + v + "'");
    return out;
}

inline std::vector<std::string> split_list(const std::string& v, int line,
                                           const std::string& key) {
    if (v.size() < 2 || v.front() != '[' || v.back() != ']')
        throw ScenarioParseError("line " + std::to_string(line) + ": " + key +
                                 ": expected a list like [a, b, c]");
    std::vector<std::string> items;
    std::string body = v.substr(1, v.size() - 2);
    std::stringstream ss(body);
    std::string item;
    while (std::getline(ss, item, ',')) items.push_back(trim(item));
    if (items.size() == 1 && items[0].empty()) items.clear();
    return items;
}

inline std::string format_real(double v) {
    char buf[64];
    std::snprintf(buf, sizeof(buf), "%.17g", v);
    return buf;
}

}  // namespace detail

inline ScenarioConfig parse_scenario_text(const std::string& text) {
    ScenarioConfig cfg;
    bool saw_l = false;
    std::stringstream stream(text);
    std::string raw;
    int line = 0;
    while (std::getline(stream, raw)) {
        ++line;
        const auto hash = raw.find('#');
        std::string s = detail::trim(hash == std::string::npos ? raw : raw.substr(0, hash));
        if (s.empty()) continue;
        const auto eq = s.find('=');
        if (eq == std::string::npos)
            throw ScenarioParseError("line " + std::to_string(line) +
                                     ": expected 'key = value', got '" + s + "'");
        const std::string key = detail::trim(s.substr(0, eq));
        const std::string value = detail::trim(s.substr(eq + 1));
        if (key.empty() || value.empty())
            throw ScenarioParseError("line " + std::to_string(line) +
                                     ": expected 'key = value', got '" + s + "'");

        if (key == "L") {
            cfg.L = static_cast<int>(detail::parse_int(value, line, key));
            saw_l = true;
        } else if (key == "n_max") {
            cfg.n_max = static_cast<int>(detail::parse_int(value, line, key));
        } else if (key == "U_over_J0") {
            cfg.U_over_J0 = detail::parse_real(value, line, key);
        } else if (key == "J0_hz") {
            cfg.J0_hz = detail::parse_real(value, line, key);
        } else if (key == "omega_hz") {
            cfg.omega_hz = detail::parse_real(value, line, key);
        } else if (key == "drive") {
            if (value == "integer") cfg.drive = {Drive::Kind::Integer, 1.0};
            else if (value == "fractional") cfg.drive = {Drive::Kind::Fractional, 0.5};
            else cfg.drive = {Drive::Kind::Ratio, detail::parse_real(value, line, key)};
        } else if (key == "open_system") {
            if (value == "true") cfg.open_system = true;
            else if (value == "false") cfg.open_system = false;
            else
                throw ScenarioParseError("line " + std::to_string(line) +
                                         ": open_system: expected true or false");
        } else if (key == "kappa_hz" || key == "gamma_hz") {
            std::vector<double> rates;
            for (const auto& item : detail::split_list(value, line, key))
                rates.push_back(detail::parse_real(item, line, key));
            (key == "kappa_hz" ? cfg.kappa_hz : cfg.gamma_hz) = std::move(rates);
        } else if (key == "initial") {
            if (value == "unit_filling") {
                cfg.initial.reset();
            } else {
                FockConfig c;
                for (const auto& item : detail::split_list(value, line, key))
                    c.push_back(static_cast<int>(detail::parse_int(item, line, key)));
                cfg.initial = std::move(c);
            }
        } else if (key == "t_final_periods") {
            cfg.t_final_periods = detail::parse_real(value, line, key);
        } else if (key == "dt_periods") {
            cfg.dt_periods = detail::parse_real(value, line, key);
        } else if (key == "output_stride") {
            cfg.output_stride = static_cast<int>(detail::parse_int(value, line, key));
        } else if (key == "m_max") {
            cfg.m_max = static_cast<int>(detail::parse_int(value, line, key));
        } else {
            throw ScenarioParseError("line " + std::to_string(line) + ": unknown key '" + key +
                                     "'");
        }
    }
    if (!saw_l) throw ScenarioParseError("missing required key 'L'");
    cfg.validate();
    return cfg;
}

inline ScenarioConfig parse_scenario(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw ScenarioParseError("cannot open scenario file '" + path + "'");
    std::stringstream buf;
    buf << in.rdbuf();
    try {
        return parse_scenario_text(buf.str());
    } catch (const ScenarioParseError& e) {
        throw ScenarioParseError(path + ": " + e.what());
    }
}

/// Canonical text form; parsing it back yields an identical config.
inline std::string serialize_scenario(const ScenarioConfig& cfg) {
    std::ostringstream out;
    out << "L = " << cfg.L << "\n";
    if (cfg.n_max >= 0) out << "n_max = " << cfg.n_max << "\n";
    out << "U_over_J0 = " << detail::format_real(cfg.U_over_J0) << "\n";
    out << "J0_hz = " << detail::format_real(cfg.J0_hz) << "\n";
    out << "omega_hz = " << detail::format_real(cfg.omega_hz) << "\n";
    out << "drive = ";
    switch (cfg.drive.kind) {
        case Drive::Kind::Integer: out << "integer"; break;
        case Drive::Kind::Fractional: out << "fractional"; break;
        case Drive::Kind::Ratio: out << detail::format_real(cfg.drive.ratio); break;
    }
    out << "\n";
    out << "open_system = " << (cfg.open_system ? "true" : "false") << "\n";
    auto write_list = [&](const char* key, const std::vector<double>& v) {
        if (v.empty()) return;
        out << key << " = [";
        for (std::size_t i = 0; i < v.size(); ++i)
            out << (i ? ", " : "") << detail::format_real(v[i]);
        out << "]\n";
    };
    write_list("kappa_hz", cfg.kappa_hz);
    write_list("gamma_hz", cfg.gamma_hz);
    if (cfg.initial) {
        out << "initial = [";
        for (std::size_t i = 0; i < cfg.initial->size(); ++i)
            out << (i ? ", " : "") << (*cfg.initial)[i];
        out << "]\n";
    } else {
        out << "initial = unit_filling\n";
    }
    out << "t_final_periods = " << detail::format_real(cfg.t_final_periods) << "\n";
    out << "dt_periods = " << detail::format_real(cfg.dt_periods) << "\n";
    out << "output_stride = " << cfg.output_stride << "\n";
    out << "m_max = " << cfg.m_max << "\n";
    return out.str();
}

}  // namespace fracres

#endif
