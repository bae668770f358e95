// config.hpp: flat `section.key = value` scenario configuration: parsing,
// validation, defaults and the normalized dump

#pragma once

#include <array>
#include <charconv>
#include <cmath>
#include <cstdio>
#include <fstream>
#include <functional>
#include <map>
#include <optional>
#include <sstream>
#include <string>
#include <string_view>
#include <vector>

#include "avisim/errors.hpp"

namespace avisim {

enum class ReservoirKind { waveguide, cavity };
enum class InitialState { ground, a, b, psi_plus, psi_minus, custom };

inline std::string_view to_string(ReservoirKind k) { return k == ReservoirKind::cavity ? "cavity" : "waveguide"; }

inline std::string_view to_string(InitialState s)
{
    switch (s) {
    case InitialState::ground: return "g";
    case InitialState::a: return "a";
    case InitialState::b: return "b";
    case InitialState::psi_plus: return "psi_plus";
    case InitialState::psi_minus: return "psi_minus";
    case InitialState::custom: return "custom";
    }
    return "g";
}

/// Every tunable of a run, in I/O units: THz, nm, nm^3, Debye, µeV, ns.
struct ScenarioConfig {
    struct Reservoir {
        ReservoirKind kind = ReservoirKind::cavity;
        double q = 1000.0;
        double frequency = 200.0;        // cavity resonance, THz
        double v_eff = 0.0;              // nm^3; 0 picks the geometry default
        double eps_b = 13.0;
        double eta = 1.0;
        std::string polarization = "x";  // cavity mode: x | y
        double pitch = 400.0;            // nm
        double group_index = 50.0;
        double alpha = 1.0;
        double beta = 0.0;
        double phi = 0.0;                // rad
        double k_bloch = 0.0;            // nm^-1; 0 means π/pitch
        bool operator==(const Reservoir&) const = default;
    } reservoir;

    struct Dipoles {
        std::string basis = "circular";
        double d = 50.0;                 // Debye
        double frequency = 200.0;        // exciton a, THz
        double fss = 0.0;                // ħ(ω_b − ω_a), µeV
        double x_a = 0.0;                // nm
        double x_b = 0.0;
        bool operator==(const Dipoles&) const = default;
    } dipoles;

    struct Drive {
        double omega_a = 0.0;            // µeV
        double omega_b = 0.0;
        double laser_detuning = 0.0;     // ħ(ω_L − ω'_a), µeV
        bool operator==(const Drive&) const = default;
    } drive;

    struct Noise {
        double gamma_a = 0.0;            // µeV
        double gamma_b = 0.0;
        bool operator==(const Noise&) const = default;
    } noise;

    struct Run {
        InitialState initial = InitialState::ground;
        std::array<double, 9> rho{1, 0, 0, 0, 0, 0, 0, 0, 0};       // row-major real part
        std::array<double, 9> rho_imag{};
        double t_max = 5.0;              // ns
        long samples = 1001;
        double rtol = 1e-8;
        double atol = 1e-10;
        bool cross_coupling = true;
        bool operator==(const Run&) const = default;
    } run;

    struct Spectrum {
        bool enabled = false;
        double tau_max = 0.0;            // ns; 0 means 20 slowest lifetimes
        double window = 0.0;             // half width, µeV; 0 means 3x the largest dressed splitting
        long points = 2001;
        double threshold = 0.01;         // peak prominence as a fraction of max S
        bool operator==(const Spectrum&) const = default;
    } spectrum;

    bool operator==(const ScenarioConfig&) const = default;

    double resolved_v_eff() const
    {
        if (reservoir.v_eff > 0.0)
            return reservoir.v_eff;
        return reservoir.kind == ReservoirKind::cavity ? 5e7 : 4e7;
    }
    double resolved_k_bloch() const { return reservoir.k_bloch > 0.0 ? reservoir.k_bloch : 3.14159265358979323846 / reservoir.pitch; }

    void validate() const;
};

namespace detail {

inline std::string trim(std::string_view s)
{
    const auto b = s.find_first_not_of(" \t\r");
    if (b == std::string_view::npos)
        return {};
    const auto e = s.find_last_not_of(" \t\r");
    return std::string(s.substr(b, e - b + 1));
}

inline std::optional<double> to_double(std::string_view s)
{
    double v = 0.0;
    const auto [p, ec] = std::from_chars(s.data(), s.data() + s.size(), v);
    if (ec != std::errc() || p != s.data() + s.size() || !std::isfinite(v))
        return std::nullopt;
    return v;
}

inline std::string fmt(double v)
{
    char buf[40];
    std::snprintf(buf, sizeof buf, "%.17g", v);
    return buf;
}

struct Field {
    std::function<void(ScenarioConfig&, const std::string&)> set;   // throws std::string on bad value
    std::function<std::string(const ScenarioConfig&)> get;
    bool numeric;
};

inline Field number(double ScenarioConfig::*, double) = delete;

template <class Section>
Field real_field(Section ScenarioConfig::*sec, double Section::*mem)
{
    return {[=](ScenarioConfig& c, const std::string& v) {
                const auto d = to_double(v);
                if (!d)
                    throw std::string("expected a number, got '" + v + "'");
                (c.*sec).*mem = *d;
            },
            [=](const ScenarioConfig& c) { return fmt((c.*sec).*mem); }, true};
}

template <class Section>
Field int_field(Section ScenarioConfig::*sec, long Section::*mem)
{
    return {[=](ScenarioConfig& c, const std::string& v) {
                const auto d = to_double(v);
                if (!d || std::floor(*d) != *d)
                    throw std::string("expected an integer, got '" + v + "'");
                (c.*sec).*mem = static_cast<long>(*d);
            },
            [=](const ScenarioConfig& c) { return std::to_string((c.*sec).*mem); }, true};
}

template <class Section>
Field bool_field(Section ScenarioConfig::*sec, bool Section::*mem)
{
    return {[=](ScenarioConfig& c, const std::string& v) {
                if (v == "true" || v == "yes" || v == "on" || v == "1")
                    (c.*sec).*mem = true;
                else if (v == "false" || v == "no" || v == "off" || v == "0")
                    (c.*sec).*mem = false;
                else
                    throw std::string("expected true or false, got '" + v + "'");
            },
            [=](const ScenarioConfig& c) { return std::string((c.*sec).*mem ? "true" : "false"); }, false};
}

template <class Section>
Field choice_field(Section ScenarioConfig::*sec, std::string Section::*mem, std::vector<std::string> allowed)
{
    return {[=](ScenarioConfig& c, const std::string& v) {
                for (const auto& a : allowed)
                    if (a == v) {
                        (c.*sec).*mem = v;
                        return;
                    }
                std::string list;
                for (const auto& a : allowed)
                    list += (list.empty() ? "" : ", ") + a;
                throw std::string("expected one of {" + list + "}, got '" + v + "'");
            },
            [=](const ScenarioConfig& c) { return (c.*sec).*mem; }, false};
}

inline Field matrix_field(std::array<double, 9> ScenarioConfig::Run::*mem)
{
    return {[=](ScenarioConfig& c, const std::string& v) {
                std::istringstream is(v);
                std::array<double, 9> m{};
                std::string tok;
                int k = 0;
                while (is >> tok) {
                    const auto d = to_double(tok);
                    if (!d || k >= 9)
                        throw std::string("expected 9 numbers (row-major 3x3)");
                    m[k++] = *d;
                }
                if (k != 9)
                    throw std::string("expected 9 numbers (row-major 3x3)");
                c.run.*mem = m;
            },
            [=](const ScenarioConfig& c) {
                std::string s;
                for (double x : c.run.*mem)
                    s += (s.empty() ? "" : " ") + fmt(x);
                return s;
            },
            false};
}

/// Ordered schema; dump order follows this table.
inline const std::vector<std::pair<std::string, Field>>& schema()
{
    using C = ScenarioConfig;
    static const std::vector<std::pair<std::string, Field>> table = [] {
        std::vector<std::pair<std::string, Field>> t;
        t.emplace_back("reservoir.kind",
                       Field{[](C& c, const std::string& v) {
                                 if (v == "cavity")
                                     c.reservoir.kind = ReservoirKind::cavity;
                                 else if (v == "waveguide")
                                     c.reservoir.kind = ReservoirKind::waveguide;
                                 else
                                     throw std::string("expected cavity or waveguide, got '" + v + "'");
                             },
                             [](const C& c) { return std::string(to_string(c.reservoir.kind)); }, false});
        t.emplace_back("reservoir.q", real_field(&C::reservoir, &C::Reservoir::q));
        t.emplace_back("reservoir.frequency", real_field(&C::reservoir, &C::Reservoir::frequency));
        t.emplace_back("reservoir.v_eff", real_field(&C::reservoir, &C::Reservoir::v_eff));
        t.emplace_back("reservoir.eps_b", real_field(&C::reservoir, &C::Reservoir::eps_b));
        t.emplace_back("reservoir.eta", real_field(&C::reservoir, &C::Reservoir::eta));
        t.emplace_back("reservoir.polarization",
                       choice_field(&C::reservoir, &C::Reservoir::polarization, {"x", "y"}));
        t.emplace_back("reservoir.pitch", real_field(&C::reservoir, &C::Reservoir::pitch));
        t.emplace_back("reservoir.group_index", real_field(&C::reservoir, &C::Reservoir::group_index));
        t.emplace_back("reservoir.alpha", real_field(&C::reservoir, &C::Reservoir::alpha));
        t.emplace_back("reservoir.beta", real_field(&C::reservoir, &C::Reservoir::beta));
        t.emplace_back("reservoir.phi", real_field(&C::reservoir, &C::Reservoir::phi));
        t.emplace_back("reservoir.k_bloch", real_field(&C::reservoir, &C::Reservoir::k_bloch));
        t.emplace_back("dipoles.basis", choice_field(&C::dipoles, &C::Dipoles::basis, {"circular", "linear"}));
        t.emplace_back("dipoles.d", real_field(&C::dipoles, &C::Dipoles::d));
        t.emplace_back("dipoles.frequency", real_field(&C::dipoles, &C::Dipoles::frequency));
        t.emplace_back("dipoles.fss", real_field(&C::dipoles, &C::Dipoles::fss));
        t.emplace_back("dipoles.x_a", real_field(&C::dipoles, &C::Dipoles::x_a));
        t.emplace_back("dipoles.x_b", real_field(&C::dipoles, &C::Dipoles::x_b));
        t.emplace_back("drive.omega_a", real_field(&C::drive, &C::Drive::omega_a));
        t.emplace_back("drive.omega_b", real_field(&C::drive, &C::Drive::omega_b));
        t.emplace_back("drive.laser_detuning", real_field(&C::drive, &C::Drive::laser_detuning));
        t.emplace_back("noise.gamma_a", real_field(&C::noise, &C::Noise::gamma_a));
        t.emplace_back("noise.gamma_b", real_field(&C::noise, &C::Noise::gamma_b));
        t.emplace_back("run.initial",
                       Field{[](C& c, const std::string& v) {
                                 for (InitialState s : {InitialState::ground, InitialState::a, InitialState::b,
                                                        InitialState::psi_plus, InitialState::psi_minus,
                                                        InitialState::custom})
                                     if (to_string(s) == v) {
                                         c.run.initial = s;
                                         return;
                                     }
                                 throw std::string("expected one of {g, a, b, psi_plus, psi_minus, custom}, got '"
                                                   + v + "'");
                             },
                             [](const C& c) { return std::string(to_string(c.run.initial)); }, false});
        t.emplace_back("run.rho", matrix_field(&C::Run::rho));
        t.emplace_back("run.rho_imag", matrix_field(&C::Run::rho_imag));
        t.emplace_back("run.t_max", real_field(&C::run, &C::Run::t_max));
        t.emplace_back("run.samples", int_field(&C::run, &C::Run::samples));
        t.emplace_back("run.rtol", real_field(&C::run, &C::Run::rtol));
        t.emplace_back("run.atol", real_field(&C::run, &C::Run::atol));
        t.emplace_back("run.cross_coupling", bool_field(&C::run, &C::Run::cross_coupling));
        t.emplace_back("spectrum.enabled", bool_field(&C::spectrum, &C::Spectrum::enabled));
        t.emplace_back("spectrum.tau_max", real_field(&C::spectrum, &C::Spectrum::tau_max));
        t.emplace_back("spectrum.window", real_field(&C::spectrum, &C::Spectrum::window));
        t.emplace_back("spectrum.points", int_field(&C::spectrum, &C::Spectrum::points));
        t.emplace_back("spectrum.threshold", real_field(&C::spectrum, &C::Spectrum::threshold));
        return t;
    }();
    return table;
}

inline const Field* find_field(std::string_view key)
{
    for (const auto& [name, f] : schema())
        if (name == key)
            return &f;
    return nullptr;
}

} // namespace detail

inline void ScenarioConfig::validate() const
{
    auto positive = [](double v, const char* what) {
        if (!(v > 0.0))
            throw ValidationError(std::string(what) + " must be positive");
    };
    auto nonneg = [](double v, const char* what) {
        if (!(v >= 0.0))
            throw ValidationError(std::string(what) + " must be non-negative");
    };
    positive(reservoir.q, "reservoir.q");
    positive(reservoir.frequency, "reservoir.frequency");
    nonneg(reservoir.v_eff, "reservoir.v_eff");
    if (!(reservoir.eps_b >= 1.0))
        throw ValidationError("reservoir.eps_b must be >= 1");
    if (!(reservoir.eta > 0.0 && reservoir.eta <= 1.0))
        throw ValidationError("reservoir.eta must lie in (0, 1]");
    positive(reservoir.pitch, "reservoir.pitch");
    positive(reservoir.group_index, "reservoir.group_index");
    nonneg(reservoir.k_bloch, "reservoir.k_bloch");
    if (reservoir.kind == ReservoirKind::waveguide
        && !(std::abs(reservoir.alpha * reservoir.alpha + reservoir.beta * reservoir.beta - 1.0) < 1e-12))
        throw ValidationError("reservoir.alpha^2 + reservoir.beta^2 must equal 1 (got "
                              + detail::fmt(reservoir.alpha * reservoir.alpha + reservoir.beta * reservoir.beta)
                              + ")");
    positive(dipoles.d, "dipoles.d");
    positive(dipoles.frequency, "dipoles.frequency");
    nonneg(noise.gamma_a, "noise.gamma_a");
    nonneg(noise.gamma_b, "noise.gamma_b");
    positive(run.t_max, "run.t_max");
    if (run.samples < 2)
        throw ValidationError("run.samples must be at least 2");
    nonneg(run.rtol, "run.rtol");
    nonneg(run.atol, "run.atol");
    if (run.rtol == 0.0 && run.atol == 0.0)
        throw ValidationError("run.rtol and run.atol cannot both be zero");
    nonneg(spectrum.tau_max, "spectrum.tau_max");
    nonneg(spectrum.window, "spectrum.window");
    if (spectrum.points < 3)
        throw ValidationError("spectrum.points must be at least 3");
    if (!(spectrum.threshold >= 0.0 && spectrum.threshold < 1.0))
        throw ValidationError("spectrum.threshold must lie in [0, 1)");
}

/// Parses the flat format. `#` starts a comment; blank lines are skipped.
/// reservoir.kind is mandatory, every other key has a default.
inline ScenarioConfig parse_config_text(std::string_view text)
{
    ScenarioConfig cfg;
    std::map<std::string, int> seen;
    std::istringstream is{std::string(text)};
    std::string raw;
    int line_no = 0;
    while (std::getline(is, raw)) {
        ++line_no;
        std::string line = raw.substr(0, raw.find('#'));
        if (detail::trim(line).empty())
            continue;
        const auto eq = line.find('=');
        if (eq == std::string::npos)
            throw ConfigError("expected 'section.key = value'", line_no,
                              static_cast<int>(line.find_first_not_of(" \t")) + 1);
        const std::string key = detail::trim(line.substr(0, eq));
        const std::string value = detail::trim(line.substr(eq + 1));
        const int key_col = static_cast<int>(line.find_first_not_of(" \t")) + 1;
        const int value_col = static_cast<int>(line.find_first_not_of(" \t", eq + 1) == std::string::npos
                                                   ? eq + 2
                                                   : line.find_first_not_of(" \t", eq + 1) + 1);
        if (key.find('.') == std::string::npos)
            throw ConfigError("key '" + key + "' must have the form section.key", line_no, key_col);
        const detail::Field* f = detail::find_field(key);
        if (!f)
            throw ConfigError("unknown key '" + key + "'", line_no, key_col);
        if (auto it = seen.find(key); it != seen.end())
            throw ConfigError("duplicate key '" + key + "' (first set on line " + std::to_string(it->second) + ")",
                              line_no, key_col);
        seen[key] = line_no;
        if (value.empty())
            throw ConfigError("missing value for '" + key + "'", line_no, value_col);
        try {
            f->set(cfg, value);
        } catch (const std::string& msg) {
            throw ConfigError(key + ": " + msg, line_no, value_col);
        }
    }
    if (!seen.count("reservoir.kind"))
        throw ConfigError("missing required key reservoir.kind", 0);
    cfg.validate();
    return cfg;
}

inline ScenarioConfig parse_config(const std::string& path)
{
    std::ifstream in(path);
    if (!in)
        throw ConfigError("cannot open config file '" + path + "'", 0);
    std::ostringstream ss;
    ss << in.rdbuf();
    return parse_config_text(ss.str());
}

/// Normalized dump with every key; parse_config_text(dump(c)) == c.
inline std::string dump_config(const ScenarioConfig& cfg)
{
    std::string out;
    std::string section;
    for (const auto& [name, f] : detail::schema()) {
        const std::string sec = name.substr(0, name.find('.'));
        if (sec != section) {
            if (!section.empty())
                out += '\n';
            section = sec;
        }
        out += name + " = " + f.get(cfg) + '\n';
    }
    return out;
}

/// Sets a numeric leaf by its dotted path.
inline void set_numeric(ScenarioConfig& cfg, const std::string& path, double value)
{
    const detail::Field* f = detail::find_field(path);
    if (!f)
        throw ValidationError("unknown parameter path '" + path + "'");
    if (!f->numeric)
        throw ValidationError("parameter '" + path + "' is not numeric");
    try {
        f->set(cfg, detail::fmt(value));
    } catch (const std::string& msg) {
        throw ValidationError(path + ": " + msg);
    }
}

} // namespace avisim
