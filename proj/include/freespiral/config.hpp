#pragma once

#include <cstdint>
#include <iosfwd>
#include <optional>
#include <string>

#include "freespiral/conservation.hpp"
#include "freespiral/dynamics.hpp"
#include "freespiral/experiments.hpp"
#include "freespiral/field.hpp"
#include "freespiral/model.hpp"

namespace freespiral {

inline constexpr const char* kConfigDialect = "freespiral-ini/1";

struct ModelSection {
    std::string units = "natural";  ///< natural | cgs
    double kappa = 0.5;
    double m0 = 1.0;
    double M0 = 1.0;
    double e_charge = 1.0;
    double c_light = 1.0;
    double hbar = 1.0;
    double velocity_ceiling = 0.1;
    bool quantize = true;           ///< M0 from the spin projection tied to hbar/2
    int spin_sign = 1;
    friend bool operator==(const ModelSection&, const ModelSection&) = default;
};

struct InitialSection {
    std::optional<double> m_hat_z;  ///< empty: the quantized projection
    double v_z = 0.01;
    double phase = 0.0;
    friend bool operator==(const InitialSection&, const InitialSection&) = default;
};

struct FieldSection {
    std::string type = "zero";  ///< zero | uniform | linear_z | periodic_z
    Vec3 E0;
    double gradient = 0.0;
    double amplitude = 0.0;
    double wavelength = 1.0;
    friend bool operator==(const FieldSection&, const FieldSection&) = default;
};

struct IntegratorSection {
    int steps_per_period = 200;
    std::optional<double> dt;  ///< empty: one free period / steps_per_period
    double periods = 100.0;    ///< run length in free-oscillation periods
    int record_stride = 1;
    bool renormalize_spin = true;
    bool adaptive = false;
    double error_target = 1e-10;
    friend bool operator==(const IntegratorSection&, const IntegratorSection&) = default;
};

struct ResonanceSection {
    double amplitude = 2e-10;
    double lambda_min = 0.5;  ///< in units of lambda_0
    double lambda_max = 3.0;
    double length_in_pitches = 200.0;
    double tilt = 0.2;
    int phases = 4;
    int steps_per_period = 32;
    int refine_points = 8;
    friend bool operator==(const ResonanceSection&, const ResonanceSection&) = default;
};

struct SpectrumSection {
    std::string rule = "half-turn";
    double omega = 1e-6;  ///< field gradient set so that sqrt(|e k| / m_e) = omega
    int levels = 11;
    int steps_per_period = 200;
    int grid_points = 24;
    friend bool operator==(const SpectrumSection&, const SpectrumSection&) = default;
};

struct FilterSection {
    double hole_diameter = 1e-6;
    double thickness = 1e-4;
    double cell_pitch = 0.0;  ///< 0: twice the hole diameter
    double energy_min = 1e-5;
    double energy_max = 1.0;
    int points_per_decade = 5;
    std::uint64_t n_samples = 100000;
    std::string models = "all";  ///< all or one model tag
    int spin_sign = 0;
    friend bool operator==(const FilterSection&, const FilterSection&) = default;
};

struct PhaseSection {
    double distance_in_pitches = 10.0;
    int points = 11;
    int steps_per_period = 200;
    friend bool operator==(const PhaseSection&, const PhaseSection&) = default;
};

struct ToleranceSection {
    double drift = 1e-6;
    double spin_norm = 1e-12;
    double fd_residual = 1e-3;
    double fit = 1e-6;
    friend bool operator==(const ToleranceSection&, const ToleranceSection&) = default;
};

struct RunSection {
    std::uint64_t seed = 1;
    unsigned threads = 1;
    std::string out = "out";
    friend bool operator==(const RunSection&, const RunSection&) = default;
};

/// Whole scenario. Every key has a default, so an empty file is valid.
struct ScenarioConfig {
    ModelSection model;
    InitialSection initial;
    FieldSection field;
    IntegratorSection integrator;
    ResonanceSection resonance;
    SpectrumSection spectrum;
    FilterSection filter;
    PhaseSection phase;
    ToleranceSection tolerances;
    RunSection run;

    ModelParams model_params() const;
    double spin_projection() const;
    FieldSpec field_spec() const;
    ConservationTolerances conservation_tolerances() const;

    friend bool operator==(const ScenarioConfig&, const ScenarioConfig&) = default;
};

/// Parses INI text: `[section]` headers, `key = value`, `#` or `;` comments.
/// Unknown sections or keys, malformed numbers and invalid model parameters
/// raise ConfigError.
ScenarioConfig parse_config(std::istream& is);
ScenarioConfig parse_config_text(const std::string& text);
ScenarioConfig load_config(const std::string& path);

/// Every key written explicitly; parse_config_text(to_ini(c)) == c.
std::string to_ini(const ScenarioConfig& c);

}  // namespace freespiral
