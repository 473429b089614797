#pragma once

#include <cmath>
#include <cstdint>
#include <string>
#include <vector>

#include "freespiral/conservation.hpp"
#include "freespiral/dynamics.hpp"
#include "freespiral/helix.hpp"
#include "freespiral/model.hpp"

namespace freespiral {

// ---------------------------------------------------------------- free spiral

struct FreeSpiralResult {
    SpiralParams predicted;
    HelixFit fit;
    ConservationReport conservation;
    Trajectory trajectory;
};

/// Integrates `periods` free-oscillation periods from the exact spiral state
/// and fits a helix. For |m_z| = 1 the motion is a straight line; the time
/// unit is then lambda_0 / |v_z|.
FreeSpiralResult run_free_spiral(const ModelParams& p, double m_hat_z, double v_z, double periods,
                                 IntegratorConfig cfg, const ConservationTolerances& tol = {},
                                 double phase = 0.0);

/// Relative deviations of a fit from the closed forms (radius, |omega|, pitch).
struct SpiralMismatch {
    double radius = 0.0;
    double omega = 0.0;
    double pitch = 0.0;
};
SpiralMismatch compare_fit(const SpiralParams& predicted, const HelixFit& fit);

/// Averaged motion of the spiral in a weak uniform field along x.
struct AveragedMotion {
    double fitted_acceleration = 0.0;    ///< 2 c2 of a quadratic fit of the averaged x(t)
    double expected_acceleration = 0.0;  ///< eE / m_e
    double curvature_radius = 0.0;       ///< m_e v_z^2 / |eE|
    double R_s = 0.0;

    double relative_error() const {
        return std::abs(fitted_acceleration - expected_acceleration) / std::abs(expected_acceleration);
    }
};

AveragedMotion run_averaged_motion(const ModelParams& p, double m_hat_z, double v_z, double field_x,
                                   double periods = 30.0, int steps_per_period = 64);

// ------------------------------------------------------------------ resonance

struct ResonanceConfig {
    double length_in_pitches = 200.0;  ///< interaction length L / lambda_s
    double tilt = 0.2;                 ///< angle between spiral axis and the field direction (rad)
    int phases = 4;                    ///< spiral azimuths per sweep point
    double phase_offset = 0.0;         ///< added to every drawn azimuth
    std::uint64_t seed = 1;
    int steps_per_period = 32;
    int refine_points = 8;             ///< extra points between the neighbours of the maximum
    unsigned threads = 1;
};

struct ResonanceCurve {
    std::vector<double> lambda_f;
    std::vector<double> response;   ///< RMS relative transverse-energy growth per free period
    std::vector<double> std_error;
    double lambda_0 = 0.0;
    double lambda_s = 0.0;
    double interaction_length = 0.0;
    double peak_lambda_f = 0.0;
    double peak_response = 0.0;
    double peak_width = 0.0;        ///< full width at half maximum, 0 if not bracketed
    bool peak_found = false;
    std::vector<std::string> warnings;

    /// Response linearly interpolated at `lambda` inside the sweep.
    double response_at(double lambda) const;
};

/// The spiral (axis tilted from z by cfg.tilt) crosses E_z = Ea cos(2 pi z / lambda_f)
/// over a fixed length. The response is the secular growth rate of the
/// kinetic scalar transverse to the initial axis, relative to the free run.
ResonanceCurve run_periodic_field_resonance(const ModelParams& p, double m_hat_z, double v_z,
                                            double amplitude, std::vector<double> sweep,
                                            const ResonanceConfig& cfg);

/// Evenly spaced points on [lo, hi].
std::vector<double> linear_grid(double lo, double hi, int count);

/// Wavelengths on [lo, hi], increasing, evenly spaced in 1/lambda with step
/// 1/length so that a line of width ~ lambda^2 / length is not stepped over.
std::vector<double> wavenumber_sweep(double lo, double hi, double length);

/// Largest response among sweep points within `fraction` of `lambda`.
double max_response_near(const ResonanceCurve& curve, double lambda, double fraction);

// ---------------------------------------------------------------------- phase

struct PhaseComparison {
    double phi_free = 0.0;            ///< |Omega_s| L / |v_z|
    double phi_quasiclassical = 0.0;  ///< m_e |v_z| L / hbar
    double ratio = 0.0;               ///< phi_free / phi_quasiclassical (0 for L = 0)
    double ratio_half_turn = 0.0;     ///< ratio with each half turn counted as pi
};

PhaseComparison phase_comparison(const ModelParams& p, double m_hat_z, double v_z, double distance);

/// Spin azimuth accumulated while the integrated free spiral advances `distance`.
double measured_free_phase(const ModelParams& p, double m_hat_z, double v_z, double distance,
                           int steps_per_period = 200);

// ------------------------------------------------------------------- spectrum

enum class QuantizationRule { HalfTurn, FullTurn };

std::string rule_tag(QuantizationRule rule);
QuantizationRule parse_rule(const std::string& tag);

struct SpectrumConfig {
    QuantizationRule rule = QuantizationRule::HalfTurn;
    int levels = 11;
    int steps_per_period = 200;
    int grid_points = 24;
};

struct SpectrumResult {
    QuantizationRule rule = QuantizationRule::HalfTurn;
    std::vector<double> levels;    ///< E_1 .. E_n
    std::vector<double> spacings;  ///< E_{n+1} - E_n
    double omega = 0.0;            ///< sqrt(|e k| / m_e)
    double hbar_omega = 0.0;
    std::vector<double> grid_energy;
    std::vector<double> grid_phase;
    double max_azimuth_mismatch = 0.0;  ///< quadrature vs spin azimuth, relative

    double spacing_mean() const;
    double spacing_stdev() const;
};

struct OrbitPhase {
    double quadrature = 0.0;  ///< integral of |Omega_s(v_z)| over one orbit
    double azimuth = 0.0;     ///< net turning of the transverse spin
};

/// Integrates one period of the averaged oscillation in E_z = k z starting at
/// z = 0 with kinetic energy `energy`.
OrbitPhase orbit_phase(const ModelParams& p, double m_hat_z, double gradient, double energy,
                       int steps_per_period);

/// Levels solve phase(E_n) = n pi (half turn) or 2 pi n (full turn).
/// Requires e k < 0 so the field is restoring. Throws NumericError if the
/// phase is not strictly increasing on the grid.
SpectrumResult run_linear_field_spectrum(const ModelParams& p, double m_hat_z, double gradient,
                                         const SpectrumConfig& cfg);

// --------------------------------------------------------------------- filter

enum class ElectronModel { PointClassical, DiffractionBaseline, FreeSpiral };

std::string model_tag(ElectronModel model);
ElectronModel parse_model(const std::string& tag);

struct FilterConfig {
    double hole_diameter = 1e-6;  ///< cm
    double thickness = 1e-4;      ///< cm
    double cell_pitch = 0.0;      ///< square cell side, cm; 0 means twice the diameter
    std::vector<double> energies_eV;
    std::uint64_t n_samples = 100000;
    std::uint64_t seed = 1;
    unsigned threads = 1;
    int spin_sign = 0;            ///< 0 draws the sign per sample

    double pitch() const { return cell_pitch > 0.0 ? cell_pitch : 2.0 * hole_diameter; }
    void validate() const;
};

struct TransmissionCurve {
    ElectronModel model = ElectronModel::PointClassical;
    bool heuristic = false;
    std::vector<double> energy_eV;
    std::vector<double> transmission;
    std::vector<double> std_error;
    std::vector<std::uint64_t> passed;
    std::vector<double> R_s;       ///< cm
    std::vector<double> lambda_0;  ///< cm
    double hole_diameter = 0.0;
    double thickness = 0.0;
    double cell_pitch = 0.0;
    double geometric_fraction = 0.0;  ///< hole area / cell area
    double cutoff_eV = 0.0;           ///< energy with R_s = D/2
    std::uint64_t n_samples = 0;
    std::uint64_t seed = 0;
};

/// Log-spaced energies from lo to hi with `per_decade` points per decade.
std::vector<double> log_energy_grid(double lo_eV, double hi_eV, int per_decade);

/// Kinetic energy (eV) at which the free-spiral radius equals D/2, by bisection.
double spiral_cutoff_energy(const ModelParams& p, double m_hat_z, double hole_diameter);

/// Axial speed (cm/s) of kinetic energy E (eV) with the effective mass.
double speed_from_energy(const ModelParams& p, double m_hat_z, double energy_eV);

/// Monte Carlo over entry point in the cell, spiral azimuth and spin sign.
/// Sample i always draws the same variates, whatever the energy, model or
/// thread count, and counts are reduced as integers.
TransmissionCurve run_filter_transmission(const ModelParams& p, ElectronModel model,
                                          const FilterConfig& cfg);

}  // namespace freespiral
