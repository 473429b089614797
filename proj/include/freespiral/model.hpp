#pragma once

#include <string>
#include <vector>

#include "freespiral/vec3.hpp"

namespace freespiral {

/// Constants of one electron model. Natural units (c = hbar = m0 = 1) are
/// the default; physical runs just pass CGS values.
struct ModelParams {
    double m0 = 1.0;        ///< rest electromagnetic mass U0/c^2
    double kappa = 0.5;     ///< share of U0 carried by field components along the symmetry axis
    double M0 = 1.0;        ///< intrinsic angular momentum magnitude
    double e_charge = 1.0;
    double c_light = 1.0;
    double hbar = 1.0;      ///< comparison diagnostics only
    double velocity_ceiling = 0.1;  ///< allowed |v| as a fraction of c_light

    double G() const;
    double max_speed() const { return velocity_ceiling * c_light; }

    friend bool operator==(const ModelParams&, const ModelParams&) = default;
};

struct ValidationReport {
    std::vector<std::string> violations;

    bool valid() const { return violations.empty(); }
    std::string to_string() const;
};

/// Lists every violated bound. With `enforce_quantization` the spin
/// projection sqrt(G/3) must also be a valid cosine (kappa >= 5/11).
ValidationReport validate_params(const ModelParams& p, bool enforce_quantization);

/// G = 2(1 - kappa)/(3 kappa - 1); throws PreconditionError outside (1/3, 1).
double compute_G(double kappa);

/// Field momentum m0[(1 + kappa) v - (3 kappa - 1) m (m . v)].
Vec3 momentum(const ModelParams& p, const Vec3& v, const Vec3& m_hat);

/// m_e = m0 (1 + kappa) G / (G + m_z^2).
double effective_mass(const ModelParams& p, double m_hat_z);

/// Closed-form free-spiral descriptors for a given spin projection and axial
/// velocity. Lengths are magnitudes; Omega_s carries the sign of m_hat_z.
struct SpiralParams {
    double G = 0.0;
    double R_s = 0.0;
    double Omega_s = 0.0;
    double lambda_s = 0.0;
    double m_e = 0.0;
    double lambda_0 = 0.0;
    double m_hat_z = 0.0;
    double v_z = 0.0;

    double period() const;
    /// R_s / lambda_0, reported as a diagnostic.
    double radius_to_wavelength() const { return R_s / lambda_0; }
};

SpiralParams spiral_params(const ModelParams& p, double m_hat_z, double v_z);

struct QuantizedSpin {
    double m_hat_z = 0.0;
    double M0 = 0.0;
};

/// Spin projection tied to hbar/2: m_z = sign sqrt(G/3), M0 = hbar/(2|m_z|),
/// so M0 m_z = sign hbar/2.
QuantizedSpin quantized_spin_projection(const ModelParams& p, int sign = +1);

/// Copy of `p` with M0 replaced by its quantized value.
ModelParams with_quantized_spin(ModelParams p, int sign = +1);

struct UncertaintyProduct {
    double dpx_dx = 0.0;
    double dpy_dy = 0.0;
};

/// m_e |v_perp| R_s per transverse axis for the steady spiral.
UncertaintyProduct uncertainty_product(const ModelParams& p, double m_hat_z, double v_z);

/// Steady-spiral transverse speed |m_z v_z| sqrt(1 - m_z^2)/(G + m_z^2).
double steady_transverse_speed(const ModelParams& p, double m_hat_z, double v_z);

/// lambda_0 = 2 pi hbar / (m_e |v_z|).
double de_broglie_wavelength(const ModelParams& p, double m_hat_z, double v_z);

/// Model in CGS units whose effective mass at the quantized spin projection
/// equals the electron mass; M0 follows from the quantization.
ModelParams physical_params(double kappa, int sign = +1);

}  // namespace freespiral
