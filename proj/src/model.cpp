#include "freespiral/model.hpp"

#include <cmath>
#include <numbers>
#include <sstream>

#include "freespiral/constants.hpp"
#include "freespiral/errors.hpp"

namespace freespiral {

namespace {

// Relative slack when comparing m_z^2 = G/3 against 1 at kappa = 5/11.
constexpr double kUnitSlack = 1e-12;

void require(bool ok, const char* what) {
    if (!ok) throw PreconditionError(what);
}

}  // namespace

double ModelParams::G() const { return compute_G(kappa); }

std::string ValidationReport::to_string() const {
    std::ostringstream os;
    for (std::size_t i = 0; i < violations.size(); ++i) {
        if (i) os << "; ";
        os << violations[i];
    }
    return os.str();
}

ValidationReport validate_params(const ModelParams& p, bool enforce_quantization) {
    ValidationReport report;
    auto check = [&](bool ok, std::string msg) {
        if (!ok) report.violations.push_back(std::move(msg));
    };
    check(std::isfinite(p.m0) && p.m0 > 0, "m0 must be positive");
    check(std::isfinite(p.M0) && p.M0 > 0, "M0 must be positive");
    check(std::isfinite(p.c_light) && p.c_light > 0, "c must be positive");
    check(std::isfinite(p.hbar) && p.hbar > 0, "hbar must be positive");
    check(std::isfinite(p.e_charge), "charge must be finite");
    check(std::isfinite(p.velocity_ceiling) && p.velocity_ceiling > 0 && p.velocity_ceiling < 1,
          "velocity ceiling must lie in (0, 1)");

    if (!std::isfinite(p.kappa)) {
        report.violations.push_back("kappa must be finite");
        return report;
    }
    const double denom = 3.0 * p.kappa - 1.0;
    if (denom == 0.0) {
        report.violations.push_back("G singular: kappa = 1/3");
    } else if (p.kappa < 1.0 / 3.0 || p.kappa >= 1.0) {
        report.violations.push_back("kappa outside (1/3, 1): G not finite and positive");
    } else if (enforce_quantization) {
        const double G = 2.0 * (1.0 - p.kappa) / denom;
        check(G / 3.0 <= 1.0 + kUnitSlack,
              "G/3 > 1: quantized spin projection needs kappa >= 5/11");
    }
    return report;
}

double compute_G(double kappa) {
    if (!(kappa > 1.0 / 3.0 && kappa < 1.0)) {
        throw PreconditionError("compute_G: kappa must lie in (1/3, 1)");
    }
    return 2.0 * (1.0 - kappa) / (3.0 * kappa - 1.0);
}

Vec3 momentum(const ModelParams& p, const Vec3& v, const Vec3& m_hat) {
    require(norm(v) < p.max_speed(), "momentum: |v| must stay below the velocity ceiling");
    require(std::abs(norm(m_hat) - 1.0) <= 1e-9, "momentum: m_hat must be a unit vector");
    return p.m0 * ((1.0 + p.kappa) * v - (3.0 * p.kappa - 1.0) * dot(m_hat, v) * m_hat);
}

double effective_mass(const ModelParams& p, double m_hat_z) {
    require(std::abs(m_hat_z) <= 1.0 + kUnitSlack, "effective_mass: |m_z| must not exceed 1");
    const double G = compute_G(p.kappa);
    return p.m0 * (1.0 + p.kappa) * G / (G + m_hat_z * m_hat_z);
}

double SpiralParams::period() const { return 2.0 * std::numbers::pi / std::abs(Omega_s); }

SpiralParams spiral_params(const ModelParams& p, double m_hat_z, double v_z) {
    require(m_hat_z != 0.0 && std::abs(m_hat_z) <= 1.0 + kUnitSlack,
            "spiral_params: need 0 < |m_z| <= 1");
    require(v_z != 0.0 && std::isfinite(v_z), "spiral_params: v_z must be nonzero");
    require(std::abs(v_z) < p.max_speed(), "spiral_params: |v_z| must stay below the velocity ceiling");
    require(p.M0 > 0.0, "spiral_params: M0 must be positive");

    SpiralParams s;
    s.G = compute_G(p.kappa);
    s.m_hat_z = m_hat_z;
    s.v_z = v_z;
    s.m_e = effective_mass(p, m_hat_z);
    const double mz2 = std::min(1.0, m_hat_z * m_hat_z);
    const double speed = std::abs(v_z);
    s.R_s = p.M0 * std::sqrt(1.0 - mz2) / (s.m_e * speed);
    s.Omega_s = s.m_e * m_hat_z * v_z * v_z / (p.M0 * (s.G + mz2));
    s.lambda_s = speed * 2.0 * std::numbers::pi / std::abs(s.Omega_s);
    s.lambda_0 = 2.0 * std::numbers::pi * p.hbar / (s.m_e * speed);
    return s;
}

QuantizedSpin quantized_spin_projection(const ModelParams& p, int sign) {
    require(sign == 1 || sign == -1, "quantized_spin_projection: sign must be +1 or -1");
    const double G = compute_G(p.kappa);
    const double mz2 = G / 3.0;
    require(mz2 <= 1.0 + kUnitSlack, "quantized_spin_projection: G/3 > 1 (kappa < 5/11)");
    const double mz = std::sqrt(std::min(1.0, mz2));
    return {sign * mz, p.hbar / (2.0 * mz)};
}

ModelParams with_quantized_spin(ModelParams p, int sign) {
    p.M0 = quantized_spin_projection(p, sign).M0;
    return p;
}

double steady_transverse_speed(const ModelParams& p, double m_hat_z, double v_z) {
    const double G = compute_G(p.kappa);
    const double mz2 = std::min(1.0, m_hat_z * m_hat_z);
    return std::abs(m_hat_z * v_z) * std::sqrt(1.0 - mz2) / (G + mz2);
}

UncertaintyProduct uncertainty_product(const ModelParams& p, double m_hat_z, double v_z) {
    const SpiralParams s = spiral_params(p, m_hat_z, v_z);
    const double product = s.m_e * steady_transverse_speed(p, m_hat_z, v_z) * s.R_s;
    return {product, product};
}

double de_broglie_wavelength(const ModelParams& p, double m_hat_z, double v_z) {
    require(v_z != 0.0 && std::isfinite(v_z), "de_broglie_wavelength: v_z must be nonzero");
    return 2.0 * std::numbers::pi * p.hbar / (effective_mass(p, m_hat_z) * std::abs(v_z));
}

ModelParams physical_params(double kappa, int sign) {
    ModelParams p;
    p.kappa = kappa;
    p.c_light = cgs::speed_of_light;
    p.hbar = cgs::hbar;
    p.e_charge = cgs::elementary_charge;
    p.m0 = 1.0;
    const QuantizedSpin q = quantized_spin_projection(p, sign);
    // m_e is proportional to m0, so rescale m0 until m_e equals the electron mass.
    p.m0 = cgs::electron_mass / effective_mass(p, q.m_hat_z);
    p.M0 = q.M0;
    return p;
}

}  // namespace freespiral
