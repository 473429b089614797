#include <algorithm>
#include <cmath>
#include <numbers>
#include <numeric>

#include "freespiral/errors.hpp"
#include "freespiral/experiments.hpp"
#include "freespiral/numerics.hpp"

namespace freespiral {

namespace {

// |Omega_s| = rate * v_z^2 on the spiral with spin projection m_z.
double phase_rate_coefficient(const ModelParams& p, double m_hat_z) {
    const double G = compute_G(p.kappa);
    return effective_mass(p, m_hat_z) * std::abs(m_hat_z) / (p.M0 * (G + m_hat_z * m_hat_z));
}

double restoring_frequency(const ModelParams& p, double m_hat_z, double gradient) {
    if (!(p.e_charge * gradient < 0.0)) {
        throw PreconditionError("linear field: e * gradient must be negative (restoring)");
    }
    return std::sqrt(-p.e_charge * gradient / effective_mass(p, m_hat_z));
}

double rule_factor(QuantizationRule rule) { return rule == QuantizationRule::HalfTurn ? 1.0 : 2.0; }

}  // namespace

std::string rule_tag(QuantizationRule rule) {
    return rule == QuantizationRule::HalfTurn ? "half-turn" : "full-turn";
}

QuantizationRule parse_rule(const std::string& tag) {
    if (tag == "half-turn") return QuantizationRule::HalfTurn;
    if (tag == "full-turn") return QuantizationRule::FullTurn;
    throw PreconditionError("unknown quantization rule '" + tag + "' (half-turn | full-turn)");
}

double SpectrumResult::spacing_mean() const {
    if (spacings.empty()) return 0.0;
    return std::accumulate(spacings.begin(), spacings.end(), 0.0) / static_cast<double>(spacings.size());
}

double SpectrumResult::spacing_stdev() const {
    if (spacings.size() < 2) return 0.0;
    const double mean = spacing_mean();
    double ss = 0.0;
    for (double d : spacings) ss += (d - mean) * (d - mean);
    return std::sqrt(ss / static_cast<double>(spacings.size() - 1));
}

OrbitPhase orbit_phase(const ModelParams& p, double m_hat_z, double gradient, double energy,
                       int steps_per_period) {
    if (!(energy > 0.0)) throw PreconditionError("orbit_phase: energy must be positive");
    const double m_e = effective_mass(p, m_hat_z);
    const double omega = restoring_frequency(p, m_hat_z, gradient);
    const double rate = phase_rate_coefficient(p, m_hat_z);
    const double orbit = 2.0 * std::numbers::pi / omega;
    const double v0 = std::sqrt(2.0 * energy / m_e);

    // Free turns per orbit from the averaged motion; the peak rate is twice the mean.
    const double turns = rate * energy / (m_e * omega);
    const auto half_steps = static_cast<long>(std::ceil(0.5 * steps_per_period * std::max(1.0, 2.0 * turns)));
    const long n = 2 * half_steps;

    IntegratorConfig cfg;
    cfg.steps_per_period = steps_per_period;
    cfg.dt_override = orbit / static_cast<double>(n);
    cfg.max_time = orbit;
    const Trajectory tr = integrate(p, spiral_initial_conditions(p, m_hat_z, v0, 0.0),
                                    FieldSpec::linear_z(gradient), cfg);

    std::vector<double> azimuth;
    azimuth.reserve(tr.size());
    for (const auto& s : tr.samples) azimuth.push_back(std::atan2(s.state.m_hat.y, s.state.m_hat.x));
    const std::vector<double> unwrapped = numerics::unwrap(azimuth);

    OrbitPhase out;
    out.azimuth = std::abs(unwrapped.back() - unwrapped.front());
    auto f = [&](std::size_t i) {
        const double vz = tr.samples[i].state.v.z;
        return rate * vz * vz;
    };
    const std::size_t last = tr.size() - 1;
    if (last % 2 == 0) {
        // Composite Simpson on the uniform grid.
        const double h = tr.duration() / static_cast<double>(last);
        double sum = f(0) + f(last);
        for (std::size_t i = 1; i < last; ++i) sum += (i % 2 == 1 ? 4.0 : 2.0) * f(i);
        out.quadrature = sum * h / 3.0;
    } else {
        for (std::size_t i = 1; i <= last; ++i) {
            out.quadrature += 0.5 * (tr.samples[i].state.t - tr.samples[i - 1].state.t) * (f(i) + f(i - 1));
        }
    }
    return out;
}

SpectrumResult run_linear_field_spectrum(const ModelParams& p, double m_hat_z, double gradient,
                                         const SpectrumConfig& cfg) {
    if (cfg.levels < 2 || cfg.grid_points < 4) {
        throw PreconditionError("spectrum: need at least 2 levels and 4 grid points");
    }
    SpectrumResult out;
    out.rule = cfg.rule;
    const double m_e = effective_mass(p, m_hat_z);
    out.omega = restoring_frequency(p, m_hat_z, gradient);
    out.hbar_omega = p.hbar * out.omega;
    const double rate = phase_rate_coefficient(p, m_hat_z);
    const double step = std::numbers::pi * rule_factor(cfg.rule);

    // Averaged-orbit estimate phase = 2 pi rate E / (m_e omega) only sets the grid.
    auto estimate = [&](double phase) { return phase * m_e * out.omega / (2.0 * std::numbers::pi * rate); };
    const double e_lo = estimate(0.5 * step);
    const double e_hi = estimate((cfg.levels + 0.5) * step);
    if (std::sqrt(2.0 * e_hi / m_e) >= p.max_speed()) {
        throw PreconditionError("spectrum: highest level would exceed the velocity ceiling");
    }

    auto phase_of = [&](double e) {
        const OrbitPhase ph = orbit_phase(p, m_hat_z, gradient, e, cfg.steps_per_period);
        out.max_azimuth_mismatch = std::max(out.max_azimuth_mismatch,
                                            std::abs(ph.azimuth - ph.quadrature) / ph.quadrature);
        return ph.quadrature;
    };

    out.grid_energy = linear_grid(e_lo, e_hi, cfg.grid_points);
    for (double e : out.grid_energy) out.grid_phase.push_back(phase_of(e));
    for (std::size_t i = 1; i < out.grid_phase.size(); ++i) {
        if (!(out.grid_phase[i] > out.grid_phase[i - 1])) {
            throw NumericError("spectrum: phase is not strictly increasing in energy; levels not extracted");
        }
    }

    for (int n = 1; n <= cfg.levels; ++n) {
        const double target = n * step;
        const auto it = std::upper_bound(out.grid_phase.begin(), out.grid_phase.end(), target);
        if (it == out.grid_phase.begin() || it == out.grid_phase.end()) {
            throw NumericError("spectrum: level outside the energy grid");
        }
        const std::size_t i = static_cast<std::size_t>(it - out.grid_phase.begin());
        const double level = numerics::bisect([&](double e) { return phase_of(e) - target; },
                                              out.grid_energy[i - 1], out.grid_energy[i], 1e-13 * e_hi);
        out.levels.push_back(level);
    }
    for (std::size_t i = 1; i < out.levels.size(); ++i) out.spacings.push_back(out.levels[i] - out.levels[i - 1]);
    return out;
}

}  // namespace freespiral
