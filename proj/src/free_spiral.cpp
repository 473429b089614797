#include <Eigen/Dense>
#include <cmath>
#include <numbers>

#include "freespiral/errors.hpp"
#include "freespiral/experiments.hpp"
#include "freespiral/numerics.hpp"

namespace freespiral {

FreeSpiralResult run_free_spiral(const ModelParams& p, double m_hat_z, double v_z, double periods,
                                 IntegratorConfig cfg, const ConservationTolerances& tol, double phase) {
    if (!(periods > 0.0) || !std::isfinite(periods)) {
        throw PreconditionError("run_free_spiral: periods must be positive");
    }
    FreeSpiralResult out;
    out.predicted = spiral_params(p, m_hat_z, v_z);
    const State s0 = spiral_initial_conditions(p, m_hat_z, v_z, phase);
    if (out.predicted.R_s == 0.0) {
        const double unit = out.predicted.lambda_0 / std::abs(v_z);
        if (!cfg.dt_override) cfg.dt_override = unit / cfg.steps_per_period;
        cfg.max_time = periods * unit;
    } else {
        cfg.max_time = periods * out.predicted.period();
    }
    out.trajectory = integrate(p, s0, FieldSpec::zero(), cfg);
    out.fit = fit_helix(out.trajectory);
    out.conservation = conservation_report(out.trajectory, tol);
    return out;
}

SpiralMismatch compare_fit(const SpiralParams& predicted, const HelixFit& fit) {
    auto rel = [](double got, double want) {
        return want != 0.0 ? std::abs(got - want) / std::abs(want) : std::abs(got);
    };
    SpiralMismatch m;
    m.radius = rel(fit.radius, predicted.R_s);
    if (predicted.R_s == 0.0) return m;
    m.omega = rel(std::abs(fit.omega), std::abs(predicted.Omega_s));
    m.pitch = rel(fit.pitch, predicted.lambda_s);
    return m;
}

AveragedMotion run_averaged_motion(const ModelParams& p, double m_hat_z, double v_z, double field_x,
                                   double periods, int steps_per_period) {
    if (field_x == 0.0 || !std::isfinite(field_x)) throw PreconditionError("run_averaged_motion: field must be nonzero");
    const SpiralParams sp = spiral_params(p, m_hat_z, v_z);
    AveragedMotion out;
    out.R_s = sp.R_s;
    out.expected_acceleration = p.e_charge * field_x / sp.m_e;
    out.curvature_radius = v_z * v_z / std::abs(out.expected_acceleration);

    IntegratorConfig cfg;
    cfg.steps_per_period = steps_per_period;
    cfg.max_time = periods * sp.period();
    const Trajectory tr = integrate(p, spiral_initial_conditions(p, m_hat_z, v_z, 0.3),
                                    FieldSpec::uniform({field_x, 0.0, 0.0}), cfg);
    const Trajectory avg = average_trajectory(tr);

    // Quadratic least squares in normalized time tau = (t - t_mid) / t_half.
    const double t_mid = 0.5 * (avg.samples.front().state.t + avg.samples.back().state.t);
    const double t_half = 0.5 * avg.duration();
    const auto n = static_cast<Eigen::Index>(avg.size());
    Eigen::MatrixXd A(n, 3);
    Eigen::VectorXd x(n);
    for (Eigen::Index i = 0; i < n; ++i) {
        const auto& s = avg.samples[static_cast<std::size_t>(i)].state;
        const double tau = (s.t - t_mid) / t_half;
        A.row(i) << 1.0, tau, tau * tau;
        x(i) = s.r.x;
    }
    const Eigen::Vector3d c = A.colPivHouseholderQr().solve(x);
    out.fitted_acceleration = 2.0 * c(2) / (t_half * t_half);
    return out;
}

PhaseComparison phase_comparison(const ModelParams& p, double m_hat_z, double v_z, double distance) {
    if (!(distance >= 0.0) || !std::isfinite(distance)) {
        throw PreconditionError("phase_comparison: distance must be non-negative");
    }
    const SpiralParams s = spiral_params(p, m_hat_z, v_z);
    const double speed = std::abs(v_z);
    PhaseComparison out;
    out.phi_free = std::abs(s.Omega_s) * distance / speed;
    out.phi_quasiclassical = s.m_e * speed * distance / p.hbar;
    // The ratio does not depend on the distance, so it is reported for L = 0 too.
    out.ratio = std::abs(s.Omega_s) * p.hbar / (s.m_e * speed * speed);
    out.ratio_half_turn = 2.0 * out.ratio;
    return out;
}

double measured_free_phase(const ModelParams& p, double m_hat_z, double v_z, double distance,
                           int steps_per_period) {
    if (!(distance > 0.0)) throw PreconditionError("measured_free_phase: distance must be positive");
    IntegratorConfig cfg;
    cfg.steps_per_period = steps_per_period;
    cfg.max_time = distance / std::abs(v_z);
    const Trajectory tr = integrate(p, spiral_initial_conditions(p, m_hat_z, v_z, 0.0), FieldSpec::zero(), cfg);
    std::vector<double> azimuth;
    azimuth.reserve(tr.size());
    for (const auto& s : tr.samples) azimuth.push_back(std::atan2(s.state.m_hat.y, s.state.m_hat.x));
    const std::vector<double> unwrapped = numerics::unwrap(azimuth);
    return std::abs(unwrapped.back() - unwrapped.front());
}

}  // namespace freespiral
