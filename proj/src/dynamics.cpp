#include "freespiral/dynamics.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>
#include <sstream>

#include "freespiral/errors.hpp"

namespace freespiral {

namespace {

// Phase-space point advanced by the integrator.
struct Point {
    Vec3 r, v, m;
};

struct Slope {
    Vec3 dr, dv, dm;
};

Point advance(const Point& y, const Slope& k, double h) {
    return {y.r + h * k.dr, y.v + h * k.dv, y.m + h * k.dm};
}

Derivative equations_of_motion(const ModelParams& p, const Vec3& r, const Vec3& v, const Vec3& m,
                               const FieldSpec& f) {
    const double k = p.kappa;
    const Vec3 E = f.at(r);
    const double m_dot_v = dot(m, v);
    const Vec3 m_cross_v = cross(m, v);

    Derivative d;
    d.dv_dt = (p.e_charge / (p.m0 * (1.0 + k))) * E
              + ((3.0 * k - 1.0) * p.e_charge * dot(m, E) / (2.0 * p.m0 * (1.0 - k * k))) * m
              - (p.m0 * (3.0 * k - 1.0) * (3.0 * k - 1.0) * m_dot_v * m_dot_v / (p.M0 * (1.0 + k)))
                    * m_cross_v;
    d.dm_dt = -(p.m0 * (3.0 * k - 1.0) * m_dot_v / p.M0) * m_cross_v;
    return d;
}

// Runge-Kutta stages leave the unit sphere at O(h^2), so no norm check here.
Slope slope(const ModelParams& p, const FieldSpec& f, const Point& y) {
    const Derivative d = equations_of_motion(p, y.r, y.v, y.m, f);
    return {y.v, d.dv_dt, d.dm_dt};
}

Point rk4_step(const ModelParams& p, const FieldSpec& f, const Point& y, double h) {
    const Slope k1 = slope(p, f, y);
    const Slope k2 = slope(p, f, advance(y, k1, 0.5 * h));
    const Slope k3 = slope(p, f, advance(y, k2, 0.5 * h));
    const Slope k4 = slope(p, f, advance(y, k3, h));
    const double w = h / 6.0;
    return {y.r + w * (k1.dr + 2.0 * k2.dr + 2.0 * k3.dr + k4.dr),
            y.v + w * (k1.dv + 2.0 * k2.dv + 2.0 * k3.dv + k4.dv),
            y.m + w * (k1.dm + 2.0 * k2.dm + 2.0 * k3.dm + k4.dm)};
}

Vec3 raw_momentum(const ModelParams& p, const Vec3& v, const Vec3& m) {
    return p.m0 * ((1.0 + p.kappa) * v - (3.0 * p.kappa - 1.0) * dot(m, v) * m);
}

void check_step(const Point& y, double t, double max_speed) {
    if (!is_finite(y.r) || !is_finite(y.v) || !is_finite(y.m)) {
        std::ostringstream os;
        os << "step instability: non-finite state at t = " << t;
        throw NumericError(os.str());
    }
    if (norm(y.v) >= max_speed) {
        std::ostringstream os;
        os << "velocity ceiling exceeded at t = " << t << " (|v| = " << norm(y.v) << ")";
        throw NumericError(os.str());
    }
}

}  // namespace

Derivative rhs(const ModelParams& p, const State& s, const FieldSpec& f) {
    if (std::abs(norm(s.m_hat) - 1.0) > 1e-6) {
        throw PreconditionError("rhs: m_hat must be a unit vector");
    }
    return equations_of_motion(p, s.r, s.v, s.m_hat, f);
}

double precession_rate(const ModelParams& p, const State& s) {
    const Vec3 P = raw_momentum(p, s.v, s.m_hat);
    return (3.0 * p.kappa - 1.0) * dot(s.m_hat, s.v) * norm(P) / (p.M0 * (1.0 + p.kappa));
}

State spiral_initial_conditions(const ModelParams& p, double m_hat_z, double v_z, double phase) {
    if (!(m_hat_z != 0.0 && std::abs(m_hat_z) <= 1.0)) {
        throw PreconditionError("spiral_initial_conditions: need 0 < |m_z| <= 1");
    }
    if (v_z == 0.0 || !std::isfinite(v_z)) {
        throw PreconditionError("spiral_initial_conditions: v_z must be nonzero");
    }
    const double G = compute_G(p.kappa);
    const double mu = std::sqrt(std::max(0.0, 1.0 - m_hat_z * m_hat_z));
    const Vec3 dir{std::cos(phase), std::sin(phase), 0.0};
    const Vec3 m_perp = mu * dir;
    const double c1 = m_hat_z * v_z / (G + m_hat_z * m_hat_z);

    State s;
    s.m_hat = Vec3{0.0, 0.0, m_hat_z} + m_perp;
    s.v = Vec3{0.0, 0.0, v_z} + c1 * m_perp;
    // Transverse displacement integrates c1 m_perp rotating at Omega_s:
    // amplitude c1 mu / Omega_s = M0 mu / (m_e v_z), lagging the spin by 90 degrees.
    const double offset = p.M0 * mu / (effective_mass(p, m_hat_z) * v_z);
    s.r = offset * Vec3{std::sin(phase), -std::cos(phase), 0.0};
    return s;
}

void IntegratorConfig::validate() const {
    if (steps_per_period < 16) throw PreconditionError("steps_per_period must be at least 16");
    if (dt_override && !(*dt_override > 0.0 && std::isfinite(*dt_override))) {
        throw PreconditionError("dt must be positive");
    }
    if (!(max_time > 0.0) || !std::isfinite(max_time)) throw PreconditionError("max_time must be positive");
    if (record_stride < 1) throw PreconditionError("record_stride must be at least 1");
    if (!(error_target > 1e-14 && error_target < 1e-4)) {
        throw PreconditionError("error target must lie in (1e-14, 1e-4)");
    }
}

Diagnostics diagnose(const ModelParams& p, const State& s) {
    Diagnostics d;
    d.P = raw_momentum(p, s.v, s.m_hat);
    d.M = p.M0 * s.m_hat;
    d.J = d.M + cross(s.r, d.P);
    d.speed = norm(s.v);
    d.s = dot(s.m_hat, s.v);
    d.T = 0.5 * dot(d.P, s.v);
    return d;
}

double default_time_step(const ModelParams& p, const State& s, const IntegratorConfig& cfg) {
    if (cfg.dt_override) return *cfg.dt_override;
    const double omega = precession_rate(p, s);
    if (omega == 0.0 || !std::isfinite(omega)) {
        throw PreconditionError("state has no free-oscillation time scale; set an explicit dt");
    }
    return 2.0 * std::numbers::pi / std::abs(omega) / cfg.steps_per_period;
}

Trajectory integrate(const ModelParams& p, const State& s0, const FieldSpec& f,
                     const IntegratorConfig& cfg) {
    cfg.validate();
    if (const ValidationReport report = validate_params(p, false); !report.valid()) {
        throw PreconditionError("integrate: " + report.to_string());
    }
    if (std::abs(norm(s0.m_hat) - 1.0) > 1e-9) {
        throw PreconditionError("integrate: initial m_hat must be a unit vector");
    }
    if (norm(s0.v) >= p.max_speed()) {
        throw PreconditionError("integrate: initial speed at or above the velocity ceiling");
    }

    Trajectory tr;
    tr.params = p;
    tr.field = f;
    const double dt0 = default_time_step(p, s0, cfg);
    tr.stats.dt_initial = dt0;

    auto record = [&](const Point& y, double t) {
        const State s{t, y.r, y.v, y.m};
        tr.samples.push_back({s, diagnose(p, s)});
    };
    auto finish_step = [&](Point& y) {
        const double drift = std::abs(norm(y.m) - 1.0);
        tr.stats.max_spin_drift_before_renorm = std::max(tr.stats.max_spin_drift_before_renorm, drift);
        if (cfg.renormalize_spin) y.m = normalized(y.m);
        ++tr.stats.steps;
    };

    Point y{s0.r, s0.v, s0.m_hat};
    record(y, s0.t);
    const double max_speed = p.max_speed();

    if (!cfg.adaptive) {
        const auto n_steps = static_cast<std::size_t>(std::ceil(cfg.max_time / dt0 - 1e-9));
        const double h = cfg.max_time / static_cast<double>(n_steps);
        tr.samples.reserve(n_steps / cfg.record_stride + 2);
        for (std::size_t i = 1; i <= n_steps; ++i) {
            y = rk4_step(p, f, y, h);
            const double t = s0.t + static_cast<double>(i) * h;
            check_step(y, t, max_speed);
            finish_step(y);
            if (i % cfg.record_stride == 0 || i == n_steps) record(y, t);
        }
        return tr;
    }

    // Step doubling with local extrapolation; the step is capped so that one
    // free-oscillation period never gets fewer than 16 steps.
    const double t_end = s0.t + cfg.max_time;
    double t = s0.t;
    double h = dt0;
    std::size_t accepted = 0;
    while (t < t_end) {
        const double omega = std::abs(precession_rate(p, State{t, y.r, y.v, y.m}));
        if (omega > 0.0) h = std::min(h, 2.0 * std::numbers::pi / omega / 16.0);
        const bool last = t + h >= t_end;
        if (last) h = t_end - t;

        const Point full = rk4_step(p, f, y, h);
        const Point half = rk4_step(p, f, rk4_step(p, f, y, 0.5 * h), 0.5 * h);
        const double v_scale = std::max(norm(half.v), 1e-300);
        const double err = std::max(norm(half.v - full.v) / v_scale, norm(half.m - full.m)) / 15.0;
        if (!std::isfinite(err)) throw NumericError("step instability: non-finite error estimate");

        if (err <= cfg.error_target || h <= 1e-12 * dt0) {
            y = {half.r + (half.r - full.r) / 15.0, half.v + (half.v - full.v) / 15.0,
                 half.m + (half.m - full.m) / 15.0};
            t = last ? t_end : t + h;
            check_step(y, t, max_speed);
            finish_step(y);
            ++accepted;
            if (accepted % cfg.record_stride == 0 || last) record(y, t);
            if (last) break;
        } else {
            ++tr.stats.rejected;
        }
        const double factor = err > 0.0 ? 0.9 * std::pow(cfg.error_target / err, 0.2) : 4.0;
        h *= std::clamp(factor, 0.2, 4.0);
    }
    return tr;
}

}  // namespace freespiral
