#include "freespiral/conservation.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>

#include "freespiral/errors.hpp"
#include "freespiral/numerics.hpp"

namespace freespiral {

bool ConservationReport::pass() const {
    return std::all_of(monitors.begin(), monitors.end(), [](const Monitor& m) { return m.pass; });
}

std::optional<double> ConservationReport::drift(const std::string& name) const {
    for (const auto& m : monitors) {
        if (m.name == name) return m.max_drift;
    }
    return std::nullopt;
}

namespace {

double scale_or(double value, double fallback) {
    return value > 0.0 ? value : fallback;
}

}  // namespace

ConservationReport conservation_report(const Trajectory& tr, const ConservationTolerances& tol) {
    if (tr.samples.size() < 2) throw PreconditionError("conservation_report: need at least two samples");

    ConservationReport report;
    auto add = [&](std::string name, double drift, double tolerance) {
        report.monitors.push_back({std::move(name), drift, tolerance, drift <= tolerance});
    };

    const ModelParams& p = tr.params;
    const auto& samples = tr.samples;
    const Sample& first = samples.front();
    const double t0 = first.state.t;

    double spin = 0.0;
    for (const auto& s : samples) spin = std::max(spin, std::abs(norm(s.state.m_hat) - 1.0));
    add("spin_norm", spin, tol.spin_norm);

    // Energy T + e phi(r); for a zero field this is T alone and is reported below.
    if (!tr.field.is_zero()) {
        auto energy = [&](const Sample& s) { return s.diag.T + p.e_charge * tr.field.potential(s.state.r); };
        const double e0 = energy(first);
        const double scale = scale_or(std::max(std::abs(e0), std::abs(first.diag.T)), 1.0);
        double drift = 0.0;
        for (const auto& s : samples) drift = std::max(drift, std::abs(energy(s) - e0) / scale);
        add("energy", drift, tol.drift);
    }

    if (tr.field.is_zero()) {
        const double speed0 = first.diag.speed;
        const double v_scale = scale_or(speed0, 1.0);
        const double p_scale = scale_or(norm(first.diag.P), 1.0);
        const double j_scale = std::max(norm(first.diag.J), std::abs(p.M0));
        const double t_scale = scale_or(std::abs(first.diag.T), 1.0);
        double d_speed = 0.0, d_s = 0.0, d_P = 0.0, d_J = 0.0, d_T = 0.0;
        for (const auto& s : samples) {
            d_speed = std::max(d_speed, std::abs(s.diag.speed - speed0) / v_scale);
            d_s = std::max(d_s, std::abs(s.diag.s - first.diag.s) / scale_or(std::abs(first.diag.s), v_scale));
            d_P = std::max(d_P, norm(s.diag.P - first.diag.P) / p_scale);
            d_J = std::max(d_J, norm(s.diag.J - first.diag.J) / j_scale);
            d_T = std::max(d_T, std::abs(s.diag.T - first.diag.T) / t_scale);
        }
        add("speed", d_speed, tol.drift);
        add("m_dot_v", d_s, tol.drift);
        add("P", d_P, tol.drift);
        add("J", d_J, tol.drift);
        add("T", d_T, tol.drift);
    } else if (const auto* uniform = std::get_if<UniformField>(&tr.field.variant())) {
        const Vec3 force = p.e_charge * uniform->E0;
        const double p_scale = scale_or(norm(first.diag.P), 1.0);
        const double j_scale = std::max(norm(first.diag.J), std::abs(p.M0));
        double d_P = 0.0, d_J = 0.0;
        Vec3 torque_integral{};
        Vec3 prev_torque = cross(first.state.r, force);
        for (std::size_t i = 0; i < samples.size(); ++i) {
            const Sample& s = samples[i];
            if (i > 0) {
                const Vec3 torque = cross(s.state.r, force);
                torque_integral += 0.5 * (s.state.t - samples[i - 1].state.t) * (torque + prev_torque);
                prev_torque = torque;
            }
            const Vec3 impulse = (s.state.t - t0) * force;
            d_P = std::max(d_P, norm(s.diag.P - first.diag.P - impulse) / p_scale);
            d_J = std::max(d_J, norm(s.diag.J - first.diag.J - torque_integral) / j_scale);
        }
        add("P_minus_impulse", d_P, tol.drift);
        add("J_minus_torque", d_J, tol.drift);
    }

    // Second-order finite difference of M against the torque-free balance dM/dt = P x v.
    double residual = 0.0;
    double torque_scale = 0.0;
    for (std::size_t i = 1; i + 1 < samples.size(); ++i) {
        const double hm = samples[i].state.t - samples[i - 1].state.t;
        const double hp = samples[i + 1].state.t - samples[i].state.t;
        if (hm <= 0.0 || hp <= 0.0) continue;
        const Vec3 dM = (hm * hm * samples[i + 1].diag.M - hp * hp * samples[i - 1].diag.M
                         + (hp * hp - hm * hm) * samples[i].diag.M)
                        / (hp * hm * (hp + hm));
        const Vec3 pxv = cross(samples[i].diag.P, samples[i].state.v);
        residual = std::max(residual, norm(dM - pxv));
        torque_scale = std::max(torque_scale, norm(pxv));
    }
    if (samples.size() > 2) {
        add("dM_dt_residual", torque_scale > 0.0 ? residual / torque_scale : residual, tol.fd_residual);
    }
    return report;
}

Trajectory average_trajectory(const Trajectory& tr, std::optional<double> window) {
    if (tr.samples.size() < 2) throw PreconditionError("average_trajectory: need at least two samples");
    const ModelParams& p = tr.params;
    const double omega = std::abs(precession_rate(p, tr.samples.front().state));
    const double period = omega > 0.0 ? 2.0 * std::numbers::pi / omega : 0.0;
    const double w = window.value_or(period);
    if (!(w > 0.0)) throw PreconditionError("average_trajectory: window must be positive");
    if (period > 0.0 && w < period * (1.0 - 1e-9)) {
        throw PreconditionError("average_trajectory: window shorter than one free-oscillation period");
    }
    if (tr.duration() < w) throw PreconditionError("average_trajectory: trajectory shorter than window");

    std::vector<double> t;
    std::vector<Vec3> r, v;
    t.reserve(tr.samples.size());
    r.reserve(tr.samples.size());
    v.reserve(tr.samples.size());
    for (const auto& s : tr.samples) {
        t.push_back(s.state.t);
        r.push_back(s.state.r);
        v.push_back(s.state.v);
    }
    const numerics::CumulativeIntegral r_int(t, r);
    const numerics::CumulativeIntegral v_int(t, v);

    Trajectory out;
    out.params = tr.params;
    out.field = tr.field;
    out.stats = tr.stats;
    const double half = 0.5 * w;
    const double slack = 1e-12 * std::max(std::abs(t.back()), w);
    for (const auto& s : tr.samples) {
        const double tc = s.state.t;
        if (tc - half < t.front() - slack || tc + half > t.back() + slack) continue;
        const double a = std::max(tc - half, t.front());
        const double b = std::min(tc + half, t.back());
        State avg{tc, r_int.mean(a, b), v_int.mean(a, b), s.state.m_hat};
        out.samples.push_back({avg, diagnose(p, avg)});
    }
    return out;
}

}  // namespace freespiral
