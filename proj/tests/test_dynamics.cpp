#include <cmath>
#include <numbers>
#include <random>
#include <sstream>

#include "doctest.h"
#include "freespiral/conservation.hpp"
#include "freespiral/dynamics.hpp"
#include "freespiral/errors.hpp"
#include "freespiral/trajectory_io.hpp"

using namespace freespiral;

namespace {

struct Canonical {
    ModelParams p = with_quantized_spin(ModelParams{});
    double mz = quantized_spin_projection(ModelParams{}).m_hat_z;
    double vz = 0.01;
    SpiralParams sp = spiral_params(p, mz, vz);
};

// Closed-form helix matching spiral_initial_conditions.
Vec3 helix_position(const Canonical& c, double phase, double t) {
    const double a = phase + c.sp.Omega_s * t;
    const double offset = c.p.M0 * std::sqrt(1.0 - c.mz * c.mz) / (c.sp.m_e * c.vz);
    return {offset * std::sin(a), -offset * std::cos(a), c.vz * t};
}

Vec3 random_unit(std::mt19937_64& rng) {
    std::normal_distribution<double> n;
    return normalized(Vec3{n(rng), n(rng), n(rng)});
}

IntegratorConfig periods(const SpiralParams& sp, double n, int spp = 200) {
    IntegratorConfig cfg;
    cfg.steps_per_period = spp;
    cfg.max_time = n * sp.period();
    return cfg;
}

}  // namespace

TEST_CASE("rhs straight-line cases") {
    const ModelParams p;
    const Vec3 m{0.0, 0.0, 1.0};
    for (const Vec3 v : {Vec3{0.0, 0.0, 0.02}, Vec3{0.02, -0.01, 0.0}}) {
        const Derivative d = rhs(p, State{0.0, {}, v, m}, FieldSpec::zero());
        CHECK(norm(d.dv_dt) == 0.0);
        CHECK(norm(d.dm_dt) == 0.0);
    }
    CHECK_THROWS_AS(rhs(p, State{0.0, {}, {}, {0.0, 0.0, 1.01}}, FieldSpec::zero()), PreconditionError);
}

TEST_CASE("rhs reproduces the momentum and angular momentum balance") {
    // Independent route: differentiate P(v, m) along the returned flow and
    // compare with dP/dt = eE and M0 dm/dt = P x v.
    std::mt19937_64 rng(3);
    std::uniform_real_distribution<double> u(-0.05, 0.05), kap(0.34, 0.98), pos(-50.0, 50.0);
    const FieldSpec fields[] = {FieldSpec::zero(), FieldSpec::uniform({1e-3, -2e-3, 5e-4}),
                                FieldSpec::linear_z(-3e-5), FieldSpec::periodic_z(2e-3, 17.0)};
    for (int i = 0; i < 400; ++i) {
        ModelParams p;
        p.kappa = kap(rng);
        p.M0 = 0.3 + std::abs(u(rng)) * 20.0;
        p.e_charge = -1.3;
        const State s{0.0, {pos(rng), pos(rng), pos(rng)}, {u(rng), u(rng), u(rng)}, random_unit(rng)};
        const FieldSpec& f = fields[i % 4];
        const Derivative d = rhs(p, s, f);

        const double sdot = dot(d.dm_dt, s.v) + dot(s.m_hat, d.dv_dt);
        const Vec3 dP = p.m0 * ((1.0 + p.kappa) * d.dv_dt
                                - (3.0 * p.kappa - 1.0) * (d.dm_dt * dot(s.m_hat, s.v) + sdot * s.m_hat));
        const Vec3 force = p.e_charge * f.at(s.r);
        const double scale = p.m0 * (norm(d.dv_dt) + norm(force / p.m0)) + 1e-30;
        CHECK(norm(dP - force) <= 1e-12 * scale);

        const Vec3 P = p.m0 * ((1.0 + p.kappa) * s.v - (3.0 * p.kappa - 1.0) * dot(s.m_hat, s.v) * s.m_hat);
        CHECK(norm(p.M0 * d.dm_dt - cross(P, s.v)) <= 1e-13 * norm(P) * norm(s.v) + 1e-30);

        // dm/dt is tangent to the unit sphere for every field
        CHECK(std::abs(dot(d.dm_dt, s.m_hat)) <= 1e-15 * (norm(d.dm_dt) + 1e-300));
        if (f.is_zero()) CHECK(std::abs(dot(d.dv_dt, s.v)) <= 1e-15 * norm(d.dv_dt) * norm(s.v) + 1e-300);
    }
}

TEST_CASE("spiral initial conditions sit on the steady spiral") {
    const Canonical c;
    const double phase = 0.7;
    const State s = spiral_initial_conditions(c.p, c.mz, c.vz, phase);
    const Diagnostics d = diagnose(c.p, s);
    CHECK(std::abs(norm(s.m_hat) - 1.0) < 1e-15);
    CHECK(std::hypot(d.P.x, d.P.y) < 1e-16);
    CHECK(d.P.z == doctest::Approx(c.sp.m_e * c.vz).epsilon(1e-14));
    CHECK(std::hypot(s.r.x, s.r.y) == doctest::Approx(c.sp.R_s).epsilon(1e-14));
    CHECK(precession_rate(c.p, s) == doctest::Approx(c.sp.Omega_s).epsilon(1e-13));

    // m_perp rotates rigidly about z at Omega_s, and v_perp follows it
    const Derivative der = rhs(c.p, s, FieldSpec::zero());
    const Vec3 m_perp{s.m_hat.x, s.m_hat.y, 0.0};
    CHECK(norm(der.dm_dt - c.sp.Omega_s * cross(Vec3{0, 0, 1}, m_perp)) < 1e-15 * norm(der.dm_dt) + 1e-20);
    const double c1 = c.mz * c.vz / (c.sp.G + c.mz * c.mz);
    CHECK(norm(der.dv_dt - c1 * der.dm_dt) < 1e-14 * norm(der.dv_dt));

    const State straight = spiral_initial_conditions(c.p, 1.0, c.vz, phase);
    CHECK(norm(straight.r) == 0.0);
    CHECK(straight.v == Vec3{0.0, 0.0, c.vz});
    CHECK(norm(rhs(c.p, straight, FieldSpec::zero()).dm_dt) == 0.0);

    CHECK_THROWS_AS(spiral_initial_conditions(c.p, 0.0, c.vz, 0.0), PreconditionError);
    CHECK_THROWS_AS(spiral_initial_conditions(c.p, c.mz, 0.0, 0.0), PreconditionError);
}

TEST_CASE("free spiral keeps v_z and m_z over 1000 periods") {
    const Canonical c;
    IntegratorConfig cfg = periods(c.sp, 1000, 800);
    cfg.record_stride = 80;
    const Trajectory tr = integrate(c.p, spiral_initial_conditions(c.p, c.mz, c.vz, 0.2), FieldSpec::zero(), cfg);
    double worst_v = 0.0, worst_m = 0.0;
    for (const auto& s : tr.samples) {
        worst_v = std::max(worst_v, std::abs(s.state.v.z / c.vz - 1.0));
        worst_m = std::max(worst_m, std::abs(s.state.m_hat.z / c.mz - 1.0));
    }
    CHECK(worst_v < 1e-8);
    CHECK(worst_m < 1e-8);
    CHECK(tr.samples.back().state.t == doctest::Approx(cfg.max_time).epsilon(1e-15));
}

TEST_CASE("uniform field adds the impulse eE t to P") {
    const Canonical c;
    const Vec3 E{2e-10, -1e-10, 3e-10};
    IntegratorConfig cfg = periods(c.sp, 20, 200);
    const Trajectory tr = integrate(c.p, spiral_initial_conditions(c.p, c.mz, c.vz, 0.0), FieldSpec::uniform(E), cfg);
    const Vec3 P0 = tr.samples.front().diag.P;
    for (const auto& s : tr.samples) {
        const Vec3 expected = P0 + c.p.e_charge * s.state.t * E;
        CHECK(norm(s.diag.P - expected) <= 1e-8 * norm(P0));
    }
    const ConservationReport rep = conservation_report(tr);
    CHECK(rep.drift("P_minus_impulse").value() < 1e-8);
    CHECK(rep.drift("J_minus_torque").value() < 1e-6);
    CHECK(rep.drift("energy").value() < 1e-6);
}

TEST_CASE("zero field from random states conserves speed and m.v") {
    std::mt19937_64 rng(21);
    std::uniform_real_distribution<double> u(-0.03, 0.03);
    for (int i = 0; i < 10; ++i) {
        ModelParams p;
        p.kappa = 0.45 + 0.05 * i;
        p.M0 = 0.8;
        State s0{0.0, {}, {u(rng), u(rng), u(rng) + 0.04}, random_unit(rng)};
        if (std::abs(precession_rate(p, s0)) == 0.0) continue;
        IntegratorConfig cfg;
        cfg.steps_per_period = 400;
        cfg.max_time = 20.0 * 2.0 * std::numbers::pi / std::abs(precession_rate(p, s0));
        cfg.record_stride = 5;
        const ConservationReport rep = conservation_report(integrate(p, s0, FieldSpec::zero(), cfg));
        CHECK(rep.drift("speed").value() < 1e-8);
        CHECK(rep.drift("m_dot_v").value() < 1e-8);
        CHECK(rep.drift("P").value() < 1e-8);
    }
}

TEST_CASE("time reversal returns to the start") {
    const Canonical c;
    const State s0 = spiral_initial_conditions(c.p, c.mz, c.vz, 1.1);
    const IntegratorConfig cfg = periods(c.sp, 10, 400);
    const State fwd = integrate(c.p, s0, FieldSpec::zero(), cfg).samples.back().state;
    const State flipped{0.0, fwd.r, -fwd.v, -fwd.m_hat};
    const State back = integrate(c.p, flipped, FieldSpec::zero(), cfg).samples.back().state;
    const double scale = norm(fwd.r - s0.r);
    CHECK(norm(back.r - s0.r) < 1e-8 * scale);
    CHECK(norm(-back.v - s0.v) < 1e-8 * norm(s0.v));
    CHECK(norm(-back.m_hat - s0.m_hat) < 1e-8);
}

TEST_CASE("fourth-order convergence against the analytic helix") {
    const Canonical c;
    const double phase = 0.4;
    auto error_at = [&](int spp) {
        IntegratorConfig cfg = periods(c.sp, 10, spp);
        const Trajectory tr = integrate(c.p, spiral_initial_conditions(c.p, c.mz, c.vz, phase), FieldSpec::zero(), cfg);
        const State& s = tr.samples.back().state;
        return norm(s.r - helix_position(c, phase, s.t));
    };
    const double e1 = error_at(50), e2 = error_at(100), e3 = error_at(200);
    CHECK(e1 / e2 >= 14.0);
    CHECK(e2 / e3 >= 14.0);
    CHECK(e1 / e2 <= 40.0);
}

TEST_CASE("spin norm drift before renormalization is high order in dt") {
    const Canonical c;
    auto drift = [&](int spp) {
        const IntegratorConfig cfg = periods(c.sp, 2, spp);
        return integrate(c.p, spiral_initial_conditions(c.p, c.mz, c.vz, 0.0), FieldSpec::zero(), cfg)
            .stats.max_spin_drift_before_renorm;
    };
    CHECK(drift(50) / drift(100) > 16.0);

    IntegratorConfig cfg = periods(c.sp, 5, 64);
    const Trajectory tr = integrate(c.p, spiral_initial_conditions(c.p, c.mz, c.vz, 0.0), FieldSpec::zero(), cfg);
    for (const auto& s : tr.samples) CHECK(std::abs(norm(s.state.m_hat) - 1.0) <= 1e-12);
    cfg.renormalize_spin = false;
    const Trajectory raw = integrate(c.p, spiral_initial_conditions(c.p, c.mz, c.vz, 0.0), FieldSpec::zero(), cfg);
    CHECK(std::abs(norm(raw.samples.back().state.m_hat) - 1.0) > 1e-12);
}

TEST_CASE("integrator failure modes") {
    const Canonical c;
    const State s0 = spiral_initial_conditions(c.p, c.mz, c.vz, 0.0);

    IntegratorConfig cfg = periods(c.sp, 50);
    cfg.dt_override = 100.0 * c.sp.period() / 200.0;
    CHECK_THROWS_AS(integrate(c.p, s0, FieldSpec::zero(), cfg), NumericError);

    IntegratorConfig strong = periods(c.sp, 5);
    CHECK_THROWS_AS(integrate(c.p, s0, FieldSpec::uniform({0.0, 0.0, 1.0}), strong), NumericError);

    IntegratorConfig bad = periods(c.sp, 1);
    bad.steps_per_period = 8;
    CHECK_THROWS_AS(integrate(c.p, s0, FieldSpec::zero(), bad), PreconditionError);
    bad = periods(c.sp, 1);
    bad.error_target = 1e-2;
    CHECK_THROWS_AS(integrate(c.p, s0, FieldSpec::zero(), bad), PreconditionError);

    ModelParams invalid = c.p;
    invalid.kappa = 0.2;
    CHECK_THROWS_AS(integrate(invalid, s0, FieldSpec::zero(), periods(c.sp, 1)), PreconditionError);

    // A state at rest has no free-oscillation time scale but is valid with an explicit dt.
    const State rest{0.0, {}, {}, {0.0, 0.0, 1.0}};
    IntegratorConfig at_rest;
    at_rest.max_time = 10.0;
    CHECK_THROWS_AS(integrate(c.p, rest, FieldSpec::zero(), at_rest), PreconditionError);
    at_rest.dt_override = 1.0;
    const Trajectory still = integrate(c.p, rest, FieldSpec::zero(), at_rest);
    CHECK(still.size() == 11);
    CHECK(norm(still.samples.back().state.r) == 0.0);
}

TEST_CASE("adaptive stepping follows a strong linear field") {
    const Canonical c;
    const double omega = 4.0 * std::abs(c.sp.Omega_s);
    const double gradient = -omega * omega * c.sp.m_e / c.p.e_charge;
    IntegratorConfig cfg;
    cfg.adaptive = true;
    cfg.error_target = 1e-11;
    cfg.max_time = 2.0 * std::numbers::pi / omega;
    cfg.record_stride = 4;
    const State s0 = spiral_initial_conditions(c.p, c.mz, c.vz, 0.0);
    const Trajectory tr = integrate(c.p, s0, FieldSpec::linear_z(gradient), cfg);
    const ConservationReport rep = conservation_report(tr);
    CHECK(rep.drift("energy").value() < 1e-7);
    // harmonic axial motion with mass m_e: back at z = 0 after one period
    CHECK(std::abs(tr.samples.back().state.r.z) < 1e-6 * c.vz / omega);
    CHECK(tr.samples.back().state.v.z == doctest::Approx(c.vz).epsilon(1e-7));
    CHECK(tr.samples.back().state.t == doctest::Approx(cfg.max_time).epsilon(1e-14));
}

TEST_CASE("trajectory CSV has 18 round-trippable columns") {
    const Canonical c;
    IntegratorConfig cfg = periods(c.sp, 1, 32);
    const Trajectory tr = integrate(c.p, spiral_initial_conditions(c.p, c.mz, c.vz, 0.3), FieldSpec::zero(), cfg);
    std::stringstream ss;
    write_trajectory_csv(ss, tr);
    const auto rows = read_csv_rows(ss, kTrajectoryCsvHeader);
    REQUIRE(rows.size() == tr.size());
    for (std::size_t i = 0; i < rows.size(); ++i) {
        REQUIRE(rows[i].size() == 18);
        const Sample& s = tr.samples[i];
        CHECK(rows[i][0] == s.state.t);
        CHECK(rows[i][3] == s.state.r.z);
        CHECK(rows[i][9] == s.state.m_hat.z);
        CHECK(rows[i][12] == s.diag.P.z);
        CHECK(rows[i][17] == s.diag.T);
    }
}

TEST_CASE("conservation report edge cases") {
    const Canonical c;
    const State s = spiral_initial_conditions(c.p, c.mz, c.vz, 0.0);
    Trajectory tr;
    tr.params = c.p;
    tr.samples = {{s, diagnose(c.p, s)}, {s, diagnose(c.p, s)}};
    tr.samples[1].state.t = 1.0;
    const ConservationReport rep = conservation_report(tr);
    for (const auto& m : rep.monitors) CHECK(m.max_drift == 0.0);
    CHECK(rep.pass());

    tr.samples.pop_back();
    CHECK_THROWS_AS(conservation_report(tr), PreconditionError);
}

TEST_CASE("dM/dt residual converges at second order in the record stride") {
    const Canonical c;
    IntegratorConfig cfg = periods(c.sp, 3, 400);
    const State s0 = spiral_initial_conditions(c.p, c.mz, c.vz, 0.0);
    auto residual = [&](int stride) {
        cfg.record_stride = stride;
        return conservation_report(integrate(c.p, s0, FieldSpec::zero(), cfg)).drift("dM_dt_residual").value();
    };
    const double r8 = residual(8), r4 = residual(4), r2 = residual(2);
    CHECK(r8 / r4 == doctest::Approx(4.0).epsilon(0.05));
    CHECK(r4 / r2 == doctest::Approx(4.0).epsilon(0.05));
}

TEST_CASE("averaging the free spiral leaves the axis") {
    const Canonical c;
    IntegratorConfig cfg = periods(c.sp, 6, 200);
    const Trajectory tr = integrate(c.p, spiral_initial_conditions(c.p, c.mz, c.vz, 0.9), FieldSpec::zero(), cfg);
    for (const double w : {c.sp.period(), 2.0 * c.sp.period()}) {
        const Trajectory avg = average_trajectory(tr, w);
        REQUIRE(avg.size() > 10);
        for (const auto& s : avg.samples) {
            CHECK(std::hypot(s.state.r.x, s.state.r.y) < 1e-6 * c.sp.R_s);
            CHECK(s.state.r.z == doctest::Approx(c.vz * s.state.t).epsilon(1e-9));
        }
        CHECK(avg.samples.front().state.t >= 0.5 * w - 1e-6 * w);
    }
    // default window is one period from the first sample
    CHECK(average_trajectory(tr).size() == average_trajectory(tr, c.sp.period()).size());
    CHECK_THROWS_AS(average_trajectory(tr, 10.0 * c.sp.period()), PreconditionError);
    CHECK_THROWS_AS(average_trajectory(tr, 0.5 * c.sp.period()), PreconditionError);
}

TEST_CASE("averaged motion in a weak transverse field has mass m_e") {
    const Canonical c;
    // curvature radius v^2 m_e / (eE) well above 100 R_s
    const double eE = 1e-10;
    CHECK(c.vz * c.vz * c.sp.m_e / eE > 100.0 * c.sp.R_s);
    IntegratorConfig cfg = periods(c.sp, 30, 64);
    const Trajectory tr = integrate(c.p, spiral_initial_conditions(c.p, c.mz, c.vz, 0.3),
                                    FieldSpec::uniform({eE / c.p.e_charge, 0.0, 0.0}), cfg);
    const Trajectory avg = average_trajectory(tr);
    // quadratic least squares on x(tau), tau = (t - t_mid) / t_half
    const double t_mid = 0.5 * (avg.samples.front().state.t + avg.samples.back().state.t);
    const double t_half = 0.5 * (avg.samples.back().state.t - avg.samples.front().state.t);
    double s[5] = {}, b[3] = {};
    for (const auto& smp : avg.samples) {
        const double t = (smp.state.t - t_mid) / t_half, x = smp.state.r.x;
        double tp = 1.0;
        for (int k = 0; k < 5; ++k) {
            s[k] += tp;
            if (k < 3) b[k] += tp * x;
            tp *= t;
        }
    }
    // solve the 3x3 normal equations by Cramer's rule
    auto det3 = [](double a, double b_, double c_, double d, double e, double f, double g, double h, double i) {
        return a * (e * i - f * h) - b_ * (d * i - f * g) + c_ * (d * h - e * g);
    };
    const double D = det3(s[0], s[1], s[2], s[1], s[2], s[3], s[2], s[3], s[4]);
    const double c2 = det3(s[0], s[1], b[0], s[1], s[2], b[1], s[2], s[3], b[2]) / D / (t_half * t_half);
    CHECK(2.0 * c2 == doctest::Approx(eE / c.sp.m_e).epsilon(0.01));
}
