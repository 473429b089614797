#pragma once

#include <cstddef>
#include <optional>
#include <vector>

#include "freespiral/field.hpp"
#include "freespiral/model.hpp"
#include "freespiral/vec3.hpp"

namespace freespiral {

/// Kinematic state of the model's charge center.
struct State {
    double t = 0.0;
    Vec3 r;
    Vec3 v;
    Vec3 m_hat{0.0, 0.0, 1.0};  ///< unit symmetry axis ("spin direction")
};

struct Derivative {
    Vec3 dv_dt;
    Vec3 dm_dt;
};

/// Equations of motion for velocity and spin direction, field taken at s.r.
Derivative rhs(const ModelParams& p, const State& s, const FieldSpec& f);

/// Precession rate of m_hat about the momentum, (3k-1)(m.v)|P| / (M0 (1+k)).
/// On a free spiral this is Omega_s; zero for straight-line states.
double precession_rate(const ModelParams& p, const State& s);

/// A state on the exact free spiral about the z axis. The transverse spin
/// component points at azimuth `phase`; the axis passes through the origin.
State spiral_initial_conditions(const ModelParams& p, double m_hat_z, double v_z, double phase);

struct IntegratorConfig {
    int steps_per_period = 200;
    std::optional<double> dt_override;
    double max_time = 0.0;
    int record_stride = 1;
    bool renormalize_spin = true;
    bool adaptive = false;
    double error_target = 1e-10;

    /// Throws PreconditionError on out-of-range settings.
    void validate() const;
};

/// Quantities monitored along a run.
struct Diagnostics {
    Vec3 P;           ///< field momentum
    Vec3 M;           ///< intrinsic angular momentum M0 m_hat
    Vec3 J;           ///< M + r x P
    double speed = 0.0;
    double s = 0.0;   ///< m_hat . v
    double T = 0.0;   ///< P . v / 2
};

Diagnostics diagnose(const ModelParams& p, const State& s);

struct Sample {
    State state;
    Diagnostics diag;
};

struct IntegrationStats {
    std::size_t steps = 0;
    std::size_t rejected = 0;
    double dt_initial = 0.0;
    /// Largest | |m_hat| - 1 | seen before renormalization.
    double max_spin_drift_before_renorm = 0.0;
};

struct Trajectory {
    ModelParams params;
    FieldSpec field;
    std::vector<Sample> samples;
    IntegrationStats stats;

    std::size_t size() const { return samples.size(); }
    double duration() const {
        return samples.empty() ? 0.0 : samples.back().state.t - samples.front().state.t;
    }
};

/// Default step: one free-oscillation period over steps_per_period, using the
/// state's precession rate. Throws if the state has no natural time scale.
double default_time_step(const ModelParams& p, const State& s, const IntegratorConfig& cfg);

/// Classical fourth-order Runge-Kutta, fixed step or step doubling.
/// Throws NumericError on non-finite state or when |v| reaches the ceiling.
Trajectory integrate(const ModelParams& p, const State& s0, const FieldSpec& f,
                     const IntegratorConfig& cfg);

}  // namespace freespiral
