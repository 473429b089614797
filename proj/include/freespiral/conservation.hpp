#pragma once

#include <optional>
#include <string>
#include <vector>

#include "freespiral/dynamics.hpp"

namespace freespiral {

struct ConservationTolerances {
    double drift = 1e-6;         ///< relative drift of conserved quantities
    double spin_norm = 1e-12;    ///< absolute | |m_hat| - 1 |
    double fd_residual = 1e-3;   ///< finite-difference dM/dt against P x v
};

struct Monitor {
    std::string name;
    double max_drift = 0.0;
    double tolerance = 0.0;
    bool pass = true;
};

struct ConservationReport {
    std::vector<Monitor> monitors;

    bool pass() const;
    /// Drift of a named monitor, if it was evaluated.
    std::optional<double> drift(const std::string& name) const;
};

/// Monitors chosen by field type:
///  - always: spin_norm, dM/dt residual (interior samples), energy T + e phi
///  - zero field: speed, m.v, P, J, T
///  - uniform field: P - eE t and J - integral of r x eE
ConservationReport conservation_report(const Trajectory& tr,
                                       const ConservationTolerances& tol = {});

/// Centered moving average of r and v over `window` (default: one period of
/// the first sample's free oscillation). Endpoints closer than window/2 to
/// either end are dropped. m_hat is taken from the center sample and
/// diagnostics are recomputed from the averaged kinematics.
Trajectory average_trajectory(const Trajectory& tr, std::optional<double> window = std::nullopt);

}  // namespace freespiral
