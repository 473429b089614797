#pragma once

#include "freespiral/dynamics.hpp"
#include "freespiral/vec3.hpp"

namespace freespiral {

struct HelixFit {
    Vec3 axis{0.0, 0.0, 1.0};  ///< unit vector along the mean velocity
    Vec3 center;               ///< a point on the fitted axis (at the first sample)
    double radius = 0.0;
    double omega = 0.0;        ///< rotation rate about `axis` (right-handed)
    double pitch = 0.0;        ///< 2 pi axial speed / |omega|
    double axial_speed = 0.0;
    double residual_rms = 0.0; ///< RMS distance of samples from the fitted circle
    bool degenerate = false;   ///< straight line: radius 0, omega and pitch undefined (0)
};

/// Fits a helix to the recorded positions. The axis is the mean velocity over
/// a whole number of turns; the transverse circle is an algebraic least-squares
/// fit; the rate is a linear regression of the unwrapped transverse phase.
/// Requires at least three turns of a field-free trajectory.
HelixFit fit_helix(const Trajectory& tr);

}  // namespace freespiral
