#pragma once

#include <cstddef>
#include <functional>
#include <span>
#include <vector>

#include "freespiral/vec3.hpp"

namespace freespiral::numerics {

/// Running trapezoid integral of a sampled vector function, queried at any
/// time inside the sampled range through its piecewise-linear interpolant.
class CumulativeIntegral {
public:
    CumulativeIntegral(std::vector<double> t, std::vector<Vec3> f);

    /// Integral from t.front() to `time`.
    Vec3 operator()(double time) const;
    /// Mean value over [a, b].
    Vec3 mean(double a, double b) const { return ((*this)(b) - (*this)(a)) / (b - a); }

    double front() const { return t_.front(); }
    double back() const { return t_.back(); }

private:
    std::vector<double> t_;
    std::vector<Vec3> f_;
    std::vector<Vec3> cum_;
};

struct LineFit {
    double slope = 0.0;
    double intercept = 0.0;
};

/// Ordinary least squares y = slope x + intercept (centered sums).
LineFit fit_line(std::span<const double> x, std::span<const double> y);

/// Removes 2 pi jumps between consecutive angles.
std::vector<double> unwrap(std::span<const double> angles);

/// Vertex abscissa of the parabola through three points; falls back to the
/// middle abscissa when the points are collinear.
double parabola_vertex(double x0, double y0, double x1, double y1, double x2, double y2);

/// Root of f on [lo, hi] by bisection; f(lo) and f(hi) must differ in sign.
double bisect(const std::function<double(double)>& f, double lo, double hi, double x_tol,
              int max_iter = 200);

}  // namespace freespiral::numerics
