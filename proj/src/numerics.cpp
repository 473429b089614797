#include "freespiral/numerics.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>

#include "freespiral/errors.hpp"

namespace freespiral::numerics {

CumulativeIntegral::CumulativeIntegral(std::vector<double> t, std::vector<Vec3> f)
    : t_(std::move(t)), f_(std::move(f)) {
    if (t_.size() != f_.size() || t_.size() < 2) {
        throw PreconditionError("CumulativeIntegral: need at least two matching samples");
    }
    cum_.resize(t_.size());
    cum_[0] = Vec3{};
    for (std::size_t i = 1; i < t_.size(); ++i) {
        cum_[i] = cum_[i - 1] + 0.5 * (t_[i] - t_[i - 1]) * (f_[i] + f_[i - 1]);
    }
}

Vec3 CumulativeIntegral::operator()(double time) const {
    if (time <= t_.front()) return Vec3{};
    if (time >= t_.back()) return cum_.back();
    const auto it = std::upper_bound(t_.begin(), t_.end(), time);
    const std::size_t i = static_cast<std::size_t>(it - t_.begin()) - 1;
    const double h = t_[i + 1] - t_[i];
    const double a = time - t_[i];
    // Exact integral of the linear interpolant over [t_i, time].
    const Vec3 slope = (f_[i + 1] - f_[i]) / h;
    return cum_[i] + a * f_[i] + 0.5 * a * a * slope;
}

LineFit fit_line(std::span<const double> x, std::span<const double> y) {
    const std::size_t n = x.size();
    if (n < 2 || y.size() != n) throw PreconditionError("fit_line: need at least two points");
    double mx = 0.0, my = 0.0;
    for (std::size_t i = 0; i < n; ++i) {
        mx += x[i];
        my += y[i];
    }
    mx /= static_cast<double>(n);
    my /= static_cast<double>(n);
    double sxx = 0.0, sxy = 0.0;
    for (std::size_t i = 0; i < n; ++i) {
        sxx += (x[i] - mx) * (x[i] - mx);
        sxy += (x[i] - mx) * (y[i] - my);
    }
    if (sxx == 0.0) throw PreconditionError("fit_line: abscissae are all equal");
    const double slope = sxy / sxx;
    return {slope, my - slope * mx};
}

std::vector<double> unwrap(std::span<const double> angles) {
    std::vector<double> out(angles.begin(), angles.end());
    double shift = 0.0;
    for (std::size_t i = 1; i < out.size(); ++i) {
        const double jump = angles[i] - angles[i - 1];
        if (jump > std::numbers::pi) shift -= 2.0 * std::numbers::pi;
        else if (jump < -std::numbers::pi) shift += 2.0 * std::numbers::pi;
        out[i] = angles[i] + shift;
    }
    return out;
}

double parabola_vertex(double x0, double y0, double x1, double y1, double x2, double y2) {
    const double d01 = (y1 - y0) / (x1 - x0);
    const double d12 = (y2 - y1) / (x2 - x1);
    const double curvature = (d12 - d01) / (x2 - x0);
    if (curvature == 0.0 || !std::isfinite(curvature)) return x1;
    // Newton form y0 + d01 (x - x0) + curvature (x - x0)(x - x1).
    return 0.5 * (x0 + x1) - d01 / (2.0 * curvature);
}

double bisect(const std::function<double(double)>& f, double lo, double hi, double x_tol,
              int max_iter) {
    double f_lo = f(lo);
    const double f_hi = f(hi);
    if (f_lo == 0.0) return lo;
    if (f_hi == 0.0) return hi;
    if ((f_lo > 0.0) == (f_hi > 0.0)) throw NumericError("bisect: root is not bracketed");
    for (int i = 0; i < max_iter && hi - lo > x_tol; ++i) {
        const double mid = 0.5 * (lo + hi);
        const double f_mid = f(mid);
        if (f_mid == 0.0) return mid;
        if ((f_mid > 0.0) == (f_lo > 0.0)) {
            lo = mid;
            f_lo = f_mid;
        } else {
            hi = mid;
        }
    }
    return 0.5 * (lo + hi);
}

}  // namespace freespiral::numerics
