#include "freespiral/helix.hpp"

#include <Eigen/Dense>
#include <cmath>
#include <numbers>
#include <vector>

#include "freespiral/errors.hpp"
#include "freespiral/numerics.hpp"

namespace freespiral {

namespace {

struct Basis {
    Vec3 e1, e2;
};

Basis transverse_basis(const Vec3& axis) {
    const Vec3 seed = std::abs(axis.x) < 0.9 ? Vec3{1.0, 0.0, 0.0} : Vec3{0.0, 1.0, 0.0};
    const Vec3 e1 = normalized(seed - dot(seed, axis) * axis);
    return {e1, cross(axis, e1)};
}

// Slope of the unwrapped angle of transverse vectors against time.
double phase_rate(const std::vector<double>& t, const std::vector<Vec3>& w, const Basis& b) {
    std::vector<double> phase(t.size());
    for (std::size_t i = 0; i < t.size(); ++i) phase[i] = std::atan2(dot(w[i], b.e2), dot(w[i], b.e1));
    return numerics::fit_line(t, numerics::unwrap(phase)).slope;
}

// Secular velocity from a least-squares fit r = c + V t + a cos(wt) + b sin(wt).
Vec3 secular_velocity(const std::vector<double>& t, const std::vector<Vec3>& r, double omega) {
    const std::size_t n = t.size();
    const double mid = 0.5 * (t.front() + t.back());
    const double half = 0.5 * (t.back() - t.front());
    Eigen::MatrixXd A(n, 4);
    Eigen::MatrixXd y(n, 3);
    for (std::size_t i = 0; i < n; ++i) {
        const double s = t[i] - mid;
        A.row(static_cast<Eigen::Index>(i)) << 1.0, s / half, std::cos(omega * s), std::sin(omega * s);
        y.row(static_cast<Eigen::Index>(i)) << r[i].x - r[0].x, r[i].y - r[0].y, r[i].z - r[0].z;
    }
    const Eigen::MatrixXd coef = A.colPivHouseholderQr().solve(y);
    return Vec3{coef(1, 0), coef(1, 1), coef(1, 2)} / half;
}

}  // namespace

HelixFit fit_helix(const Trajectory& tr) {
    if (!tr.field.is_zero()) throw PreconditionError("fit_helix: trajectory must be field-free");
    const std::size_t n = tr.samples.size();
    if (n < 8) throw PreconditionError("fit_helix: need at least 8 samples");

    std::vector<double> t(n);
    std::vector<Vec3> r(n), v(n);
    for (std::size_t i = 0; i < n; ++i) {
        t[i] = tr.samples[i].state.t;
        r[i] = tr.samples[i].state.r;
        v[i] = tr.samples[i].state.v;
    }

    HelixFit fit;
    const Vec3 v_mean = numerics::CumulativeIntegral(t, v).mean(t.front(), t.back());
    double spread = 0.0;
    for (const auto& vi : v) spread = std::max(spread, norm(vi - v_mean));
    if (spread <= 1e-12 * norm(v_mean) || spread == 0.0) {
        fit.degenerate = true;
        if (norm(v_mean) > 0.0) fit.axis = normalized(v_mean);
        fit.axial_speed = norm(v_mean);
        fit.center = r.front();
        return fit;
    }

    Vec3 axis = normalized(v_mean);
    double omega = 0.0;
    for (int iter = 0; iter < 4; ++iter) {
        const Basis b = transverse_basis(axis);
        std::vector<Vec3> v_perp(n);
        for (std::size_t i = 0; i < n; ++i) v_perp[i] = v[i] - dot(v[i], axis) * axis;
        omega = phase_rate(t, v_perp, b);
        if (std::abs(omega) * (t.back() - t.front()) < 6.0 * std::numbers::pi * (1.0 - 1e-9)) {
            throw PreconditionError("fit_helix: trajectory covers fewer than three turns");
        }
        axis = normalized(secular_velocity(t, r, omega));
    }
    const Basis b = transverse_basis(axis);

    // Algebraic circle fit: x^2 + y^2 + D x + E y + F = 0 in least squares.
    Eigen::MatrixXd A(n, 3);
    Eigen::VectorXd rhs(n);
    std::vector<double> x(n), y(n);
    for (std::size_t i = 0; i < n; ++i) {
        const Vec3 d = r[i] - r[0];
        x[i] = dot(d, b.e1);
        y[i] = dot(d, b.e2);
        const auto row = static_cast<Eigen::Index>(i);
        A.row(row) << x[i], y[i], 1.0;
        rhs(row) = -(x[i] * x[i] + y[i] * y[i]);
    }
    const Eigen::Vector3d c = A.colPivHouseholderQr().solve(rhs);
    const double cx = -0.5 * c(0);
    const double cy = -0.5 * c(1);
    fit.radius = std::sqrt(std::max(0.0, cx * cx + cy * cy - c(2)));

    std::vector<double> phase(n);
    double ss = 0.0;
    for (std::size_t i = 0; i < n; ++i) {
        const double dx = x[i] - cx, dy = y[i] - cy;
        const double dev = std::hypot(dx, dy) - fit.radius;
        ss += dev * dev;
        phase[i] = std::atan2(dy, dx);
    }
    fit.residual_rms = std::sqrt(ss / static_cast<double>(n));
    fit.omega = numerics::fit_line(t, numerics::unwrap(phase)).slope;
    fit.axis = axis;
    fit.center = r[0] + cx * b.e1 + cy * b.e2;
    fit.axial_speed = dot(secular_velocity(t, r, fit.omega), axis);
    fit.pitch = 2.0 * std::numbers::pi * fit.axial_speed / std::abs(fit.omega);
    return fit;
}

}  // namespace freespiral
