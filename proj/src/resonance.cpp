#include <algorithm>
#include <cmath>
#include <numbers>
#include <optional>
#include <sstream>

#include "freespiral/errors.hpp"
#include "freespiral/experiments.hpp"
#include "freespiral/numerics.hpp"
#include "freespiral/parallel.hpp"
#include "freespiral/random.hpp"

namespace freespiral {

namespace {

Vec3 rotate_about_x(const Vec3& a, double angle) {
    const double c = std::cos(angle), s = std::sin(angle);
    return {a.x, c * a.y - s * a.z, s * a.y + c * a.z};
}

State tilted_spiral(const ModelParams& p, double m_hat_z, double v_z, double phase, double tilt) {
    State s = spiral_initial_conditions(p, m_hat_z, v_z, phase);
    s.r = rotate_about_x(s.r, tilt);
    s.v = rotate_about_x(s.v, tilt);
    s.m_hat = rotate_about_x(s.m_hat, tilt);
    return s;
}

// Slope of the transverse kinetic scalar m0 (1 + kappa) |v_perp|^2 / 2 about
// `axis`, in units of its initial value per free period. (P has no
// transverse part on the free spiral, so P.v cannot serve here.)
double transverse_growth(const Trajectory& tr, const Vec3& axis, double period) {
    const double mass = tr.params.m0 * (1.0 + tr.params.kappa);
    std::vector<double> t, k;
    t.reserve(tr.size());
    k.reserve(tr.size());
    for (const auto& s : tr.samples) {
        const Vec3 v = s.state.v - dot(s.state.v, axis) * axis;
        t.push_back(s.state.t);
        k.push_back(0.5 * mass * dot(v, v));
    }
    return numerics::fit_line(t, k).slope * period / k.front();
}

}  // namespace

std::vector<double> linear_grid(double lo, double hi, int count) {
    if (count < 2 || !(hi > lo)) throw PreconditionError("linear_grid: need count >= 2 and hi > lo");
    std::vector<double> g(static_cast<std::size_t>(count));
    for (int i = 0; i < count; ++i) g[static_cast<std::size_t>(i)] = lo + (hi - lo) * i / (count - 1);
    return g;
}

std::vector<double> wavenumber_sweep(double lo, double hi, double length) {
    if (!(lo > 0.0) || !(hi > lo) || !(length > 0.0)) {
        throw PreconditionError("wavenumber_sweep: need 0 < lo < hi and a positive length");
    }
    const double k_lo = 1.0 / hi, k_hi = 1.0 / lo;
    const auto count = static_cast<int>(std::ceil((k_hi - k_lo) * length)) + 1;
    std::vector<double> out;
    for (int i = count - 1; i >= 0; --i) out.push_back(1.0 / (k_lo + (k_hi - k_lo) * i / (count - 1)));
    return out;
}

double max_response_near(const ResonanceCurve& curve, double lambda, double fraction) {
    double best = 0.0;
    for (std::size_t i = 0; i < curve.lambda_f.size(); ++i) {
        if (std::abs(curve.lambda_f[i] - lambda) <= fraction * lambda) best = std::max(best, curve.response[i]);
    }
    return best;
}

double ResonanceCurve::response_at(double lambda) const {
    if (lambda_f.empty()) throw PreconditionError("response_at: empty curve");
    if (lambda <= lambda_f.front()) return response.front();
    if (lambda >= lambda_f.back()) return response.back();
    const auto it = std::upper_bound(lambda_f.begin(), lambda_f.end(), lambda);
    const std::size_t i = static_cast<std::size_t>(it - lambda_f.begin());
    const double w = (lambda - lambda_f[i - 1]) / (lambda_f[i] - lambda_f[i - 1]);
    return (1.0 - w) * response[i - 1] + w * response[i];
}

ResonanceCurve run_periodic_field_resonance(const ModelParams& p, double m_hat_z, double v_z,
                                            double amplitude, std::vector<double> sweep,
                                            const ResonanceConfig& cfg) {
    if (sweep.size() < 3) throw PreconditionError("resonance: sweep needs at least three wavelengths");
    for (std::size_t i = 0; i < sweep.size(); ++i) {
        if (!(sweep[i] > 0.0) || (i > 0 && !(sweep[i] > sweep[i - 1]))) {
            throw PreconditionError("resonance: sweep must be positive and strictly increasing");
        }
    }
    if (cfg.phases < 1 || cfg.refine_points < 0 || !(cfg.length_in_pitches > 0.0)) {
        throw PreconditionError("resonance: phases >= 1, refine_points >= 0 and a positive length required");
    }
    if (!(std::abs(cfg.tilt) < 0.5 * std::numbers::pi)) throw PreconditionError("resonance: |tilt| must be below pi/2");
    if (!std::isfinite(amplitude)) throw PreconditionError("resonance: amplitude must be finite");

    const SpiralParams sp = spiral_params(p, m_hat_z, v_z);
    if (sp.R_s == 0.0) throw PreconditionError("resonance: needs a spiral with |m_z| < 1");
    ResonanceCurve curve;
    curve.lambda_0 = sp.lambda_0;
    curve.lambda_s = sp.lambda_s;
    curve.interaction_length = cfg.length_in_pitches * sp.lambda_s;

    const double period = sp.period();
    const double kick = std::abs(p.e_charge * amplitude) * period / sp.m_e;
    if (kick >= 0.01 * std::abs(v_z)) {
        std::ostringstream os;
        os << "non-perturbative amplitude: velocity change per free period " << kick / std::abs(v_z)
           << " of v_z exceeds 1%";
        curve.warnings.push_back(os.str());
    }

    const auto u = uniform_pair(draw_block(cfg.seed, 1, 0));
    const std::size_t n_phase = static_cast<std::size_t>(cfg.phases);
    std::vector<double> phases(n_phase);
    for (std::size_t j = 0; j < n_phase; ++j) {
        phases[j] = cfg.phase_offset
                    + 2.0 * std::numbers::pi * (static_cast<double>(j) + u[0]) / static_cast<double>(n_phase);
    }

    IntegratorConfig icfg;
    icfg.steps_per_period = cfg.steps_per_period;
    icfg.max_time = curve.interaction_length / (std::abs(v_z) * std::cos(cfg.tilt));
    icfg.record_stride = std::max(1, cfg.steps_per_period / 16);

    std::vector<State> starts(n_phase);
    std::vector<Vec3> axes(n_phase);
    for (std::size_t j = 0; j < n_phase; ++j) {
        starts[j] = tilted_spiral(p, m_hat_z, v_z, phases[j], cfg.tilt);
        axes[j] = normalized(diagnose(p, starts[j]).P);
    }

    // Work items: one per (wavelength, phase); the free runs come first.
    auto run_items = [&](const std::vector<double>& lambdas, bool free_run) {
        const std::size_t n_lambda = free_run ? 1 : lambdas.size();
        std::vector<double> growth(n_lambda * n_phase);
        parallel_chunks(growth.size(), cfg.threads, [&](std::size_t, std::size_t begin, std::size_t end) {
            for (std::size_t item = begin; item < end; ++item) {
                const std::size_t j = item % n_phase;
                const FieldSpec f = free_run ? FieldSpec::zero()
                                             : FieldSpec::periodic_z(amplitude, lambdas[item / n_phase]);
                const Trajectory tr = integrate(p, starts[j], f, icfg);
                growth[item] = transverse_growth(tr, axes[j], period);
            }
        });
        return growth;
    };
    const std::vector<double> baseline = run_items({}, true);

    auto evaluate = [&](const std::vector<double>& lambdas, std::vector<double>& resp, std::vector<double>& err) {
        const std::vector<double> growth = run_items(lambdas, false);
        resp.assign(lambdas.size(), 0.0);
        err.assign(lambdas.size(), 0.0);
        for (std::size_t i = 0; i < lambdas.size(); ++i) {
            double m2 = 0.0, m4 = 0.0;
            for (std::size_t j = 0; j < n_phase; ++j) {
                const double x = growth[i * n_phase + j] - baseline[j];
                m2 += x * x;
                m4 += x * x * x * x;
            }
            m2 /= static_cast<double>(n_phase);
            m4 /= static_cast<double>(n_phase);
            resp[i] = std::sqrt(m2);
            if (resp[i] > 0.0 && n_phase > 1) {
                const double var2 = std::max(0.0, m4 - m2 * m2) / static_cast<double>(n_phase - 1);
                err[i] = std::sqrt(var2) / (2.0 * resp[i]);
            }
        }
    };

    curve.lambda_f = std::move(sweep);
    evaluate(curve.lambda_f, curve.response, curve.std_error);

    auto argmax = [&] {
        return static_cast<std::size_t>(
            std::max_element(curve.response.begin(), curve.response.end()) - curve.response.begin());
    };
    std::size_t imax = argmax();
    if (curve.response[imax] <= 0.0) return curve;

    if (imax > 0 && imax + 1 < curve.lambda_f.size() && cfg.refine_points > 0) {
        const double lo = curve.lambda_f[imax - 1], hi = curve.lambda_f[imax + 1];
        std::vector<double> extra;
        for (int i = 1; i <= cfg.refine_points; ++i) {
            const double x = lo + (hi - lo) * i / (cfg.refine_points + 1);
            if (x != curve.lambda_f[imax]) extra.push_back(x);
        }
        std::vector<double> resp, err;
        evaluate(extra, resp, err);
        for (std::size_t i = 0; i < extra.size(); ++i) {
            const auto it = std::lower_bound(curve.lambda_f.begin(), curve.lambda_f.end(), extra[i]);
            const auto pos = it - curve.lambda_f.begin();
            curve.lambda_f.insert(it, extra[i]);
            curve.response.insert(curve.response.begin() + pos, resp[i]);
            curve.std_error.insert(curve.std_error.begin() + pos, err[i]);
        }
        imax = argmax();
    }

    curve.peak_found = true;
    curve.peak_response = curve.response[imax];
    if (imax == 0 || imax + 1 == curve.lambda_f.size()) {
        curve.peak_lambda_f = curve.lambda_f[imax];
        curve.warnings.push_back("maximum response at the edge of the sweep");
    } else {
        curve.peak_lambda_f = numerics::parabola_vertex(
            curve.lambda_f[imax - 1], curve.response[imax - 1], curve.lambda_f[imax], curve.response[imax],
            curve.lambda_f[imax + 1], curve.response[imax + 1]);
    }

    const double half = 0.5 * curve.peak_response;
    std::optional<double> left, right;
    for (std::size_t i = imax; i > 0; --i) {
        if (curve.response[i - 1] < half) {
            const double w = (half - curve.response[i - 1]) / (curve.response[i] - curve.response[i - 1]);
            left = curve.lambda_f[i - 1] + w * (curve.lambda_f[i] - curve.lambda_f[i - 1]);
            break;
        }
    }
    for (std::size_t i = imax; i + 1 < curve.lambda_f.size(); ++i) {
        if (curve.response[i + 1] < half) {
            const double w = (curve.response[i] - half) / (curve.response[i] - curve.response[i + 1]);
            right = curve.lambda_f[i] + w * (curve.lambda_f[i + 1] - curve.lambda_f[i]);
            break;
        }
    }
    if (left && right) curve.peak_width = *right - *left;
    return curve;
}

}  // namespace freespiral
