#include <algorithm>
#include <cmath>
#include <numbers>

#include "freespiral/constants.hpp"
#include "freespiral/errors.hpp"
#include "freespiral/experiments.hpp"
#include "freespiral/numerics.hpp"
#include "freespiral/parallel.hpp"
#include "freespiral/random.hpp"

namespace freespiral {

namespace {

constexpr double kTwoPi = 2.0 * std::numbers::pi;

// Largest distance from the hole axis reached by the charge circling at
// radius R about an axis at distance d, azimuth alpha, over a turn of
// angle `arc` starting at azimuth `phase` in direction `sign`.
double max_excursion(double d, double alpha, double R, double phase, int sign, double arc) {
    if (arc >= kTwoPi) return d + R;
    double start = std::fmod(phase - alpha, kTwoPi);
    if (start < 0.0) start += kTwoPi;
    const bool crosses = sign > 0 ? (start == 0.0 || start + arc >= kTwoPi) : (start - arc <= 0.0);
    if (crosses) return d + R;
    auto dist = [&](double psi) { return std::sqrt(d * d + R * R + 2.0 * d * R * std::cos(psi)); };
    return std::max(dist(start), dist(start + sign * arc));
}

}  // namespace

std::string model_tag(ElectronModel model) {
    switch (model) {
        case ElectronModel::PointClassical: return "point-classical";
        case ElectronModel::DiffractionBaseline: return "diffraction-baseline";
        case ElectronModel::FreeSpiral: return "free-spiral";
    }
    return "unknown";
}

ElectronModel parse_model(const std::string& tag) {
    if (tag == "point-classical") return ElectronModel::PointClassical;
    if (tag == "diffraction-baseline") return ElectronModel::DiffractionBaseline;
    if (tag == "free-spiral") return ElectronModel::FreeSpiral;
    throw PreconditionError("unknown electron model '" + tag +
                            "' (point-classical | diffraction-baseline | free-spiral)");
}

void FilterConfig::validate() const {
    if (!(hole_diameter > 0.0) || !std::isfinite(hole_diameter)) throw PreconditionError("filter: hole diameter must be positive");
    if (!(thickness > 0.0) || !std::isfinite(thickness)) throw PreconditionError("filter: thickness must be positive");
    if (cell_pitch < 0.0 || pitch() < hole_diameter) throw PreconditionError("filter: cell pitch must be at least the hole diameter");
    if (n_samples == 0) throw PreconditionError("filter: n_samples must be positive");
    if (energies_eV.empty()) throw PreconditionError("filter: energy grid is empty");
    for (double e : energies_eV) {
        if (!(e > 0.0) || !std::isfinite(e)) throw PreconditionError("filter: energies must be positive");
    }
    if (spin_sign < -1 || spin_sign > 1) throw PreconditionError("filter: spin_sign must be -1, 0 or +1");
}

std::vector<double> log_energy_grid(double lo_eV, double hi_eV, int per_decade) {
    if (!(lo_eV > 0.0) || !(hi_eV > lo_eV) || per_decade < 1) {
        throw PreconditionError("log_energy_grid: need 0 < lo < hi and per_decade >= 1");
    }
    const double a = std::log10(lo_eV), b = std::log10(hi_eV);
    const auto count = static_cast<int>(std::lround((b - a) * per_decade));
    std::vector<double> grid;
    for (int i = 0; i <= count; ++i) grid.push_back(std::pow(10.0, a + static_cast<double>(i) / per_decade));
    return grid;
}

double speed_from_energy(const ModelParams& p, double m_hat_z, double energy_eV) {
    return std::sqrt(2.0 * energy_eV * cgs::electron_volt / effective_mass(p, m_hat_z));
}

double spiral_cutoff_energy(const ModelParams& p, double m_hat_z, double hole_diameter) {
    auto excess = [&](double log_e) {
        const double v = speed_from_energy(p, m_hat_z, std::pow(10.0, log_e));
        return spiral_params(p, m_hat_z, v).R_s - 0.5 * hole_diameter;
    };
    double lo = -15.0, hi = 3.0;
    if (excess(lo) <= 0.0 || excess(hi) >= 0.0) {
        throw NumericError("spiral_cutoff_energy: cutoff outside 1e-15 .. 1e3 eV");
    }
    return std::pow(10.0, numerics::bisect(excess, lo, hi, 1e-14));
}

TransmissionCurve run_filter_transmission(const ModelParams& p, ElectronModel model, const FilterConfig& cfg) {
    cfg.validate();
    const double m_hat_z = quantized_spin_projection(p).m_hat_z;

    TransmissionCurve out;
    out.model = model;
    out.heuristic = model == ElectronModel::DiffractionBaseline;
    out.energy_eV = cfg.energies_eV;
    out.hole_diameter = cfg.hole_diameter;
    out.thickness = cfg.thickness;
    out.cell_pitch = cfg.pitch();
    out.geometric_fraction = std::numbers::pi * cfg.hole_diameter * cfg.hole_diameter / 4.0 / (out.cell_pitch * out.cell_pitch);
    out.cutoff_eV = spiral_cutoff_energy(p, m_hat_z, cfg.hole_diameter);
    out.n_samples = cfg.n_samples;
    out.seed = cfg.seed;

    const std::size_t n_e = cfg.energies_eV.size();
    std::vector<double> pitch_s(n_e);
    for (std::size_t k = 0; k < n_e; ++k) {
        const SpiralParams sp = spiral_params(p, m_hat_z, speed_from_energy(p, m_hat_z, cfg.energies_eV[k]));
        out.R_s.push_back(sp.R_s);
        out.lambda_0.push_back(sp.lambda_0);
        pitch_s[k] = sp.lambda_s;
    }

    const double half = 0.5 * cfg.hole_diameter;
    const double a = out.cell_pitch;
    const std::size_t chunks = chunk_count(cfg.n_samples, cfg.threads);
    std::vector<std::vector<std::uint64_t>> counts(chunks, std::vector<std::uint64_t>(n_e, 0));

    parallel_chunks(cfg.n_samples, cfg.threads, [&](std::size_t chunk, std::size_t begin, std::size_t end) {
        auto& local = counts[chunk];
        for (std::size_t i = begin; i < end; ++i) {
            const auto pos = uniform_pair(draw_block(cfg.seed, 0, i, 0));
            const auto extra = draw_block(cfg.seed, 0, i, 1);
            const double x = (pos[0] - 0.5) * a, y = (pos[1] - 0.5) * a;
            const double d = std::hypot(x, y);
            if (model != ElectronModel::FreeSpiral) {
                if (d < half) {
                    for (auto& c : local) ++c;
                }
                continue;
            }
            const double phase = kTwoPi * to_unit_interval(extra[0], extra[1]);
            const int sign = cfg.spin_sign != 0 ? cfg.spin_sign : ((extra[2] & 1u) ? 1 : -1);
            const double alpha = std::atan2(y, x);
            for (std::size_t k = 0; k < n_e; ++k) {
                const double arc = kTwoPi * cfg.thickness / pitch_s[k];
                if (max_excursion(d, alpha, out.R_s[k], phase, sign, arc) < half) ++local[k];
            }
        }
    });

    const auto n = static_cast<double>(cfg.n_samples);
    for (std::size_t k = 0; k < n_e; ++k) {
        std::uint64_t total = 0;
        for (const auto& c : counts) total += c[k];
        const double frac = static_cast<double>(total) / n;
        double t = frac;
        double se = std::sqrt(frac * (1.0 - frac) / n);
        if (model == ElectronModel::DiffractionBaseline) {
            const double ratio = out.lambda_0[k] / (2.0 * cfg.hole_diameter);
            const double factor = std::clamp(1.0 - ratio * ratio, 0.0, 1.0);
            t *= factor;
            se *= factor;
        }
        out.passed.push_back(total);
        out.transmission.push_back(t);
        out.std_error.push_back(se);
    }
    return out;
}

}  // namespace freespiral
