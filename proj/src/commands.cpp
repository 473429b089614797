#include "freespiral/commands.hpp"

#include <algorithm>
#include <cmath>
#include <filesystem>
#include <fstream>
#include <limits>
#include <numbers>

#include "freespiral/errors.hpp"
#include "freespiral/output.hpp"
#include "freespiral/trajectory_io.hpp"

namespace freespiral {

using nlohmann::json;
namespace fs = std::filesystem;

bool CommandResult::pass() const {
    return std::all_of(checks.begin(), checks.end(), [](const Check& c) { return c.pass; });
}

namespace {

Check at_most(std::string name, double value, double limit) {
    return {std::move(name), value, limit, value <= limit};
}

json summary_head(const std::string& command, const ScenarioConfig& c) {
    json j;
    j["format"] = kConfigDialect;
    j["version"] = kVersion;
    j["command"] = command;
    j["effective_config"] = to_ini(c);
    return j;
}

json to_json(const Vec3& v) { return json::array({v.x, v.y, v.z}); }

json to_json(const ModelParams& p) {
    return {{"m0", p.m0}, {"kappa", p.kappa}, {"M0", p.M0}, {"e_charge", p.e_charge},
            {"c_light", p.c_light}, {"hbar", p.hbar}, {"velocity_ceiling", p.velocity_ceiling}, {"G", p.G()}};
}

json to_json(const SpiralParams& s) {
    return {{"G", s.G}, {"R_s", s.R_s}, {"Omega_s", s.Omega_s}, {"lambda_s", s.lambda_s}, {"m_e", s.m_e},
            {"lambda_0", s.lambda_0}, {"m_hat_z", s.m_hat_z}, {"v_z", s.v_z},
            {"R_s_over_lambda_0", s.radius_to_wavelength()}};
}

json to_json(const HelixFit& f) {
    return {{"axis", to_json(f.axis)}, {"center", to_json(f.center)}, {"radius", f.radius}, {"omega", f.omega},
            {"pitch", f.pitch}, {"axial_speed", f.axial_speed}, {"residual_rms", f.residual_rms},
            {"degenerate", f.degenerate}};
}

json to_json(const ConservationReport& r) {
    json monitors = json::array();
    for (const auto& m : r.monitors) {
        monitors.push_back({{"name", m.name}, {"max_drift", m.max_drift}, {"tolerance", m.tolerance}, {"pass", m.pass}});
    }
    return {{"pass", r.pass()}, {"monitors", monitors}};
}

json to_json(const std::vector<Check>& checks) {
    json out = json::array();
    for (const auto& c : checks) out.push_back({{"name", c.name}, {"value", c.value}, {"limit", c.limit}, {"pass", c.pass}});
    return out;
}

void finish(CommandResult& result, json summary, const fs::path& dir, const std::string& name) {
    summary["checks"] = to_json(result.checks);
    summary["pass"] = result.pass();
    summary["files"] = result.files;
    write_json(dir / name, summary);
    result.files.insert(result.files.begin(), name);
}

IntegratorConfig integrator_for(const ScenarioConfig& c, const SpiralParams& sp) {
    IntegratorConfig cfg;
    cfg.steps_per_period = c.integrator.steps_per_period;
    cfg.dt_override = c.integrator.dt;
    cfg.record_stride = c.integrator.record_stride;
    cfg.renormalize_spin = c.integrator.renormalize_spin;
    cfg.adaptive = c.integrator.adaptive;
    cfg.error_target = c.integrator.error_target;
    const double unit = sp.R_s > 0.0 ? sp.period() : sp.lambda_0 / std::abs(sp.v_z);
    if (sp.R_s == 0.0 && !cfg.dt_override) cfg.dt_override = unit / cfg.steps_per_period;
    cfg.max_time = c.integrator.periods * unit;
    return cfg;
}

void write_xy(const fs::path& path, const Trajectory& tr) {
    std::vector<double> x, y;
    for (const auto& s : tr.samples) {
        x.push_back(s.state.r.x);
        y.push_back(s.state.r.y);
    }
    write_plot(path, "x", "y", x, y);
}

void write_trajectory(const fs::path& path, const Trajectory& tr) {
    std::ofstream os(path, std::ios::binary | std::ios::trunc);
    if (!os) throw ConfigError("cannot write '" + path.string() + "'");
    write_trajectory_csv(os, tr);
}

double mean_transverse_speed(const Trajectory& tr, const Vec3& axis) {
    double sum = 0.0;
    for (const auto& s : tr.samples) sum += norm(s.state.v - dot(s.state.v, axis) * axis);
    return sum / static_cast<double>(tr.size());
}

}  // namespace

CommandResult cmd_simulate(const ScenarioConfig& c) {
    const ModelParams p = c.model_params();
    const double mz = c.spin_projection();
    const SpiralParams sp = spiral_params(p, mz, c.initial.v_z);
    const FieldSpec field = c.field_spec();
    const fs::path dir = c.run.out;
    ensure_directory(dir);

    const Trajectory tr = integrate(p, spiral_initial_conditions(p, mz, c.initial.v_z, c.initial.phase), field,
                                    integrator_for(c, sp));
    const ConservationReport report = conservation_report(tr, c.conservation_tolerances());

    CommandResult result;
    for (const auto& m : report.monitors) result.checks.push_back({m.name, m.max_drift, m.tolerance, m.pass});
    write_trajectory(dir / "trajectory.csv", tr);
    write_xy(dir / "trajectory_xy.dat", tr);
    result.files = {"trajectory.csv", "trajectory_xy.dat"};

    json j = summary_head("simulate", c);
    j["model"] = to_json(p);
    j["field"] = field.tag();
    j["predicted"] = to_json(sp);
    j["samples"] = tr.size();
    j["stats"] = {{"steps", tr.stats.steps}, {"rejected", tr.stats.rejected}, {"dt_initial", tr.stats.dt_initial},
                  {"max_spin_drift_before_renorm", tr.stats.max_spin_drift_before_renorm}};
    j["conservation"] = to_json(report);
    finish(result, j, dir, "conservation.json");
    return result;
}

CommandResult cmd_spiral(const ScenarioConfig& c) {
    const ModelParams p = c.model_params();
    const double mz = c.spin_projection();
    const SpiralParams sp = spiral_params(p, mz, c.initial.v_z);
    const fs::path dir = c.run.out;
    ensure_directory(dir);

    const FreeSpiralResult r = run_free_spiral(p, mz, c.initial.v_z, c.integrator.periods, integrator_for(c, sp),
                                               c.conservation_tolerances(), c.initial.phase);
    const SpiralMismatch mm = compare_fit(r.predicted, r.fit);

    CommandResult result;
    result.checks.push_back(at_most("fit_radius", mm.radius, c.tolerances.fit));
    json uncertainty;
    if (!r.fit.degenerate) {
        result.checks.push_back(at_most("fit_omega", mm.omega, c.tolerances.fit));
        result.checks.push_back(at_most("fit_pitch", mm.pitch, c.tolerances.fit));
        const double closed = uncertainty_product(p, mz, c.initial.v_z).dpx_dx;
        const double measured = sp.m_e * mean_transverse_speed(r.trajectory, r.fit.axis) * r.fit.radius;
        uncertainty = {{"closed_form", closed}, {"measured", measured}, {"over_hbar", closed / p.hbar}};
        result.checks.push_back(at_most("uncertainty_measured", std::abs(measured - closed) / closed, c.tolerances.fit));
        if (c.model.quantize) {
            const double ratio = r.fit.pitch / sp.lambda_0;
            result.checks.push_back(at_most("pitch_over_lambda0_minus_2", std::abs(ratio - 2.0) / 2.0, 1e-4));
        }
    }
    for (const auto& m : r.conservation.monitors) result.checks.push_back({m.name, m.max_drift, m.tolerance, m.pass});

    write_trajectory(dir / "spiral_trajectory.csv", r.trajectory);
    write_xy(dir / "spiral_xy.dat", r.trajectory);
    result.files = {"spiral_trajectory.csv", "spiral_xy.dat"};

    json j = summary_head("spiral", c);
    j["model"] = to_json(p);
    j["field"] = "zero";
    j["predicted"] = to_json(sp);
    j["fit"] = to_json(r.fit);
    j["mismatch"] = {{"radius", mm.radius}, {"omega", mm.omega}, {"pitch", mm.pitch}};
    j["pitch_over_lambda0"] = r.fit.degenerate ? 0.0 : r.fit.pitch / sp.lambda_0;
    j["uncertainty_product"] = uncertainty;
    j["conservation"] = to_json(r.conservation);
    finish(result, j, dir, "spiral.json");
    return result;
}

CommandResult cmd_resonance(const ScenarioConfig& c) {
    const ModelParams p = c.model_params();
    const double mz = c.spin_projection();
    const SpiralParams sp = spiral_params(p, mz, c.initial.v_z);
    const fs::path dir = c.run.out;
    ensure_directory(dir);

    ResonanceConfig rc;
    rc.length_in_pitches = c.resonance.length_in_pitches;
    rc.tilt = c.resonance.tilt;
    rc.phases = c.resonance.phases;
    rc.seed = c.run.seed;
    rc.steps_per_period = c.resonance.steps_per_period;
    rc.refine_points = c.resonance.refine_points;
    rc.threads = c.run.threads;
    const double length = rc.length_in_pitches * sp.lambda_s;
    const ResonanceCurve curve = run_periodic_field_resonance(
        p, mz, c.initial.v_z, c.resonance.amplitude,
        wavenumber_sweep(c.resonance.lambda_min * sp.lambda_0, c.resonance.lambda_max * sp.lambda_0, length), rc);

    CommandResult result;
    result.checks.push_back({"peak_found", curve.peak_found ? 1.0 : 0.0, 1.0, curve.peak_found});
    const double offset = curve.peak_found ? std::abs(curve.peak_lambda_f - sp.lambda_0) / sp.lambda_0 : 1.0;
    result.checks.push_back(at_most("peak_offset_from_lambda0", offset, 0.05));
    const double three = 3.0 * sp.lambda_0;
    if (curve.peak_found && three >= curve.lambda_f.front() && three <= curve.lambda_f.back()) {
        result.checks.push_back(at_most("response_3lambda0_over_peak", curve.response_at(three) / curve.peak_response, 0.1));
    }

    std::vector<std::vector<double>> rows;
    std::vector<double> x;
    for (std::size_t i = 0; i < curve.lambda_f.size(); ++i) {
        rows.push_back({curve.lambda_f[i], curve.lambda_f[i] / sp.lambda_0, curve.response[i], curve.std_error[i]});
        x.push_back(curve.lambda_f[i] / sp.lambda_0);
    }
    write_csv(dir / "resonance.csv", {"lambda_f", "lambda_f_over_lambda0", "response", "std_error"}, rows);
    write_plot(dir / "resonance.dat", "lambda_f/lambda_0", "response", x, curve.response);
    result.files = {"resonance.csv", "resonance.dat"};

    json j = summary_head("resonance", c);
    j["model"] = to_json(p);
    j["predicted"] = to_json(sp);
    j["amplitude"] = c.resonance.amplitude;
    j["interaction_length"] = curve.interaction_length;
    j["sweep_points"] = curve.lambda_f.size();
    j["peak"] = {{"found", curve.peak_found}, {"lambda_f", curve.peak_lambda_f},
                 {"lambda_f_over_lambda0", curve.peak_lambda_f / sp.lambda_0},
                 {"lambda_f_over_lambda_s", curve.peak_lambda_f / sp.lambda_s},
                 {"response", curve.peak_response}, {"width", curve.peak_width}};
    j["max_response_within_5pct_of_lambda0"] = max_response_near(curve, sp.lambda_0, 0.05);
    j["tilted_pitch_crossing"] = sp.lambda_s * std::cos(rc.tilt);
    j["warnings"] = curve.warnings;
    finish(result, j, dir, "resonance.json");
    return result;
}

CommandResult cmd_spectrum(const ScenarioConfig& c) {
    const ModelParams p = c.model_params();
    const double mz = c.spin_projection();
    const fs::path dir = c.run.out;
    ensure_directory(dir);

    SpectrumConfig sc;
    sc.rule = parse_rule(c.spectrum.rule);
    sc.levels = c.spectrum.levels;
    sc.steps_per_period = c.spectrum.steps_per_period;
    sc.grid_points = c.spectrum.grid_points;
    const double m_e = effective_mass(p, mz);
    const double gradient = -m_e * c.spectrum.omega * c.spectrum.omega / p.e_charge;
    const SpectrumResult r = run_linear_field_spectrum(p, mz, gradient, sc);

    const double unit = (sc.rule == QuantizationRule::HalfTurn ? 1.0 : 2.0) * r.hbar_omega;
    double worst = 0.0;
    for (double d : r.spacings) worst = std::max(worst, std::abs(d - unit) / unit);
    CommandResult result;
    result.checks.push_back(at_most("spacing_vs_rule_quantum", worst, 0.01));
    result.checks.push_back(at_most("spacing_stdev_over_mean", r.spacing_stdev() / r.spacing_mean(), 0.01));

    std::vector<std::vector<double>> levels, spacings, phase;
    for (std::size_t n = 0; n < r.levels.size(); ++n) levels.push_back({double(n + 1), r.levels[n], r.levels[n] / r.hbar_omega});
    for (std::size_t n = 0; n < r.spacings.size(); ++n) spacings.push_back({double(n + 1), r.spacings[n], r.spacings[n] / r.hbar_omega});
    std::vector<double> ex, px;
    for (std::size_t i = 0; i < r.grid_energy.size(); ++i) {
        phase.push_back({r.grid_energy[i], r.grid_phase[i]});
        ex.push_back(r.grid_energy[i] / r.hbar_omega);
        px.push_back(r.grid_phase[i] / std::numbers::pi);
    }
    write_csv(dir / "spectrum_levels.csv", {"n", "E_n", "E_n_over_hbar_omega"}, levels);
    write_csv(dir / "spectrum_spacings.csv", {"n", "dE_n", "dE_n_over_hbar_omega"}, spacings);
    write_csv(dir / "spectrum_phase.csv", {"energy", "phase"}, phase);
    write_plot(dir / "spectrum_phase.dat", "E/hbar_omega", "phase/pi", ex, px);
    result.files = {"spectrum_levels.csv", "spectrum_spacings.csv", "spectrum_phase.csv", "spectrum_phase.dat"};

    json j = summary_head("spectrum", c);
    j["model"] = to_json(p);
    j["rule"] = rule_tag(r.rule);
    j["gradient"] = gradient;
    j["omega"] = r.omega;
    j["hbar_omega"] = r.hbar_omega;
    j["levels"] = r.levels;
    j["spacings"] = r.spacings;
    j["spacing_mean_over_hbar_omega"] = r.spacing_mean() / r.hbar_omega;
    j["spacing_stdev_over_mean"] = r.spacing_stdev() / r.spacing_mean();
    j["max_azimuth_mismatch"] = r.max_azimuth_mismatch;
    finish(result, j, dir, "spectrum.json");
    return result;
}

FilterShape filter_shape(const TransmissionCurve& curve) {
    FilterShape s;
    int last_zero = -1, first_pass = -1;
    const double top = *std::max_element(curve.transmission.begin(), curve.transmission.end());
    const double bottom = *std::min_element(curve.transmission.begin(), curve.transmission.end());
    s.flat_spread = top - bottom;
    for (std::size_t k = 0; k < curve.energy_eV.size(); ++k) {
        const bool blocked = curve.transmission[k] == 0.0;
        if ((curve.energy_eV[k] < curve.cutoff_eV) != (curve.passed[k] == 0)) ++s.cutoff_mismatches;
        if (blocked) last_zero = static_cast<int>(k);
        if (!blocked && first_pass < 0) first_pass = static_cast<int>(k);
        if (k > 0 && curve.transmission[k] < curve.transmission[k - 1]) s.monotone = false;
        if (curve.transmission[k] > 0.0 && curve.transmission[k] < top) ++s.intermediate_points;
    }
    if (last_zero >= 0 && first_pass > last_zero) s.transition_width = first_pass - last_zero;
    return s;
}

CommandResult cmd_filter(const ScenarioConfig& c) {
    if (c.model.units != "cgs") throw ConfigError("filter requires [model] units = cgs");
    const ModelParams p = c.model_params();
    const fs::path dir = c.run.out;
    ensure_directory(dir);

    FilterConfig fc;
    fc.hole_diameter = c.filter.hole_diameter;
    fc.thickness = c.filter.thickness;
    fc.cell_pitch = c.filter.cell_pitch;
    fc.energies_eV = log_energy_grid(c.filter.energy_min, c.filter.energy_max, c.filter.points_per_decade);
    fc.n_samples = c.filter.n_samples;
    fc.seed = c.run.seed;
    fc.threads = c.run.threads;
    fc.spin_sign = c.filter.spin_sign;

    std::vector<ElectronModel> models;
    if (c.filter.models == "all") {
        models = {ElectronModel::PointClassical, ElectronModel::DiffractionBaseline, ElectronModel::FreeSpiral};
    } else {
        models = {parse_model(c.filter.models)};
    }

    CommandResult result;
    json j = summary_head("filter", c);
    j["model"] = to_json(p);
    j["hole_diameter_cm"] = fc.hole_diameter;
    j["thickness_cm"] = fc.thickness;
    j["cell_pitch_cm"] = fc.pitch();
    j["n_samples"] = fc.n_samples;
    j["seed"] = fc.seed;
    json curves = json::object();

    std::vector<std::string> header = {"energy_eV", "R_s_cm", "lambda_0_cm"};
    std::vector<std::vector<double>> rows(fc.energies_eV.size());
    for (const auto model : models) {
        const TransmissionCurve t = run_filter_transmission(p, model, fc);
        const std::string tag = model_tag(model);
        if (rows.front().empty()) {
            for (std::size_t k = 0; k < rows.size(); ++k) rows[k] = {t.energy_eV[k], t.R_s[k], t.lambda_0[k]};
            j["cutoff_eV"] = t.cutoff_eV;
            j["geometric_fraction"] = t.geometric_fraction;
            j["energy_eV"] = t.energy_eV;
        }
        header.push_back(tag + "_T");
        header.push_back(tag + "_se");
        for (std::size_t k = 0; k < rows.size(); ++k) {
            rows[k].push_back(t.transmission[k]);
            rows[k].push_back(t.std_error[k]);
        }
        write_plot(dir / ("filter_" + tag + ".dat"), "energy_eV", "transmission", t.energy_eV, t.transmission);
        result.files.push_back("filter_" + tag + ".dat");

        const FilterShape s = filter_shape(t);
        curves[tag] = {{"heuristic", t.heuristic}, {"transmission", t.transmission}, {"std_error", t.std_error},
                       {"passed", t.passed}, {"transition_width", s.transition_width},
                       {"intermediate_points", s.intermediate_points}, {"monotone", s.monotone}};
        if (model == ElectronModel::FreeSpiral) {
            result.checks.push_back(at_most("free_spiral_cutoff_mismatches", double(s.cutoff_mismatches), 0.0));
            const bool width_ok = s.transition_width >= 1 && s.transition_width < 2;
            result.checks.push_back({"free_spiral_transition_width", double(s.transition_width), 2.0, width_ok});
        } else if (model == ElectronModel::PointClassical) {
            result.checks.push_back(at_most("point_classical_spread", s.flat_spread, 0.0));
        } else {
            const bool smooth = s.monotone && s.intermediate_points >= 3;
            result.checks.push_back({"diffraction_intermediate_points", double(s.intermediate_points), 3.0, smooth});
        }
    }
    write_csv(dir / "filter.csv", header, rows);
    result.files.insert(result.files.begin(), "filter.csv");
    j["curves"] = curves;
    finish(result, j, dir, "filter.json");
    return result;
}

CommandResult cmd_phase(const ScenarioConfig& c) {
    const ModelParams p = c.model_params();
    const double mz = c.spin_projection();
    const SpiralParams sp = spiral_params(p, mz, c.initial.v_z);
    const fs::path dir = c.run.out;
    ensure_directory(dir);

    CommandResult result;
    std::vector<std::vector<double>> rows;
    std::vector<double> x, y;
    double worst_ratio = 0.0, worst_measured = 0.0;
    for (int i = 0; i < c.phase.points; ++i) {
        const double pitches = c.phase.distance_in_pitches * i / (c.phase.points - 1);
        const double L = pitches * sp.lambda_s;
        const PhaseComparison pc = phase_comparison(p, mz, c.initial.v_z, L);
        double measured = 0.0;
        if (L > 0.0 && sp.R_s > 0.0) {
            measured = measured_free_phase(p, mz, c.initial.v_z, L, c.phase.steps_per_period);
            worst_measured = std::max(worst_measured, std::abs(measured - pc.phi_free) / pc.phi_free);
        }
        worst_ratio = std::max(worst_ratio, std::abs(pc.ratio - 0.5) / 0.5);
        rows.push_back({L, pitches, pc.phi_free, pc.phi_quasiclassical, pc.ratio, pc.ratio_half_turn, measured});
        x.push_back(pitches);
        y.push_back(pc.phi_free);
    }
    if (c.model.quantize) result.checks.push_back(at_most("ratio_minus_half", worst_ratio, 1e-12));
    result.checks.push_back(at_most("measured_vs_closed_form", worst_measured, c.tolerances.fit));

    write_csv(dir / "phase.csv",
              {"distance", "distance_over_lambda_s", "phi_free", "phi_quasiclassical", "ratio", "ratio_half_turn",
               "phi_free_measured"},
              rows);
    write_plot(dir / "phase.dat", "distance/lambda_s", "phi_free", x, y);
    result.files = {"phase.csv", "phase.dat"};

    const PhaseComparison unit = phase_comparison(p, mz, c.initial.v_z, sp.lambda_s);
    json j = summary_head("phase", c);
    j["model"] = to_json(p);
    j["predicted"] = to_json(sp);
    j["ratio"] = unit.ratio;
    j["ratio_half_turn"] = unit.ratio_half_turn;
    j["phi_free_per_pitch"] = unit.phi_free;
    j["phi_quasiclassical_per_pitch"] = unit.phi_quasiclassical;
    finish(result, j, dir, "phase.json");
    return result;
}

}  // namespace freespiral
