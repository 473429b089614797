#include "freespiral/config.hpp"

#include <boost/property_tree/ini_parser.hpp>
#include <boost/property_tree/ptree.hpp>
#include <charconv>
#include <fstream>
#include <functional>
#include <map>
#include <sstream>

#include "freespiral/errors.hpp"

namespace freespiral {

namespace {

std::string trim(const std::string& s) {
    const auto b = s.find_first_not_of(" \t\r");
    if (b == std::string::npos) return {};
    const auto e = s.find_last_not_of(" \t\r");
    return s.substr(b, e - b + 1);
}

[[noreturn]] void bad_value(const std::string& where, const std::string& value, const char* expected) {
    throw ConfigError(where + ": cannot read '" + value + "' as " + expected);
}

// from_chars rejects a leading '+'.
std::string unsigned_text(const std::string& text) {
    std::string s = trim(text);
    if (s.size() > 1 && s[0] == '+' && s[1] != '-') s.erase(0, 1);
    return s;
}

double to_double(const std::string& where, const std::string& text) {
    const std::string s = unsigned_text(text);
    double x = 0.0;
    const char* end = s.data() + s.size();
    const auto [ptr, ec] = std::from_chars(s.data(), end, x);
    if (ec != std::errc{} || ptr != end || !std::isfinite(x)) bad_value(where, s, "a finite number");
    return x;
}

template <class Int>
Int to_integer(const std::string& where, const std::string& text) {
    const std::string s = unsigned_text(text);
    Int x{};
    const char* end = s.data() + s.size();
    const auto [ptr, ec] = std::from_chars(s.data(), end, x);
    if (ec != std::errc{} || ptr != end) bad_value(where, s, "an integer");
    return x;
}

bool to_bool(const std::string& where, const std::string& text) {
    const std::string s = trim(text);
    if (s == "true" || s == "on" || s == "yes" || s == "1") return true;
    if (s == "false" || s == "off" || s == "no" || s == "0") return false;
    bad_value(where, s, "a boolean (true | false)");
}

Vec3 to_vec3(const std::string& where, const std::string& text) {
    std::string s = text;
    for (char& ch : s) {
        if (ch == ',') ch = ' ';
    }
    std::istringstream is(s);
    std::string a, b, c, extra;
    if (!(is >> a >> b >> c) || (is >> extra)) bad_value(where, text, "three numbers");
    return {to_double(where, a), to_double(where, b), to_double(where, c)};
}

std::string fmt(double x) {
    char buf[64];
    const auto [ptr, ec] = std::to_chars(buf, buf + sizeof buf, x);
    return std::string(buf, ptr);
}

std::string fmt(bool b) { return b ? "true" : "false"; }

using Setter = std::function<void(const std::string& where, const std::string& value)>;
using Section = std::map<std::string, Setter>;

std::map<std::string, Section> schema(ScenarioConfig& c) {
    auto num = [](double& field) { return Setter([&field](auto& w, auto& v) { field = to_double(w, v); }); };
    auto i32 = [](int& field) { return Setter([&field](auto& w, auto& v) { field = to_integer<int>(w, v); }); };
    auto flag = [](bool& field) { return Setter([&field](auto& w, auto& v) { field = to_bool(w, v); }); };
    auto text = [](std::string& field) { return Setter([&field](auto&, auto& v) { field = trim(v); }); };
    auto maybe = [](std::optional<double>& field, const char* word) {
        return Setter([&field, word](auto& w, auto& v) {
            if (trim(v) == word) field.reset();
            else field = to_double(w, v);
        });
    };

    std::map<std::string, Section> s;
    s["model"] = {{"units", text(c.model.units)},
                  {"kappa", num(c.model.kappa)},
                  {"m0", num(c.model.m0)},
                  {"M0", num(c.model.M0)},
                  {"e_charge", num(c.model.e_charge)},
                  {"c_light", num(c.model.c_light)},
                  {"hbar", num(c.model.hbar)},
                  {"velocity_ceiling", num(c.model.velocity_ceiling)},
                  {"quantize", flag(c.model.quantize)},
                  {"spin_sign", i32(c.model.spin_sign)}};
    s["initial"] = {{"m_hat_z", maybe(c.initial.m_hat_z, "quantized")},
                    {"v_z", num(c.initial.v_z)},
                    {"phase", num(c.initial.phase)}};
    s["field"] = {{"type", text(c.field.type)},
                  {"E0", Setter([&c](auto& w, auto& v) { c.field.E0 = to_vec3(w, v); })},
                  {"gradient", num(c.field.gradient)},
                  {"amplitude", num(c.field.amplitude)},
                  {"wavelength", num(c.field.wavelength)}};
    s["integrator"] = {{"steps_per_period", i32(c.integrator.steps_per_period)},
                       {"dt", maybe(c.integrator.dt, "auto")},
                       {"periods", num(c.integrator.periods)},
                       {"record_stride", i32(c.integrator.record_stride)},
                       {"renormalize_spin", flag(c.integrator.renormalize_spin)},
                       {"adaptive", flag(c.integrator.adaptive)},
                       {"error_target", num(c.integrator.error_target)}};
    s["resonance"] = {{"amplitude", num(c.resonance.amplitude)},
                      {"lambda_min", num(c.resonance.lambda_min)},
                      {"lambda_max", num(c.resonance.lambda_max)},
                      {"length_in_pitches", num(c.resonance.length_in_pitches)},
                      {"tilt", num(c.resonance.tilt)},
                      {"phases", i32(c.resonance.phases)},
                      {"steps_per_period", i32(c.resonance.steps_per_period)},
                      {"refine_points", i32(c.resonance.refine_points)}};
    s["spectrum"] = {{"rule", text(c.spectrum.rule)},
                     {"omega", num(c.spectrum.omega)},
                     {"levels", i32(c.spectrum.levels)},
                     {"steps_per_period", i32(c.spectrum.steps_per_period)},
                     {"grid_points", i32(c.spectrum.grid_points)}};
    s["filter"] = {{"hole_diameter", num(c.filter.hole_diameter)},
                   {"thickness", num(c.filter.thickness)},
                   {"cell_pitch", num(c.filter.cell_pitch)},
                   {"energy_min", num(c.filter.energy_min)},
                   {"energy_max", num(c.filter.energy_max)},
                   {"points_per_decade", i32(c.filter.points_per_decade)},
                   {"n_samples", Setter([&c](auto& w, auto& v) { c.filter.n_samples = to_integer<std::uint64_t>(w, v); })},
                   {"models", text(c.filter.models)},
                   {"spin_sign", i32(c.filter.spin_sign)}};
    s["phase"] = {{"distance_in_pitches", num(c.phase.distance_in_pitches)},
                  {"points", i32(c.phase.points)},
                  {"steps_per_period", i32(c.phase.steps_per_period)}};
    s["tolerances"] = {{"drift", num(c.tolerances.drift)},
                       {"spin_norm", num(c.tolerances.spin_norm)},
                       {"fd_residual", num(c.tolerances.fd_residual)},
                       {"fit", num(c.tolerances.fit)}};
    s["run"] = {{"format", Setter([](auto& w, auto& v) {
                     if (trim(v) != kConfigDialect) {
                         throw ConfigError(w + ": unsupported dialect '" + trim(v) + "', expected " + kConfigDialect);
                     }
                 })},
                {"seed", Setter([&c](auto& w, auto& v) { c.run.seed = to_integer<std::uint64_t>(w, v); })},
                {"threads", Setter([&c](auto& w, auto& v) { c.run.threads = to_integer<unsigned>(w, v); })},
                {"out", text(c.run.out)}};
    return s;
}

void validate(const ScenarioConfig& c) {
    auto check = [](bool ok, const std::string& msg) {
        if (!ok) throw ConfigError(msg);
    };
    check(c.model.units == "natural" || c.model.units == "cgs", "[model] units must be natural or cgs");
    check(c.model.spin_sign == 1 || c.model.spin_sign == -1, "[model] spin_sign must be +1 or -1");
    check(c.model.units == "natural" || c.model.quantize, "[model] cgs units require quantize = true");
    check(c.run.threads >= 1, "[run] threads must be at least 1");
    check(c.filter.n_samples > 0, "[filter] n_samples must be positive");
    check(c.filter.spin_sign >= -1 && c.filter.spin_sign <= 1, "[filter] spin_sign must be -1, 0 or +1");
    check(c.filter.points_per_decade >= 1, "[filter] points_per_decade must be at least 1");
    check(c.filter.energy_min > 0.0 && c.filter.energy_max > c.filter.energy_min,
          "[filter] need 0 < energy_min < energy_max");
    check(c.resonance.lambda_min > 0.0 && c.resonance.lambda_max > c.resonance.lambda_min,
          "[resonance] need 0 < lambda_min < lambda_max");
    check(c.spectrum.omega > 0.0, "[spectrum] omega must be positive");
    check(c.integrator.periods > 0.0, "[integrator] periods must be positive");
    check(c.phase.points >= 2, "[phase] points must be at least 2");

    ModelParams base;
    base.kappa = c.model.kappa;
    base.m0 = c.model.m0;
    base.M0 = c.model.M0;
    base.e_charge = c.model.e_charge;
    base.c_light = c.model.c_light;
    base.hbar = c.model.hbar;
    const ValidationReport report = validate_params(base, c.model.quantize);
    check(report.valid(), "[model] invalid parameters: " + report.to_string());
    try {
        if (c.filter.models != "all") parse_model(c.filter.models);
        parse_rule(c.spectrum.rule);
        (void)c.field_spec();
        IntegratorConfig icfg;
        icfg.steps_per_period = c.integrator.steps_per_period;
        icfg.dt_override = c.integrator.dt;
        icfg.max_time = 1.0;
        icfg.record_stride = c.integrator.record_stride;
        icfg.error_target = c.integrator.error_target;
        icfg.validate();
        const double mz = c.spin_projection();
        check(mz != 0.0 && std::abs(mz) <= 1.0, "[initial] m_hat_z must satisfy 0 < |m_hat_z| <= 1");
    } catch (const PreconditionError& e) {
        throw ConfigError(e.what());
    }
}

}  // namespace

ModelParams ScenarioConfig::model_params() const {
    if (model.units == "cgs") return physical_params(model.kappa, model.spin_sign);
    ModelParams p;
    p.kappa = model.kappa;
    p.m0 = model.m0;
    p.M0 = model.M0;
    p.e_charge = model.e_charge;
    p.c_light = model.c_light;
    p.hbar = model.hbar;
    p.velocity_ceiling = model.velocity_ceiling;
    if (model.quantize) p = with_quantized_spin(p, model.spin_sign);
    return p;
}

double ScenarioConfig::spin_projection() const {
    if (initial.m_hat_z) return *initial.m_hat_z;
    ModelParams p;
    p.kappa = model.kappa;
    return quantized_spin_projection(p, model.spin_sign).m_hat_z;
}

FieldSpec ScenarioConfig::field_spec() const {
    if (field.type == "zero") return FieldSpec::zero();
    if (field.type == "uniform") return FieldSpec::uniform(field.E0);
    if (field.type == "linear_z") return FieldSpec::linear_z(field.gradient);
    if (field.type == "periodic_z") return FieldSpec::periodic_z(field.amplitude, field.wavelength);
    throw ConfigError("[field] unknown type '" + field.type + "' (zero | uniform | linear_z | periodic_z)");
}

ConservationTolerances ScenarioConfig::conservation_tolerances() const {
    return {tolerances.drift, tolerances.spin_norm, tolerances.fd_residual};
}

ScenarioConfig parse_config(std::istream& is) {
    boost::property_tree::ptree tree;
    try {
        boost::property_tree::ini_parser::read_ini(is, tree);
    } catch (const boost::property_tree::ini_parser_error& e) {
        throw ConfigError(std::string("config syntax: ") + e.what());
    }
    ScenarioConfig c;
    auto table = schema(c);
    for (const auto& [name, section] : tree) {
        const auto it = table.find(name);
        if (it == table.end()) {
            if (section.empty()) throw ConfigError("key '" + name + "' outside any section");
            throw ConfigError("unknown section [" + name + "]");
        }
        for (const auto& [key, node] : section) {
            const auto setter = it->second.find(key);
            if (setter == it->second.end()) throw ConfigError("unknown key '" + key + "' in [" + name + "]");
            setter->second("[" + name + "] " + key, node.data());
        }
    }
    validate(c);
    return c;
}

ScenarioConfig parse_config_text(const std::string& text) {
    std::istringstream is(text);
    return parse_config(is);
}

ScenarioConfig load_config(const std::string& path) {
    std::ifstream is(path);
    if (!is) throw ConfigError("cannot open config file '" + path + "'");
    return parse_config(is);
}

std::string to_ini(const ScenarioConfig& c) {
    std::ostringstream os;
    auto opt = [](const std::optional<double>& v, const char* word) { return v ? fmt(*v) : std::string(word); };
    os << "[run]\nformat = " << kConfigDialect << "\nseed = " << c.run.seed << "\nthreads = " << c.run.threads
       << "\nout = " << c.run.out << "\n\n";
    os << "[model]\nunits = " << c.model.units << "\nkappa = " << fmt(c.model.kappa) << "\nm0 = " << fmt(c.model.m0)
       << "\nM0 = " << fmt(c.model.M0) << "\ne_charge = " << fmt(c.model.e_charge)
       << "\nc_light = " << fmt(c.model.c_light) << "\nhbar = " << fmt(c.model.hbar)
       << "\nvelocity_ceiling = " << fmt(c.model.velocity_ceiling) << "\nquantize = " << fmt(c.model.quantize)
       << "\nspin_sign = " << c.model.spin_sign << "\n\n";
    os << "[initial]\nm_hat_z = " << opt(c.initial.m_hat_z, "quantized") << "\nv_z = " << fmt(c.initial.v_z)
       << "\nphase = " << fmt(c.initial.phase) << "\n\n";
    os << "[field]\ntype = " << c.field.type << "\nE0 = " << fmt(c.field.E0.x) << " " << fmt(c.field.E0.y) << " "
       << fmt(c.field.E0.z) << "\ngradient = " << fmt(c.field.gradient) << "\namplitude = " << fmt(c.field.amplitude)
       << "\nwavelength = " << fmt(c.field.wavelength) << "\n\n";
    os << "[integrator]\nsteps_per_period = " << c.integrator.steps_per_period << "\ndt = " << opt(c.integrator.dt, "auto")
       << "\nperiods = " << fmt(c.integrator.periods) << "\nrecord_stride = " << c.integrator.record_stride
       << "\nrenormalize_spin = " << fmt(c.integrator.renormalize_spin) << "\nadaptive = " << fmt(c.integrator.adaptive)
       << "\nerror_target = " << fmt(c.integrator.error_target) << "\n\n";
    os << "[resonance]\namplitude = " << fmt(c.resonance.amplitude) << "\nlambda_min = " << fmt(c.resonance.lambda_min)
       << "\nlambda_max = " << fmt(c.resonance.lambda_max)
       << "\nlength_in_pitches = " << fmt(c.resonance.length_in_pitches) << "\ntilt = " << fmt(c.resonance.tilt)
       << "\nphases = " << c.resonance.phases << "\nsteps_per_period = " << c.resonance.steps_per_period
       << "\nrefine_points = " << c.resonance.refine_points << "\n\n";
    os << "[spectrum]\nrule = " << c.spectrum.rule << "\nomega = " << fmt(c.spectrum.omega)
       << "\nlevels = " << c.spectrum.levels << "\nsteps_per_period = " << c.spectrum.steps_per_period
       << "\ngrid_points = " << c.spectrum.grid_points << "\n\n";
    os << "[filter]\nhole_diameter = " << fmt(c.filter.hole_diameter) << "\nthickness = " << fmt(c.filter.thickness)
       << "\ncell_pitch = " << fmt(c.filter.cell_pitch) << "\nenergy_min = " << fmt(c.filter.energy_min)
       << "\nenergy_max = " << fmt(c.filter.energy_max) << "\npoints_per_decade = " << c.filter.points_per_decade
       << "\nn_samples = " << c.filter.n_samples << "\nmodels = " << c.filter.models
       << "\nspin_sign = " << c.filter.spin_sign << "\n\n";
    os << "[phase]\ndistance_in_pitches = " << fmt(c.phase.distance_in_pitches) << "\npoints = " << c.phase.points
       << "\nsteps_per_period = " << c.phase.steps_per_period << "\n\n";
    os << "[tolerances]\ndrift = " << fmt(c.tolerances.drift) << "\nspin_norm = " << fmt(c.tolerances.spin_norm)
       << "\nfd_residual = " << fmt(c.tolerances.fd_residual) << "\nfit = " << fmt(c.tolerances.fit) << "\n";
    return os.str();
}

}  // namespace freespiral
