#include <filesystem>
#include <fstream>

#include "doctest.h"
#include "freespiral/commands.hpp"
#include "freespiral/config.hpp"
#include "freespiral/errors.hpp"
#include "freespiral/output.hpp"

using namespace freespiral;
namespace fs = std::filesystem;

namespace {

nlohmann::json read_json(const fs::path& p) {
    std::ifstream is(p);
    return nlohmann::json::parse(is);
}

fs::path fresh_dir(const std::string& name) {
    const fs::path dir = fs::temp_directory_path() / ("freespiral_test_" + name);
    fs::remove_all(dir);
    return dir;
}

}  // namespace

TEST_CASE("empty config gives the defaults") {
    const ScenarioConfig c = parse_config_text("");
    CHECK(c == ScenarioConfig{});
    CHECK(c.spin_projection() == doctest::Approx(std::sqrt(2.0 / 3.0)).epsilon(1e-15));
    CHECK(c.model_params().M0 == doctest::Approx(1.0 / (2.0 * std::sqrt(2.0 / 3.0))).epsilon(1e-15));
}

TEST_CASE("to_ini round-trips every section") {
    ScenarioConfig c;
    c.model.kappa = 0.7;
    c.model.spin_sign = -1;
    c.initial.m_hat_z = -0.3;
    c.initial.v_z = 0.0123456789012345;
    c.field.type = "uniform";
    c.field.E0 = {1e-10, -2.5e-11, 0.1};
    c.integrator.dt = 0.1 + 0.2;  // not exactly representable in short decimal
    c.integrator.adaptive = true;
    c.resonance.phases = 6;
    c.spectrum.rule = "full-turn";
    c.filter.n_samples = 12345678901ULL;
    c.filter.models = "free-spiral";
    c.phase.points = 3;
    c.tolerances.fit = 3e-7;
    c.run.seed = 18446744073709551615ULL;
    c.run.threads = 3;
    c.run.out = "some/dir";
    const ScenarioConfig back = parse_config_text(to_ini(c));
    CHECK(back == c);
    CHECK(to_ini(back) == to_ini(c));
}

TEST_CASE("syntax: comments, keywords and signs") {
    const ScenarioConfig c = parse_config_text(
        "# comment\n; other comment\n[initial]\nm_hat_z = quantized\nv_z = +0.02\n"
        "[integrator]\ndt = auto\nrenormalize_spin = off\n[field]\ntype = uniform\nE0 = 1 2 3\n");
    CHECK_FALSE(c.initial.m_hat_z);
    CHECK(c.initial.v_z == 0.02);
    CHECK_FALSE(c.integrator.dt);
    CHECK_FALSE(c.integrator.renormalize_spin);
    CHECK(c.field.E0 == Vec3{1.0, 2.0, 3.0});
}

TEST_CASE("config errors") {
    const char* bad[] = {
        "[nosuch]\nx = 1\n",
        "[model]\nkapa = 0.5\n",
        "[model]\nkappa = 0.5x\n",
        "[model]\nkappa = nan\n",
        "[model]\nkappa = 0.2\n",
        "[model]\nkappa = 0.4\n",  // valid G, but sqrt(G/3) > 1
        "[model]\nunits = si\n",
        "[model]\nspin_sign = 2\n",
        "[run]\nformat = freespiral-ini/0\n",
        "[run]\nthreads = 0\n",
        "[run]\nseed = -1\n",
        "[filter]\nn_samples = 0\n",
        "[filter]\nmodels = wave\n",
        "[filter]\nenergy_min = 1\nenergy_max = 0.5\n",
        "[spectrum]\nrule = third-turn\n",
        "[field]\ntype = magnetic\n",
        "[field]\nE0 = 1 2\n",
        "[integrator]\nsteps_per_period = 0\n",
        "[integrator]\nadaptive = maybe\n",
        "[initial]\nm_hat_z = 0\n",
        "[model\nkappa = 0.5\n",
        "kappa = 0.5\n",
    };
    for (const char* text : bad) {
        CAPTURE(text);
        CHECK_THROWS_AS(parse_config_text(text), ConfigError);
    }
    CHECK_THROWS_AS(load_config("/nonexistent/freespiral.ini"), ConfigError);
}

TEST_CASE("unquantized natural-unit model keeps the given M0") {
    const ScenarioConfig c = parse_config_text("[model]\nquantize = false\nM0 = 2.5\n[initial]\nm_hat_z = 0.5\n");
    CHECK(c.model_params().M0 == 2.5);
    CHECK(c.spin_projection() == 0.5);
}

TEST_CASE("spiral command summary") {
    ScenarioConfig c;
    c.integrator.periods = 20;
    c.run.out = fresh_dir("spiral").string();
    const CommandResult r = cmd_spiral(c);
    CHECK(r.pass());
    const auto j = read_json(fs::path(c.run.out) / "spiral.json");
    CHECK(j["format"] == kConfigDialect);
    CHECK(j["version"] == kVersion);
    CHECK(j["command"] == "spiral");
    CHECK(std::abs(j["pitch_over_lambda0"].get<double>() - 2.0) < 1e-4);
    CHECK(parse_config_text(j["effective_config"].get<std::string>()) == c);
    for (const auto& f : r.files) CHECK(fs::exists(fs::path(c.run.out) / f));
}

TEST_CASE("simulate command writes an 18-column trajectory") {
    ScenarioConfig c;
    c.integrator.periods = 3;
    c.run.out = fresh_dir("simulate").string();
    CHECK(cmd_simulate(c).pass());
    std::ifstream is(fs::path(c.run.out) / "trajectory.csv");
    std::string header;
    std::getline(is, header);
    CHECK(std::count(header.begin(), header.end(), ',') == 17);
}

TEST_CASE("filter command requires physical units") {
    ScenarioConfig c;
    c.run.out = fresh_dir("filter_units").string();
    CHECK_THROWS_AS(cmd_filter(c), ConfigError);
}

TEST_CASE("filter_shape on hand-made curves") {
    TransmissionCurve t;
    t.energy_eV = {1.0, 2.0, 3.0, 4.0};
    t.cutoff_eV = 2.5;
    t.transmission = {0.0, 0.0, 0.2, 0.4};
    t.passed = {0, 0, 5, 10};
    FilterShape s = filter_shape(t);
    CHECK(s.cutoff_mismatches == 0);
    CHECK(s.transition_width == 1);
    CHECK(s.monotone);
    CHECK(s.intermediate_points == 1);
    CHECK(s.flat_spread == doctest::Approx(0.4));

    t.transmission = {0.0, 0.1, 0.0, 0.4};
    t.passed = {0, 3, 0, 10};
    s = filter_shape(t);
    CHECK(s.cutoff_mismatches == 2);
    CHECK(s.transition_width == -1);
    CHECK_FALSE(s.monotone);

    t.transmission = {0.3, 0.3, 0.3, 0.3};
    t.passed = {9, 9, 9, 9};
    s = filter_shape(t);
    CHECK(s.flat_spread == 0.0);
    CHECK(s.transition_width == -1);
}
