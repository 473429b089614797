// Command-line front end. Exit codes: 0 ok, 1 checks failed, 2 config or
// usage error, 3 numeric failure, 4 unexpected internal error.

#include <cstdio>
#include <exception>
#include <filesystem>
#include <functional>
#include <iostream>
#include <map>
#include <optional>
#include <string>

#include "CLI11.hpp"
#include "freespiral/acceptance.hpp"
#include "freespiral/commands.hpp"
#include "freespiral/config.hpp"
#include "freespiral/errors.hpp"
#include "freespiral/output.hpp"

namespace fs = std::filesystem;
using namespace freespiral;

namespace {

enum Exit { kOk = 0, kChecksFailed = 1, kConfig = 2, kNumeric = 3, kInternal = 4 };

struct Globals {
    std::string config;
    std::optional<std::string> out;
    std::optional<std::uint64_t> seed;
    std::optional<unsigned> threads;
    bool list = false;
};

ScenarioConfig effective_config(const Globals& g) {
    ScenarioConfig c = g.config.empty() ? ScenarioConfig{} : load_config(g.config);
    if (g.out) c.run.out = *g.out;
    if (g.seed) c.run.seed = *g.seed;
    if (g.threads) c.run.threads = *g.threads;
    return c;
}

int report(const std::string& name, const CommandResult& r, const ScenarioConfig& c) {
    for (const auto& chk : r.checks) {
        std::printf("%-6s %-36s %.6g (limit %.3g)\n", chk.pass ? "ok" : "FAIL", chk.name.c_str(), chk.value, chk.limit);
    }
    std::printf("%s: %s, %zu files in %s\n", name.c_str(), r.pass() ? "pass" : "checks failed", r.files.size(),
                c.run.out.c_str());
    return r.pass() ? kOk : kChecksFailed;
}

void print_suite() {
    for (const auto& c : acceptance_criteria()) std::printf("%2d  %s\n", c.id, c.title.c_str());
}

int verify(const Globals& g, const std::optional<int>& tighten, const std::vector<int>& only) {
    if (g.list) {
        print_suite();
        return kOk;
    }
    AcceptanceOptions opt;
    if (g.threads) opt.threads = *g.threads;
    if (g.seed) opt.seed = *g.seed;
    opt.tighten = tighten;
    opt.only = only;
    const fs::path out = g.out.value_or("out");
    opt.scratch = out / "verify_scratch";
    ensure_directory(out);

    const auto results = run_acceptance(opt, [](const CriterionResult& r) {
        std::printf("%s\n", format_result(r).c_str());
        std::fflush(stdout);
    });
    nlohmann::json j;
    j["format"] = kConfigDialect;
    j["version"] = kVersion;
    j["command"] = "verify";
    j["seed"] = opt.seed;
    j["threads"] = opt.threads;
    j["tighten"] = tighten ? nlohmann::json(*tighten) : nlohmann::json(nullptr);
    std::size_t passed = 0;
    for (const auto& r : results) {
        j["criteria"].push_back({{"id", r.id}, {"title", r.title}, {"pass", r.pass}, {"detail", r.detail}});
        if (r.pass) ++passed;
    }
    j["pass"] = passed == results.size();
    write_json(out / "verify.json", j);
    std::printf("%zu/%zu criteria passed\n", passed, results.size());
    return passed == results.size() ? kOk : kChecksFailed;
}

}  // namespace

int main(int argc, char** argv) {
    CLI::App app{"Free-spiral electron model: simulations, experiments and acceptance suite"};
    app.set_version_flag("--version", kVersion);
    app.require_subcommand(0, 1);

    Globals g;
    app.add_option("--config", g.config, "scenario file (INI, dialect " + std::string(kConfigDialect) + ")")
        ->check(CLI::ExistingFile);
    app.add_option("--out", g.out, "output directory (overrides [run] out)");
    app.add_option("--seed", g.seed, "random seed (overrides [run] seed)");
    app.add_option("--threads", g.threads, "worker threads (overrides [run] threads)")->check(CLI::Range(1u, 1024u));
    app.add_flag("--list", g.list, "list the acceptance suite and exit");

    using Command = CommandResult (*)(const ScenarioConfig&);
    const std::map<std::string, std::pair<Command, std::string>> commands = {
        {"simulate", {cmd_simulate, "integrate one scenario and monitor conservation"}},
        {"spiral", {cmd_spiral, "free spiral against the closed forms"}},
        {"resonance", {cmd_resonance, "sweep the wavelength of a periodic field"}},
        {"spectrum", {cmd_spectrum, "energy levels in a linear field"}},
        {"filter", {cmd_filter, "transmission through a hole filter"}},
        {"phase", {cmd_phase, "free phase against the quasiclassical phase"}},
    };
    std::string chosen;
    for (const auto& [name, entry] : commands) {
        app.add_subcommand(name, entry.second)->fallthrough()->callback([&chosen, n = name] { chosen = n; });
    }
    std::optional<int> tighten;
    std::vector<int> only;
    auto* v = app.add_subcommand("verify", "run the acceptance suite")->fallthrough();
    v->add_option("--tighten", tighten, "make one criterion's tolerances 100x stricter")->check(CLI::Range(1, 11));
    v->add_option("--only", only, "run only these criteria")->check(CLI::Range(1, 11));
    v->callback([&chosen] { chosen = "verify"; });

    try {
        app.parse(argc, argv);
    } catch (const CLI::Success& e) {
        return app.exit(e);
    } catch (const CLI::ParseError& e) {
        app.exit(e);
        return kConfig;
    }

    try {
        if (chosen == "verify") return verify(g, tighten, only);
        if (chosen.empty()) {
            if (g.list) {
                print_suite();
                return kOk;
            }
            std::cout << app.help();
            return kConfig;
        }
        const ScenarioConfig c = effective_config(g);
        return report(chosen, commands.at(chosen).first(c), c);
    } catch (const ConfigError& e) {
        std::fprintf(stderr, "config error: %s\n", e.what());
        return kConfig;
    } catch (const PreconditionError& e) {
        std::fprintf(stderr, "invalid input: %s\n", e.what());
        return kConfig;
    } catch (const NumericError& e) {
        std::fprintf(stderr, "numeric failure: %s\n", e.what());
        return kNumeric;
    } catch (const std::exception& e) {
        std::fprintf(stderr, "internal error: %s\n", e.what());
        return kInternal;
    }
}
