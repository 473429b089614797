// Acceptance suite runner: one [PASS]/[FAIL] line per criterion, exit 0 iff all pass.

#include <cstdio>

#include "CLI11.hpp"
#include "freespiral/acceptance.hpp"

int main(int argc, char** argv) {
    CLI::App app{"freespiral acceptance suite"};
    freespiral::AcceptanceOptions opt;
    int tighten = 0;
    std::string scratch = "acceptance_scratch";
    app.add_option("--only", opt.only, "criteria to run (default all)")->check(CLI::Range(1, 11));
    app.add_option("--tighten", tighten, "criterion whose tolerances become 100x stricter")->check(CLI::Range(1, 11));
    app.add_option("--threads", opt.threads)->check(CLI::Range(1u, 1024u));
    app.add_option("--seed", opt.seed);
    app.add_option("--scratch", scratch, "directory for the determinism check");
    CLI11_PARSE(app, argc, argv);
    if (tighten) opt.tighten = tighten;
    opt.scratch = scratch;

    std::size_t failed = 0;
    const auto results = freespiral::run_acceptance(opt, [&](const freespiral::CriterionResult& r) {
        std::printf("%s\n", freespiral::format_result(r).c_str());
        std::fflush(stdout);
        if (!r.pass) ++failed;
    });
    std::printf("%zu/%zu criteria passed\n", results.size() - failed, results.size());
    return failed == 0 ? 0 : 1;
}
