#pragma once

#include <string>
#include <vector>

#include "freespiral/config.hpp"
#include "freespiral/experiments.hpp"

namespace freespiral {

struct Check {
    std::string name;
    double value = 0.0;
    double limit = 0.0;
    bool pass = false;
};

struct CommandResult {
    std::vector<Check> checks;
    std::vector<std::string> files;  ///< written, relative to the output directory

    bool pass() const;
};

/// Each command writes its JSON summary, CSV tables and plot files into
/// config.run.out. Errors: ConfigError / PreconditionError for bad input,
/// NumericError for integration or root-finding failure.
CommandResult cmd_simulate(const ScenarioConfig& c);
CommandResult cmd_spiral(const ScenarioConfig& c);
CommandResult cmd_resonance(const ScenarioConfig& c);
CommandResult cmd_spectrum(const ScenarioConfig& c);
CommandResult cmd_filter(const ScenarioConfig& c);
CommandResult cmd_phase(const ScenarioConfig& c);

/// Filter-curve properties shared by cmd_filter and the acceptance suite.
struct FilterShape {
    std::size_t cutoff_mismatches = 0;  ///< energies where (E < cutoff) != (no sample passed)
    int transition_width = -1;          ///< first passing index minus last blocked index; -1 if undefined
    double flat_spread = 0.0;           ///< max - min transmission
    bool monotone = true;               ///< non-decreasing in energy
    int intermediate_points = 0;        ///< strictly between 0 and the maximum
};
FilterShape filter_shape(const TransmissionCurve& curve);

}  // namespace freespiral
