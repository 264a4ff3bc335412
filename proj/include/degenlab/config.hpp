#ifndef DEGENLAB_CONFIG_HPP
#define DEGENLAB_CONFIG_HPP

#include "degenlab/experiments.hpp"

#include <stdexcept>
#include <string>
#include <vector>

namespace degenlab {

struct MmsSettings {
    std::string profile = "quadratic";  // quadratic | zero
    double amplitude = 1.0;
    std::vector<int> cells{64, 128, 256};
};

/// Everything a run needs, read from a sectioned key = value file.
/// See docs/config.md for the keys and defaults.
struct Config {
    ProblemSpec problem;
    MeshSpec mesh;
    SolverConfig solver;
    CheckSettings checks;
    SweepAxes axes;
    int threads = 1;
    size_t max_points = 4096;
    MmsSettings mms;
    std::string output_directory = "degenlab_out";

    SweepSpec sweep() const;
};

/// Carries every violation found, not just the first.
class ConfigError : public std::runtime_error {
public:
    explicit ConfigError(std::vector<std::string> violations);
    const std::vector<std::string>& violations() const { return violations_; }

private:
    std::vector<std::string> violations_;
};

Config parse_config(const std::string& text);

/// Throws std::runtime_error when the file cannot be read.
Config load_config(const std::string& path);

}  // namespace degenlab

#endif  // DEGENLAB_CONFIG_HPP
