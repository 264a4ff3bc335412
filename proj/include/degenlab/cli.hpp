#ifndef DEGENLAB_CLI_HPP
#define DEGENLAB_CLI_HPP

#include "degenlab/config.hpp"

#include <iosfwd>
#include <optional>
#include <string>

namespace degenlab {

enum ExitCode : int { kExitOk = 0, kExitCheckFailed = 1, kExitNotConverged = 2, kExitConfig = 3, kExitIo = 4 };

struct DispatchOptions {
    // solve: where to write u (default <output>/solution.dat)
    // verify: read u from here instead of solving
    std::optional<std::string> solution;
};

/// solve | sweep | verify | mms | report. Writes its outputs under
/// config.output_directory and a human-readable digest to `log`.
int dispatch(const std::string& command, const Config& config, const DispatchOptions& options, std::ostream& log);

/// The reports of a verify run: every applicable check plus the residual of
/// u in the untruncated discrete problem.
RunRecord verify_solution(const Config& config, const GridFunction& u);

}  // namespace degenlab

#endif  // DEGENLAB_CLI_HPP
