#pragma once

#include <iosfwd>

namespace smoothrl::cli {

enum ExitCode : int {
    ok = 0,
    io_failure = 1,
    usage = 2,
    unsupported = 3,
    numerical = 4,
};

/// Entry point of the `smoothrl` command. Verbs: simulate, linearize, sweep,
/// list-scenarios, export-scenario. Output files go under <out>/<scenario>/.
int run(int argc, const char* const* argv, std::ostream& out, std::ostream& err);

} // namespace smoothrl::cli
