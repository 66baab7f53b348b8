// SPDX-License-Identifier: Apache-2.0
//
// Command-line front end. Subcommands: equilibrium, scan, oracle-check,
// classify, montecarlo.
#pragma once

#include "liqgame/strategy.hpp"

#include <iosfwd>
#include <string>
#include <vector>

namespace liqgame::cli {

enum ExitCode : int {
    kOk = 0,
    kConfigError = 1,
    kSolverError = 2,
    kNotConverged = 3,
    kToleranceBreach = 4,
};

int run(int argc, const char* const* argv, std::ostream& out, std::ostream& err);
int run(const std::vector<std::string>& args, std::ostream& out, std::ostream& err);

/// Shortest representation that reads back to the same double.
[[nodiscard]] std::string format_double(double v);

/// Reads the columns written by `equilibrium` back into grid strategies
/// (explicit rates). `liquidating` selects the finite-horizon snap.
std::vector<GridStrategy> read_strategy_csv(const std::string& path, bool liquidating);

}  // namespace liqgame::cli
