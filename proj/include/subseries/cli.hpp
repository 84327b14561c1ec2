#pragma once
// Command-line front end. Subcommands:
//   constants  chaining constants C(alpha) with upper estimates
//   covering   covering numbers for a weight sequence and radius
//   norms      empirical phi-norm / subgaussian standard of a sample file
//   simulate   raw model paths to CSV
//   verify     the full Monte Carlo verification suite from a config file
//   report     human-readable rendering of a verify report.json
//
// Exit codes: 0 success, 1 at least one verification check failed,
// 2 usage/config/runtime errors.

namespace subseries {

int run_cli(int argc, char** argv);

}  // namespace subseries
