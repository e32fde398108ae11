#pragma once

// Command-line front end. Subcommands: prepare-data, train, evaluate,
// inspect-state, report, plus the paper-matrix preset that trains all four
// model configurations and reports on them. Exit codes: 0 success, 1 usage
// error, 2 data error, 3 numeric failure; every failure prints a single
// "error[kind]: reason" line to stderr.
namespace hqcgan::cli {

int run_cli(int argc, const char* const* argv);

}  // namespace hqcgan::cli
