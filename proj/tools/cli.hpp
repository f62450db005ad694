#pragma once

#include <spectrafw/solvers.hpp>

#include <iosfwd>
#include <string>
#include <vector>

namespace spectrafw::cli {

constexpr int kExitOk = 0;
constexpr int kExitUsage = 2;
constexpr int kExitNumerical = 3;

/// Entry point of the `spectrafw` tool. argv[0] is the program name.
int run(const std::vector<std::string> &args, std::ostream &out, std::ostream &err);

inline const char *kCsvHeader = "iter,wall_time_s,objective,fw_gap,eta_hat,update_rank,eigengap_est";

/// One CSV line in the column order of kCsvHeader, 17 significant digits.
std::string csv_row(const IterationRow &row);

/// Applies a JSON object whose keys are SolverConfig field names.
void apply_config_json(SolverConfig &cfg, const std::string &text);

/// Worker count for concurrent runs: SPECTRAFW_THREADS if set and positive,
/// otherwise the hardware concurrency.
unsigned thread_budget();

} // namespace spectrafw::cli
