#pragma once

#include <string>
#include <vector>

#include "chemsim/config.hpp"
#include "chemsim/convergence.hpp"
#include "chemsim/estimates.hpp"
#include "chemsim/weakform.hpp"

namespace chemsim {

// Command-line driver. Subcommands (each takes a config file path):
//   run        integrate; write ledger.csv, checks.csv and snapshots/
//   audit      run, then evaluate the weak-form suite; write weakform.csv
//   sweep-eps  regularization sweep; write sweep_eps.csv
//   refine     space/time refinement study; write refine.csv
//   oracle     uniform-data run against the ODE reference; write oracle.csv
//   bounds     print the a priori bound constants (no files)
// Exit codes: 0 every gated quantity passed; 1 usage, configuration or I/O
// errors; 2 the computation finished but a verification failed (reports are
// still written). All numbers are printed with 17 significant digits.
int cli_main(int argc, const char* const* argv);

// CSV renderings used by the driver (header line + one row per entry).
std::string ledger_csv(const std::vector<LedgerRow>& rows);
std::string checks_csv(const std::vector<CheckRow>& rows);
std::string sweep_csv(const SweepResult& result);
std::string bounds_table(const BoundConstants& b);

// The audit suite for a config: `spatial_modes` spatial families (constant,
// then 1 + cos of mode k for k = 1..spatial_modes-1), each over an early
// bump, a late bump and an initial window. spatial_modes = 2 reproduces
// default_suite.
std::vector<TestFunction> suite_from_config(const RunConfig& cfg, const Grid& g);

}  // namespace chemsim
