#pragma once

#include <string>
#include <vector>

#include "hat/expand/config.hpp"
#include "hat/expand/experiment.hpp"

namespace hat::expand {

std::string report_json(const std::vector<RunResult>& runs, const ExperimentConfig& cfg);
std::string comparison_csv(const std::vector<RunResult>& runs);
std::string history_csv(const TargetOutcome& target);

// Writes report.json and comparison.csv into out_dir, plus one
// history_<target>.csv per target under <strategy>-seed<seed>/
// subdirectories. Creates directories as needed.
void write_outputs(const std::vector<RunResult>& runs, const ExperimentConfig& cfg,
                   const std::string& out_dir);

}  // namespace hat::expand
