#pragma once

#include <cstdint>
#include <map>
#include <optional>
#include <string>
#include <vector>

#include "hat/expand/config.hpp"
#include "hat/expand/fleet.hpp"
#include "hat/expand/strategy.hpp"
#include "hat/inject/trainer.hpp"
#include "hat/net/ledger.hpp"

namespace hat::expand {

struct TargetOutcome {
    int target_id = -1;
    double accuracy = 0.0;   // target model on its test split
    double p_acc = 0.0;      // fused prediction on unlabeled train; NaN without fusion
    bool fusion_used = false;
    std::vector<int> selected_ids;
    double best_mixer_acc = 0.0;
    std::vector<inject::EpochRecord> history;
};

struct RunResult {
    std::string strategy;
    std::uint64_t seed = 0;
    std::vector<TargetOutcome> targets;
    std::int64_t traffic_bytes = 0;
    std::map<std::string, std::int64_t> traffic_by_kind;
    std::int64_t inference_count = 0;
    double mean_accuracy = 0.0;
    double mean_p_acc = 0.0;  // NaN when no target used fusion
    // Multi-round runs only.
    std::vector<int> registry_sizes;  // at the start of each round
    std::vector<std::int64_t> round_traffic_bytes;
};

// One target against an existing registry: selection, fusion machinery,
// joint training, evaluation. All network and inference costs land in the
// ledger. When trained_model is non-null the final model is handed back
// for promotion.
TargetOutcome run_target(const ExperimentConfig& cfg, const StrategySpec& strategy,
                         const net::Registry& registry, int target_id,
                         const synth::DomainDataset& data, std::uint64_t seed,
                         net::TrafficLedger& ledger,
                         std::optional<nn::NetModel>* trained_model = nullptr);

// Single expansion: fixed source fleet, one new target.
RunResult run_otse(const ExperimentConfig& cfg, const StrategySpec& strategy, std::uint64_t seed);

// Multi-round expansion over cfg.groups: the first group seeds the
// registry, every later group joins as targets for one round and is
// promoted to source duty afterwards.
RunResult run_mrse(const ExperimentConfig& cfg, const StrategySpec& strategy, std::uint64_t seed);

// Strategy x seed sweep over a shared per-seed fleet. Seeds are
// base_seed .. base_seed + cfg.seeds - 1.
std::vector<RunResult> run_grid(const ExperimentConfig& cfg,
                                const std::vector<std::string>& strategy_names,
                                std::uint64_t base_seed);

// One-parameter sweep (eta, b, np or gamma); each point is tagged
// "<strategy>@<param>=<value>" in its result.
std::vector<RunResult> run_sweep(const ExperimentConfig& cfg, const std::string& param,
                                 const std::vector<double>& values, const std::string& strategy,
                                 std::uint64_t base_seed);

}  // namespace hat::expand
