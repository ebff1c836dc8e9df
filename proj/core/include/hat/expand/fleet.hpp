#pragma once

#include <cstdint>
#include <vector>

#include "hat/expand/config.hpp"
#include "hat/net/registry.hpp"
#include "hat/net/skeleton.hpp"
#include "hat/synth/domain.hpp"
#include "hat/synth/task.hpp"

namespace hat::expand {

// Encoder stacks every device chooses from, capacity ascending.
std::vector<std::vector<nn::LayerSpec>> skeleton_library(int input_dim);

// Per-domain budget; cycles through capacity tiers so the fleet stays
// heterogeneous.
net::DeviceConstraints device_constraints_for(int domain_id);

// Seeded rotation/translation/scale plus the domain's label subset.
// Targets see every class; sources draw a random subset.
synth::DomainShiftSpec domain_shift(const ExperimentConfig& cfg, int domain_id,
                                    std::uint64_t run_seed, bool full_labels);

synth::DomainDataset domain_data(const ExperimentConfig& cfg, const synth::GlobalTaskSpec& task,
                                 const synth::DomainShiftSpec& shift, int domain_id,
                                 std::uint64_t run_seed, double gamma);

// Fully labeled domain with a freshly trained and frozen model, packaged
// with its announced statistics and true-label centroids.
net::SourceDomainHandle make_source_handle(const ExperimentConfig& cfg,
                                           const synth::GlobalTaskSpec& task, int domain_id,
                                           std::uint64_t run_seed);

// Re-packages a trained target as a source. Statistics come from its train
// inputs; centroids and the reported accuracy only from the samples whose
// labels it actually holds.
net::SourceDomainHandle promote_to_source(int domain_id, synth::DomainDataset dataset,
                                          nn::NetModel model);

struct OtseFleet {
    synth::GlobalTaskSpec task;
    net::Registry registry;
    int target_id = 0;
    synth::DomainDataset target_data;
};

// cfg.sources source domains (ids 0..N-1) plus one target endpoint (id N).
OtseFleet build_otse_fleet(const ExperimentConfig& cfg, std::uint64_t seed);

}  // namespace hat::expand
