#pragma once

#include <vector>

#include "hat/net/ledger.hpp"
#include "hat/nn/model.hpp"

namespace hat::fusion {

using nn::Vec;

// Write-once cache of source-encoder outputs over the target's data. Each
// frozen encoder runs exactly once per sample, here, and never again for
// the rest of the run; the pass is inference-counted at construction.
class FeatureCache {
  public:
    FeatureCache(const std::vector<const nn::NetModel*>& sources, const std::vector<Vec>& inputs,
                 net::TrafficLedger& ledger);

    int num_sources() const { return static_cast<int>(features_.size()); }
    int num_samples() const;
    const Vec& get(int source_index, int sample_id) const;
    const std::vector<Vec>& per_source(int source_index) const;

  private:
    std::vector<std::vector<Vec>> features_;  // [source][sample]
};

}  // namespace hat::fusion
