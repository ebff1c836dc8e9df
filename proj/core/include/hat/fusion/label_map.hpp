#pragma once

#include <vector>

#include "hat/nn/layer.hpp"

namespace hat::fusion {

using nn::Vec;

// Projects each source's local label indices into the shared global class
// space [0, C). Construction rejects duplicate or out-of-range ids.
class LabelMap {
  public:
    LabelMap(int num_global_classes, std::vector<std::vector<int>> per_source_spaces);

    int global_classes() const { return num_global_; }
    int num_sources() const { return static_cast<int>(spaces_.size()); }
    int local_size(int source_index) const;
    int to_global(int source_index, int local_index) const;

  private:
    int num_global_;
    std::vector<std::vector<int>> spaces_;
};

// Zero-padded embedding of a local distribution into the global space;
// total mass is preserved.
Vec map_prediction(const Vec& local_probs, const LabelMap& map, int source_index);

}  // namespace hat::fusion
