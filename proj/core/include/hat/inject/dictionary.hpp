#pragma once

#include <map>
#include <vector>

#include "hat/nn/layer.hpp"

namespace hat::inject {

using nn::Vec;

// Soft labels distilled from the mixer, keyed by sample id. The default
// gate admits writes only when the mixer's accuracy strictly improves on
// the best seen so far; kAlways is for fixed-weight baselines that have no
// improving mixer. The watermark is monotone under both policies.
class KnowledgeDictionary {
  public:
    enum class GatePolicy { kOnImprovement, kAlways };

    explicit KnowledgeDictionary(int num_classes,
                                 GatePolicy policy = GatePolicy::kOnImprovement);

    // True when the gate opened and the entries were written.
    bool update(double mixer_acc, const std::vector<int>& sample_ids,
                const std::vector<Vec>& fused_predictions);
    // Whether the gate would open, for callers that compute predictions lazily.
    bool would_write(double mixer_acc) const;

    bool has(int sample_id) const { return entries_.count(sample_id) > 0; }
    const Vec& entry(int sample_id) const;
    std::size_t size() const { return entries_.size(); }
    double best_mixer_acc() const { return best_mixer_acc_; }
    int num_classes() const { return num_classes_; }

  private:
    int num_classes_;
    GatePolicy policy_;
    double best_mixer_acc_ = 0.0;
    std::map<int, Vec> entries_;
};

}  // namespace hat::inject
