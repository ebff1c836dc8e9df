#pragma once

#include <string>
#include <vector>

#include "hat/fusion/feature_cache.hpp"
#include "hat/fusion/label_map.hpp"
#include "hat/nn/model.hpp"
#include "hat/nn/optimizer.hpp"
#include "hat/rng.hpp"

namespace hat::fusion {

// Attention head over the selected sources: one query projection from the
// target's feature space and one key projection per source, all landing in
// a shared d_common-dimensional space.
class MixerState {
  public:
    MixerState(int target_feature_dim, const std::vector<int>& source_feature_dims,
               int d_common, rng::Stream& stream);

    int d_common() const { return d_common_; }
    int num_sources() const { return static_cast<int>(keys_.size()); }
    nn::DenseLayer& query() { return query_; }
    const nn::DenseLayer& query() const { return query_; }
    nn::DenseLayer& key(int i) { return keys_.at(static_cast<std::size_t>(i)); }
    const nn::DenseLayer& key(int i) const { return keys_.at(static_cast<std::size_t>(i)); }

    std::int64_t param_count() const;

  private:
    int d_common_;
    nn::DenseLayer query_;
    std::vector<nn::DenseLayer> keys_;
};

struct FusedPrediction {
    Vec weights;  // over sources
    Vec p_mix;    // over global classes
};

// Everything the forward fusion pass produced, kept for the backward pass
// and for tests that want the intermediates.
struct FuseTrace {
    Vec q;
    std::vector<Vec> keys;
    Vec dots;
    Vec weights;
    std::vector<Vec> local_probs;
    std::vector<Vec> mapped;
    Vec p_mix;
};

// softmax over i of (L_query h_target) . (L_key_i h_i).
Vec attention_weights(const MixerState& mixer, const Vec& h_target,
                      const std::vector<Vec>& h_sources);

FuseTrace fuse_traced(const MixerState& mixer, const Vec& h_target,
                      const std::vector<Vec>& h_sources,
                      const std::vector<const nn::NetModel*>& sources, const LabelMap& map);

// p_mix = sum_i w_i * Map[softmax(classifier_i(h_i))].
FusedPrediction fuse(const MixerState& mixer, const Vec& h_target,
                     const std::vector<Vec>& h_sources,
                     const std::vector<const nn::NetModel*>& sources, const LabelMap& map);

// Fixed-weight fusion for baselines; weights must be a distribution.
FusedPrediction fuse_static(const std::vector<double>& weights,
                            const std::vector<Vec>& h_sources,
                            const std::vector<const nn::NetModel*>& sources,
                            const LabelMap& map);

// One gradient step on the mean cross-entropy of the fused prediction
// against the labels, through the attention softmax, the Map embedding and
// the source classifiers. Encoders are never touched: the optimizer owns
// only mixer and classifier parameters. Returns the pre-step batch loss.
double mixer_update(MixerState& mixer, std::vector<nn::NetModel>& sources, const LabelMap& map,
                    const std::vector<Vec>& h_target, const FeatureCache& cache,
                    const std::vector<int>& sample_ids, const std::vector<int>& labels_global,
                    nn::SgdOptimizer& optimizer, nn::GradientTape& tape);

// Convenience: the parameters mixer_update trains.
nn::ParamSet mixer_param_set(MixerState& mixer, std::vector<nn::NetModel>& sources);

// Debug dump of per-sample attention weights.
void write_weight_csv(const std::string& path, const std::vector<Vec>& weights);

}  // namespace hat::fusion
