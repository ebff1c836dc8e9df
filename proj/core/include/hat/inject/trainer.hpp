#pragma once

#include <cstdint>
#include <vector>

#include "hat/fusion/feature_cache.hpp"
#include "hat/fusion/label_map.hpp"
#include "hat/fusion/mixer.hpp"
#include "hat/inject/dictionary.hpp"
#include "hat/nn/model.hpp"
#include "hat/nn/optimizer.hpp"
#include "hat/synth/domain.hpp"

namespace hat::inject {

// alpha = max(0, m * (acc - b)).
struct AdaptiveLearnerConfig {
    double m = 2.0;
    double b = 0.3;
    void validate() const;
};

struct TrainLoopConfig {
    int epochs_target = 200;
    int epochs_mixer = 100;
    // Unlabeled batch size per epoch = round(ratio * |labeled|), capped at
    // the unlabeled pool size.
    double unlabeled_sample_ratio = 1.0;
    double lr_target = 0.05;
    double lr_mixer = 0.05;
    std::uint64_t seed = 0;
    void validate() const;
};

double adaptive_alpha(double acc_train, const AdaptiveLearnerConfig& cfg);

// How fused predictions are produced during training.
struct FusionPolicy {
    enum class Kind { kMixer, kStatic };
    Kind kind = Kind::kMixer;
    std::vector<double> static_weights;  // kStatic only; a distribution over sources
};

// How fused predictions feed back into the target model.
struct InjectionPolicy {
    enum class Kind { kAdaptive, kFixedAlpha, kNone };
    Kind kind = Kind::kAdaptive;
    double fixed_alpha = 1.0;  // kFixedAlpha only
    KnowledgeDictionary::GatePolicy gate = KnowledgeDictionary::GatePolicy::kOnImprovement;
    // Rewrite every unlabeled sample (not just the epoch's batch) when the
    // gate opens.
    bool kd_full_refresh = false;
    // Also distill labeled samples.
    bool distill_labeled = false;
};

struct TargetLossResult {
    double label_loss = 0.0;    // mean hard CE over the labeled batch
    double distill_loss = 0.0;  // mean soft CE over dictionary hits, pre-alpha
    double total = 0.0;         // label_loss + alpha * distill_loss
};

// Accumulates gradients of label_loss + alpha * distill_loss into the tape.
// Unlabeled samples without a dictionary entry contribute nothing; with
// alpha = 0 or an empty dictionary this is exactly the supervised loss.
TargetLossResult target_loss_and_gradients(const nn::NetModel& model,
                                           const std::vector<Vec>& labeled_xs,
                                           const std::vector<int>& labeled_ys,
                                           const std::vector<Vec>& unlabeled_xs,
                                           const std::vector<int>& unlabeled_ids,
                                           const KnowledgeDictionary& kd, double alpha,
                                           nn::GradientTape& tape);

struct EpochRecord {
    int epoch = 0;
    double mixer_acc = 0.0;
    double alpha = 0.0;
    double label_loss = 0.0;
    double distill_loss = 0.0;
    double val_acc = 0.0;
};

struct JointTrainResult {
    std::vector<EpochRecord> history;
    double best_mixer_acc = 0.0;
    double final_val_acc = 0.0;
};

// Accuracy against ground truth on a dataset split.
double evaluate(const nn::NetModel& model, const synth::DomainDataset& data,
                const std::vector<int>& split_indices);

// Accuracy of the fused prediction (arg-max of p_mix) on a split. mixer may
// be null for static fusion.
double evaluate_fused(const FusionPolicy& policy, const fusion::MixerState* mixer,
                      const nn::NetModel& target, const std::vector<nn::NetModel>& sources,
                      const fusion::LabelMap& map, const fusion::FeatureCache& cache,
                      const synth::DomainDataset& data, const std::vector<int>& indices);

// The joint training loop. Per epoch: encode the labeled set and a seeded
// unlabeled sample with the current target encoder; one mixer/classifier
// step while mixer epochs remain; alpha from the mixer's labeled-train
// accuracy; one target step on the combined loss; dictionary update from
// this epoch's fused predictions. Source encoders are only ever read
// through the cache, so their inference count stays flat across epochs.
// With InjectionPolicy::Kind::kNone the loop is plain supervised training
// and mixer/map/cache may be null.
JointTrainResult joint_train(nn::NetModel& target, fusion::MixerState* mixer,
                             std::vector<nn::NetModel>& sources, const fusion::LabelMap* map,
                             const fusion::FeatureCache* cache, const synth::DomainDataset& data,
                             const FusionPolicy& fusion_policy, const InjectionPolicy& injection,
                             const AdaptiveLearnerConfig& learner, const TrainLoopConfig& loop);

}  // namespace hat::inject
