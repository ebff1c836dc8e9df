#include "hat/inject/trainer.hpp"

#include <algorithm>
#include <cmath>
#include <memory>
#include <string>

#include "hat/error.hpp"
#include "hat/nn/ops.hpp"
#include "hat/nn/train.hpp"
#include "hat/rng.hpp"

namespace hat::inject {

void AdaptiveLearnerConfig::validate() const {
    if (!(m > 0.0)) throw NumericError("m must be positive");
    if (b < 0.0 || b > 1.0) throw NumericError("b must be in [0,1]");
}

void TrainLoopConfig::validate() const {
    if (epochs_target < 1) throw NumericError("need at least one target epoch");
    if (epochs_mixer < 0) throw NumericError("negative mixer epoch count");
    if (!(unlabeled_sample_ratio > 0.0)) throw NumericError("sample ratio must be positive");
    if (!(lr_target > 0.0) || !(lr_mixer > 0.0)) throw NumericError("learning rates must be positive");
}

double adaptive_alpha(double acc_train, const AdaptiveLearnerConfig& cfg) {
    cfg.validate();
    if (acc_train < 0.0 || acc_train > 1.0) throw NumericError("accuracy outside [0,1]");
    return std::max(0.0, cfg.m * (acc_train - cfg.b));
}

TargetLossResult target_loss_and_gradients(const nn::NetModel& model,
                                           const std::vector<Vec>& labeled_xs,
                                           const std::vector<int>& labeled_ys,
                                           const std::vector<Vec>& unlabeled_xs,
                                           const std::vector<int>& unlabeled_ids,
                                           const KnowledgeDictionary& kd, double alpha,
                                           nn::GradientTape& tape) {
    if (labeled_xs.empty()) throw DimensionError("empty labeled batch");
    if (unlabeled_xs.size() != unlabeled_ids.size()) {
        throw DimensionError("unlabeled inputs and ids disagree in length");
    }
    if (alpha < 0.0) throw NumericError("alpha must be non-negative");

    TargetLossResult result;
    result.label_loss = nn::accumulate_label_gradients(
        model, labeled_xs, labeled_ys, tape, 1.0 / static_cast<double>(labeled_xs.size()));

    if (alpha > 0.0 && kd.size() > 0) {
        std::vector<std::size_t> hits;
        for (std::size_t k = 0; k < unlabeled_ids.size(); ++k) {
            if (kd.has(unlabeled_ids[k])) hits.push_back(k);
        }
        if (!hits.empty()) {
            double scale = alpha / static_cast<double>(hits.size());
            double sum = 0.0;
            for (std::size_t k : hits) {
                nn::EncoderTrace trace;
                Vec h = model.encode(unlabeled_xs[k], trace);
                Vec logits = model.classify(h);
                nn::LossGrad lg = nn::ce_loss_soft(logits, kd.entry(unlabeled_ids[k]));
                sum += lg.loss;
                for (double& g : lg.dlogits) g *= scale;
                Vec dh = nn::classifier_backward(model, h, lg.dlogits, tape);
                nn::encoder_backward(model, trace, dh, tape);
            }
            result.distill_loss = sum / static_cast<double>(hits.size());
        }
    }
    result.total = result.label_loss + alpha * result.distill_loss;
    return result;
}

double evaluate(const nn::NetModel& model, const synth::DomainDataset& data,
                const std::vector<int>& split_indices) {
    if (split_indices.empty()) throw DimensionError("empty evaluation split");
    synth::EvalView truth(data);
    int hits = 0;
    for (int i : split_indices) {
        if (nn::predict_class(model, data.input(i)) == truth.label(i)) ++hits;
    }
    return static_cast<double>(hits) / static_cast<double>(split_indices.size());
}

namespace {

// Deck-of-cards sampling over the unlabeled ids: deal without replacement,
// reshuffle when the deck runs out. Every id is visited before any repeats
// across epochs, which is what makes the whole pool get used.
class CyclicSampler {
  public:
    CyclicSampler(std::vector<int> ids, rng::Stream stream)
        : ids_(std::move(ids)), stream_(std::move(stream)) {
        if (!ids_.empty()) stream_.shuffle(ids_);
    }

    std::vector<int> next(std::size_t count) {
        std::vector<int> out;
        if (ids_.empty()) return out;
        count = std::min(count, ids_.size());
        while (out.size() < count) {
            if (pos_ == ids_.size()) {
                stream_.shuffle(ids_);
                pos_ = 0;
            }
            out.push_back(ids_[pos_++]);
        }
        return out;
    }

  private:
    std::vector<int> ids_;
    rng::Stream stream_;
    std::size_t pos_ = 0;
};

std::vector<const nn::NetModel*> as_pointers(const std::vector<nn::NetModel>& models) {
    std::vector<const nn::NetModel*> out;
    out.reserve(models.size());
    for (const nn::NetModel& m : models) out.push_back(&m);
    return out;
}

fusion::FusedPrediction fuse_by_policy(const FusionPolicy& policy,
                                       const fusion::MixerState* mixer, const Vec* h_target,
                                       const std::vector<Vec>& h_sources,
                                       const std::vector<const nn::NetModel*>& sources,
                                       const fusion::LabelMap& map) {
    if (policy.kind == FusionPolicy::Kind::kMixer) {
        return fusion::fuse(*mixer, *h_target, h_sources, sources, map);
    }
    return fusion::fuse_static(policy.static_weights, h_sources, sources, map);
}

}  // namespace

double evaluate_fused(const FusionPolicy& policy, const fusion::MixerState* mixer,
                      const nn::NetModel& target, const std::vector<nn::NetModel>& sources,
                      const fusion::LabelMap& map, const fusion::FeatureCache& cache,
                      const synth::DomainDataset& data, const std::vector<int>& indices) {
    if (indices.empty()) throw DimensionError("empty evaluation split");
    if (policy.kind == FusionPolicy::Kind::kMixer && mixer == nullptr) {
        throw ProtocolError("mixer fusion needs a mixer");
    }
    synth::EvalView truth(data);
    std::vector<const nn::NetModel*> ptrs = as_pointers(sources);
    int hits = 0;
    for (int id : indices) {
        std::vector<Vec> h_src;
        h_src.reserve(sources.size());
        for (std::size_t i = 0; i < sources.size(); ++i) {
            h_src.push_back(cache.get(static_cast<int>(i), id));
        }
        Vec h_t;
        if (policy.kind == FusionPolicy::Kind::kMixer) h_t = target.encode(data.input(id));
        fusion::FusedPrediction fp = fuse_by_policy(policy, mixer, &h_t, h_src, ptrs, map);
        if (static_cast<int>(nn::argmax(fp.p_mix)) == truth.label(id)) ++hits;
    }
    return static_cast<double>(hits) / static_cast<double>(indices.size());
}

JointTrainResult joint_train(nn::NetModel& target, fusion::MixerState* mixer,
                             std::vector<nn::NetModel>& sources, const fusion::LabelMap* map,
                             const fusion::FeatureCache* cache, const synth::DomainDataset& data,
                             const FusionPolicy& fusion_policy, const InjectionPolicy& injection,
                             const AdaptiveLearnerConfig& learner, const TrainLoopConfig& loop) {
    loop.validate();
    if (injection.kind == InjectionPolicy::Kind::kAdaptive) learner.validate();

    const bool fuse_active = injection.kind != InjectionPolicy::Kind::kNone;
    const bool train_mixer = fuse_active && fusion_policy.kind == FusionPolicy::Kind::kMixer;
    if (fuse_active) {
        if (sources.empty()) throw ProtocolError("fusion needs selected sources");
        if (map == nullptr || cache == nullptr) throw ProtocolError("fusion needs map and cache");
        if (train_mixer && mixer == nullptr) throw ProtocolError("mixer fusion needs a mixer");
        if (target.num_local_labels() != map->global_classes()) {
            throw ProtocolError("target model must cover the global class space");
        }
    }

    std::vector<int> labeled_idx = data.labeled_train_indices();
    if (labeled_idx.empty()) throw DimensionError("no labeled training data");
    std::vector<Vec> labeled_xs;
    std::vector<int> labeled_ys;
    labeled_xs.reserve(labeled_idx.size());
    for (int i : labeled_idx) {
        labeled_xs.push_back(data.input(i));
        labeled_ys.push_back(*data.visible_label(i));
    }
    std::vector<int> unlabeled_idx = data.unlabeled_train_indices();

    std::size_t batch_n = static_cast<std::size_t>(std::llround(
        loop.unlabeled_sample_ratio * static_cast<double>(labeled_idx.size())));
    batch_n = std::min(batch_n, unlabeled_idx.size());
    CyclicSampler sampler(unlabeled_idx, rng::Stream(loop.seed, "unlabeled"));

    nn::ParamSet target_params;
    target_params.add_model(target);
    nn::SgdOptimizer opt_target(loop.lr_target, target_params);
    nn::GradientTape tape_target(target_params);

    std::unique_ptr<nn::SgdOptimizer> opt_mixer;
    std::unique_ptr<nn::GradientTape> tape_mixer;
    if (train_mixer) {
        nn::ParamSet mixer_params = fusion::mixer_param_set(*mixer, sources);
        if (mixer_params.overlaps(target_params)) {
            throw ProtocolError("mixer and target optimizers share parameters");
        }
        opt_mixer = std::make_unique<nn::SgdOptimizer>(loop.lr_mixer, mixer_params);
        tape_mixer = std::make_unique<nn::GradientTape>(mixer_params);
    }

    std::vector<const nn::NetModel*> source_ptrs = as_pointers(sources);
    KnowledgeDictionary kd(fuse_active ? map->global_classes() : target.num_local_labels(),
                           injection.gate);

    JointTrainResult result;
    result.history.reserve(static_cast<std::size_t>(loop.epochs_target));

    for (int epoch = 0; epoch < loop.epochs_target; ++epoch) {
        std::vector<int> batch_ids = sampler.next(batch_n);

        double mixer_acc = 0.0;
        std::vector<Vec> h_target_unlabeled;
        if (fuse_active) {
            std::vector<Vec> h_target_labeled;
            if (train_mixer) {
                h_target_labeled.reserve(labeled_xs.size());
                for (const Vec& x : labeled_xs) h_target_labeled.push_back(target.encode(x));
                if (epoch < loop.epochs_mixer) {
                    fusion::mixer_update(*mixer, sources, *map, h_target_labeled, *cache,
                                         labeled_idx, labeled_ys, *opt_mixer, *tape_mixer);
                }
            }
            int hits = 0;
            for (std::size_t k = 0; k < labeled_idx.size(); ++k) {
                std::vector<Vec> h_src;
                h_src.reserve(sources.size());
                for (std::size_t i = 0; i < sources.size(); ++i) {
                    h_src.push_back(cache->get(static_cast<int>(i), labeled_idx[k]));
                }
                const Vec* h_t =
                    train_mixer ? &h_target_labeled[k] : nullptr;
                fusion::FusedPrediction fp =
                    fuse_by_policy(fusion_policy, mixer, h_t, h_src, source_ptrs, *map);
                if (static_cast<int>(nn::argmax(fp.p_mix)) == labeled_ys[k]) ++hits;
            }
            mixer_acc = static_cast<double>(hits) / static_cast<double>(labeled_idx.size());

            if (train_mixer) {
                h_target_unlabeled.reserve(batch_ids.size());
                for (int id : batch_ids) h_target_unlabeled.push_back(target.encode(data.input(id)));
            }
        }

        double alpha = 0.0;
        switch (injection.kind) {
            case InjectionPolicy::Kind::kAdaptive: alpha = adaptive_alpha(mixer_acc, learner); break;
            case InjectionPolicy::Kind::kFixedAlpha: alpha = injection.fixed_alpha; break;
            case InjectionPolicy::Kind::kNone: alpha = 0.0; break;
        }

        // Fused predictions for the dictionary come from this epoch's
        // pre-update target encoder; the write itself happens after the
        // target step so the step consumes last epoch's dictionary.
        std::vector<int> kd_ids;
        std::vector<Vec> kd_preds;
        if (fuse_active && kd.would_write(mixer_acc)) {
            kd_ids = injection.kd_full_refresh ? unlabeled_idx : batch_ids;
            if (injection.kd_full_refresh && train_mixer) {
                h_target_unlabeled.clear();
                h_target_unlabeled.reserve(kd_ids.size());
                for (int id : kd_ids) h_target_unlabeled.push_back(target.encode(data.input(id)));
            }
            if (injection.distill_labeled) {
                kd_ids.insert(kd_ids.end(), labeled_idx.begin(), labeled_idx.end());
            }
            kd_preds.reserve(kd_ids.size());
            for (std::size_t k = 0; k < kd_ids.size(); ++k) {
                int id = kd_ids[k];
                std::vector<Vec> h_src;
                h_src.reserve(sources.size());
                for (std::size_t i = 0; i < sources.size(); ++i) {
                    h_src.push_back(cache->get(static_cast<int>(i), id));
                }
                Vec h_t;
                if (train_mixer) {
                    bool is_batch = k < h_target_unlabeled.size();
                    h_t = is_batch ? h_target_unlabeled[k] : target.encode(data.input(id));
                }
                fusion::FusedPrediction fp =
                    fuse_by_policy(fusion_policy, mixer, &h_t, h_src, source_ptrs, *map);
                kd_preds.push_back(std::move(fp.p_mix));
            }
        }

        std::vector<Vec> batch_xs;
        batch_xs.reserve(batch_ids.size());
        for (int id : batch_ids) batch_xs.push_back(data.input(id));
        std::vector<int> distill_ids = batch_ids;
        std::vector<Vec> distill_xs = batch_xs;
        if (injection.distill_labeled) {
            distill_ids.insert(distill_ids.end(), labeled_idx.begin(), labeled_idx.end());
            distill_xs.insert(distill_xs.end(), labeled_xs.begin(), labeled_xs.end());
        }
        TargetLossResult losses = target_loss_and_gradients(
            target, labeled_xs, labeled_ys, distill_xs, distill_ids, kd, alpha, tape_target);
        if (!std::isfinite(losses.total)) {
            throw NumericError("non-finite training loss at epoch " + std::to_string(epoch));
        }
        tape_target.mark_populated();
        opt_target.step(tape_target);

        if (!kd_ids.empty()) kd.update(mixer_acc, kd_ids, kd_preds);
        else if (fuse_active) kd.update(mixer_acc, {}, {});  // track the watermark

        double val_acc = evaluate(target, data, data.val_indices());
        result.history.push_back({epoch, mixer_acc, alpha, losses.label_loss,
                                  losses.distill_loss, val_acc});
    }

    result.best_mixer_acc = kd.best_mixer_acc();
    result.final_val_acc = result.history.back().val_acc;
    return result;
}

}  // namespace hat::inject
