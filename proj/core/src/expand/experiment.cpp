#include "hat/expand/experiment.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <memory>
#include <numeric>
#include <utility>

#include "hat/error.hpp"
#include "hat/fusion/feature_cache.hpp"
#include "hat/fusion/label_map.hpp"
#include "hat/fusion/mixer.hpp"
#include "hat/nn/train.hpp"
#include "hat/select/protocol.hpp"
#include "hat/select/stats.hpp"

namespace hat::expand {
namespace {

constexpr int kAttentionDim = 32;
constexpr double kAutoMarginOverAcc = 0.02;

std::string tag(const char* prefix, int domain_id) {
    return std::string(prefix) + std::to_string(domain_id);
}

struct TargetTrainView {
    std::vector<nn::Vec> train_inputs;  // in train_indices order
    std::vector<int> labeled_pos;       // positions within train_inputs
    std::vector<int> labeled_classes;
    std::vector<nn::Vec> labeled_inputs;
};

TargetTrainView make_train_view(const synth::DomainDataset& data) {
    TargetTrainView v;
    const auto& train = data.train_indices();
    v.train_inputs.reserve(train.size());
    for (std::size_t k = 0; k < train.size(); ++k) {
        int idx = train[k];
        v.train_inputs.push_back(data.input(idx));
        if (auto label = data.visible_label(idx)) {
            v.labeled_pos.push_back(static_cast<int>(k));
            v.labeled_classes.push_back(*label);
            v.labeled_inputs.push_back(data.input(idx));
        }
    }
    return v;
}

// Accuracy of a pulled model on the target's labeled samples, with the
// encoder passes metered.
double measure_labeled_acc(const nn::NetModel& model, const TargetTrainView& view,
                           net::TrafficLedger& ledger) {
    ledger.count_inference(static_cast<std::int64_t>(view.labeled_inputs.size()));
    return nn::accuracy(model, view.labeled_inputs, view.labeled_classes);
}

void pull_model(const net::Registry& registry, int source_id, int target_id, bool with_centroids,
                net::TrafficLedger& ledger) {
    const auto& src = registry.source(source_id);
    registry.send({net::MessageKind::kModelInquiry, 8, target_id, source_id}, ledger);
    std::int64_t payload = src.model.byte_size();
    if (with_centroids) payload += src.centroids.transfer_bytes();
    registry.send({net::MessageKind::kModelTransfer, payload, source_id, target_id}, ledger);
}

struct SelectionData {
    std::vector<int> final_ids;          // rank order
    std::map<int, double> acc_by_id;     // labeled-train accuracy of pulled models
};

SelectionData select_sources(const ExperimentConfig& cfg, const StrategySpec& strategy,
                             const net::Registry& registry, int target_id,
                             const TargetTrainView& view, std::uint64_t seed,
                             net::TrafficLedger& ledger) {
    SelectionData sel;
    switch (strategy.selection) {
        case SelectionKind::kHat:
        case SelectionKind::kAll: {
            select::SelectionConfig scfg;
            scfg.eta = strategy.selection == SelectionKind::kAll ? 1.0 : cfg.eta;
            scfg.omega = cfg.omega;
            scfg.n_p = cfg.n_p;
            scfg.per_class_entropy_rank = cfg.per_class_rank;
            scfg.target_centroids_use_true_labels = cfg.true_label_centroids;
            auto features = select::extract_stat_features(view.train_inputs);
            auto coarse = select::coarse_select(features, registry, target_id, scfg, ledger);
            auto outcome = select::joint_select(registry, coarse, view.train_inputs,
                                                view.labeled_pos, view.labeled_classes, scfg,
                                                ledger);
            sel.final_ids = outcome.final_ids;
            for (const auto& cs : outcome.scores) sel.acc_by_id[cs.domain_id] = cs.acc;
            break;
        }
        case SelectionKind::kRandom: {
            rng::Stream stream(seed, tag("selection-random-", target_id));
            auto ids = registry.source_ids();
            int keep = std::min<int>(cfg.n_p, static_cast<int>(ids.size()));
            for (int pos : stream.sample_without_replacement(static_cast<int>(ids.size()), keep)) {
                sel.final_ids.push_back(ids[static_cast<std::size_t>(pos)]);
            }
            for (int id : sel.final_ids) {
                pull_model(registry, id, target_id, false, ledger);
                sel.acc_by_id[id] = measure_labeled_acc(registry.source(id).model, view, ledger);
            }
            break;
        }
        case SelectionKind::kAccuracyOnly: {
            std::vector<std::pair<double, int>> ranked;
            for (int id : registry.source_ids()) {
                pull_model(registry, id, target_id, false, ledger);
                double acc = measure_labeled_acc(registry.source(id).model, view, ledger);
                sel.acc_by_id[id] = acc;
                ranked.emplace_back(acc, id);
            }
            std::sort(ranked.begin(), ranked.end(), [](const auto& a, const auto& b) {
                if (a.first != b.first) return a.first > b.first;
                return a.second < b.second;
            });
            int keep = std::min<int>(cfg.n_p, static_cast<int>(ranked.size()));
            for (int k = 0; k < keep; ++k) sel.final_ids.push_back(ranked[static_cast<std::size_t>(k)].second);
            break;
        }
    }
    if (sel.final_ids.empty()) throw ProtocolError("selection produced no sources");
    return sel;
}

std::vector<double> static_weights_for(const StrategySpec& strategy,
                                       const std::vector<int>& final_ids,
                                       const std::map<int, double>& acc_by_id) {
    std::size_t n = final_ids.size();
    std::vector<double> w(n, 1.0 / static_cast<double>(n));
    if (strategy.fusion == FusionKind::kWeighted) {
        double total = 0.0;
        for (int id : final_ids) total += acc_by_id.at(id);
        if (total > 0.0) {
            for (std::size_t i = 0; i < n; ++i) {
                w[i] = acc_by_id.at(final_ids[i]) / total;
            }
        }
    }
    return w;
}

double resolve_b(const ExperimentConfig& cfg, const std::vector<int>& final_ids,
                 const std::map<int, double>& acc_by_id) {
    if (!cfg.b_auto) return cfg.b;
    double best = 0.0;
    for (int id : final_ids) best = std::max(best, acc_by_id.at(id));
    return std::clamp(best + kAutoMarginOverAcc, 0.0, 1.0);
}

void fold_into(RunResult& run, const net::TrafficLedger& ledger) {
    run.traffic_bytes += ledger.total_bytes();
    run.inference_count += ledger.inference_count();
    for (int k = 0; k < net::kNumMessageKinds; ++k) {
        auto kind = static_cast<net::MessageKind>(k);
        run.traffic_by_kind[std::string(net::kind_name(kind))] += ledger.bytes(kind);
    }
}

void finish_means(RunResult& run) {
    double acc_sum = 0.0;
    double p_sum = 0.0;
    int p_count = 0;
    for (const auto& t : run.targets) {
        acc_sum += t.accuracy;
        if (t.fusion_used) {
            p_sum += t.p_acc;
            ++p_count;
        }
    }
    run.mean_accuracy = run.targets.empty() ? 0.0 : acc_sum / static_cast<double>(run.targets.size());
    run.mean_p_acc = p_count == 0 ? std::nan("") : p_sum / static_cast<double>(p_count);
}

}  // namespace

TargetOutcome run_target(const ExperimentConfig& cfg, const StrategySpec& strategy,
                         const net::Registry& registry, int target_id,
                         const synth::DomainDataset& data, std::uint64_t seed,
                         net::TrafficLedger& ledger, std::optional<nn::NetModel>* trained_model) {
    TargetOutcome out;
    out.target_id = target_id;

    auto skeleton = net::pick_skeleton(skeleton_library(cfg.input_dim),
                                       device_constraints_for(target_id));
    std::vector<int> global_space(static_cast<std::size_t>(cfg.classes));
    std::iota(global_space.begin(), global_space.end(), 0);
    rng::Stream model_stream(seed, tag("target-model-", target_id));
    auto target = nn::NetModel::build(skeleton, global_space, model_stream);

    inject::TrainLoopConfig loop;
    loop.epochs_target = cfg.epochs_target;
    loop.epochs_mixer = cfg.epochs_mixer;
    loop.unlabeled_sample_ratio = cfg.ratio;
    loop.lr_target = cfg.lr_target;
    loop.lr_mixer = cfg.lr_mixer;
    loop.seed = rng::mix64(seed ^ rng::hash_name(tag("loop-", target_id)));

    if (strategy.injection == InjectionKind::kNone) {
        std::vector<nn::NetModel> no_sources;
        inject::InjectionPolicy injection;
        injection.kind = inject::InjectionPolicy::Kind::kNone;
        inject::AdaptiveLearnerConfig learner{cfg.m, cfg.b_auto ? 0.5 : cfg.b};
        auto result = inject::joint_train(target, nullptr, no_sources, nullptr, nullptr, data,
                                          inject::FusionPolicy{}, injection, learner, loop);
        out.accuracy = inject::evaluate(target, data, data.test_indices());
        out.p_acc = std::nan("");
        out.fusion_used = false;
        out.best_mixer_acc = result.best_mixer_acc;
        out.history = std::move(result.history);
        if (trained_model) trained_model->emplace(std::move(target));
        return out;
    }

    auto view = make_train_view(data);
    auto sel = select_sources(cfg, strategy, registry, target_id, view, seed, ledger);
    if (strategy.fusion == FusionKind::kNearest) sel.final_ids.resize(1);

    std::vector<nn::NetModel> sources;
    std::vector<std::vector<int>> spaces;
    std::vector<int> feat_dims;
    sources.reserve(sel.final_ids.size());
    for (int id : sel.final_ids) {
        sources.push_back(registry.source(id).model);
        spaces.push_back(sources.back().label_space());
        feat_dims.push_back(sources.back().feature_dim());
    }

    fusion::LabelMap map(cfg.classes, std::move(spaces));

    std::vector<nn::Vec> all_inputs;
    all_inputs.reserve(static_cast<std::size_t>(data.size()));
    for (int i = 0; i < data.size(); ++i) all_inputs.push_back(data.input(i));
    std::vector<const nn::NetModel*> source_ptrs;
    for (const auto& s : sources) source_ptrs.push_back(&s);
    fusion::FeatureCache cache(source_ptrs, all_inputs, ledger);

    std::unique_ptr<fusion::MixerState> mixer;
    inject::FusionPolicy fpolicy;
    if (strategy.fusion == FusionKind::kHatMixer) {
        fpolicy.kind = inject::FusionPolicy::Kind::kMixer;
        for (auto& s : sources) s.unfreeze_classifier();
        rng::Stream mixer_stream(seed, tag("mixer-", target_id));
        mixer = std::make_unique<fusion::MixerState>(target.feature_dim(), feat_dims,
                                                     kAttentionDim, mixer_stream);
    } else {
        fpolicy.kind = inject::FusionPolicy::Kind::kStatic;
        fpolicy.static_weights = static_weights_for(strategy, sel.final_ids, sel.acc_by_id);
    }

    inject::InjectionPolicy ipolicy;
    if (strategy.injection == InjectionKind::kHatAdaptive) {
        ipolicy.kind = inject::InjectionPolicy::Kind::kAdaptive;
        ipolicy.gate = cfg.kd_always ? inject::KnowledgeDictionary::GatePolicy::kAlways
                                     : inject::KnowledgeDictionary::GatePolicy::kOnImprovement;
    } else {
        ipolicy.kind = inject::InjectionPolicy::Kind::kFixedAlpha;
        ipolicy.fixed_alpha = strategy.fixed_alpha;
        ipolicy.gate = inject::KnowledgeDictionary::GatePolicy::kAlways;
    }
    ipolicy.kd_full_refresh = cfg.kd_full_refresh;
    ipolicy.distill_labeled = cfg.distill_labeled;

    inject::AdaptiveLearnerConfig learner{cfg.m, resolve_b(cfg, sel.final_ids, sel.acc_by_id)};

    auto result = inject::joint_train(target, mixer.get(), sources, &map, &cache, data, fpolicy,
                                      ipolicy, learner, loop);

    out.accuracy = inject::evaluate(target, data, data.test_indices());
    out.p_acc = inject::evaluate_fused(fpolicy, mixer.get(), target, sources, map, cache, data,
                                       data.unlabeled_train_indices());
    out.fusion_used = true;
    out.selected_ids = sel.final_ids;
    out.best_mixer_acc = result.best_mixer_acc;
    out.history = std::move(result.history);
    if (trained_model) trained_model->emplace(std::move(target));
    return out;
}

RunResult run_otse(const ExperimentConfig& cfg, const StrategySpec& strategy, std::uint64_t seed) {
    auto fleet = build_otse_fleet(cfg, seed);
    RunResult run;
    run.strategy = strategy.name;
    run.seed = seed;
    net::TrafficLedger ledger;
    run.targets.push_back(run_target(cfg, strategy, fleet.registry, fleet.target_id,
                                     fleet.target_data, seed, ledger));
    fold_into(run, ledger);
    finish_means(run);
    return run;
}

RunResult run_mrse(const ExperimentConfig& cfg, const StrategySpec& strategy, std::uint64_t seed) {
    RunResult run;
    run.strategy = strategy.name;
    run.seed = seed;

    auto task = synth::make_task(cfg.classes, cfg.input_dim, cfg.stddev, seed);
    net::Registry registry;
    int next_id = 0;
    for (; next_id < cfg.groups.front(); ++next_id) {
        registry.register_source(make_source_handle(cfg, task, next_id, seed));
    }

    for (std::size_t round = 1; round < cfg.groups.size(); ++round) {
        run.registry_sizes.push_back(registry.size());
        net::TrafficLedger round_ledger;
        std::vector<std::pair<int, std::optional<nn::NetModel>>> trained;
        std::vector<synth::DomainDataset> datasets;
        for (int k = 0; k < cfg.groups[round]; ++k, ++next_id) {
            int target_id = next_id;
            registry.register_endpoint(target_id);
            auto shift = domain_shift(cfg, target_id, seed, true);
            datasets.push_back(domain_data(cfg, task, shift, target_id, seed, cfg.gamma));
            trained.emplace_back(target_id, std::nullopt);
            run.targets.push_back(run_target(cfg, strategy, registry, target_id, datasets.back(),
                                             seed, round_ledger, &trained.back().second));
        }
        for (std::size_t k = 0; k < trained.size(); ++k) {
            registry.register_source(promote_to_source(trained[k].first, std::move(datasets[k]),
                                                       std::move(*trained[k].second)));
        }
        run.round_traffic_bytes.push_back(round_ledger.total_bytes());
        fold_into(run, round_ledger);
    }
    finish_means(run);
    return run;
}

std::vector<RunResult> run_grid(const ExperimentConfig& cfg,
                                const std::vector<std::string>& strategy_names,
                                std::uint64_t base_seed) {
    if (strategy_names.empty()) throw ConfigError("grid needs at least one strategy");
    std::vector<RunResult> runs;
    for (int s = 0; s < cfg.seeds; ++s) {
        std::uint64_t seed = base_seed + static_cast<std::uint64_t>(s);
        auto fleet = build_otse_fleet(cfg, seed);
        for (const auto& name : strategy_names) {
            auto strategy = strategy_by_name(name);
            RunResult run;
            run.strategy = strategy.name;
            run.seed = seed;
            net::TrafficLedger ledger;
            run.targets.push_back(run_target(cfg, strategy, fleet.registry, fleet.target_id,
                                             fleet.target_data, seed, ledger));
            fold_into(run, ledger);
            finish_means(run);
            runs.push_back(std::move(run));
        }
    }
    return runs;
}

std::vector<RunResult> run_sweep(const ExperimentConfig& cfg, const std::string& param,
                                 const std::vector<double>& values, const std::string& strategy,
                                 std::uint64_t base_seed) {
    if (values.empty()) throw ConfigError("sweep needs at least one value");
    std::vector<RunResult> runs;
    for (double value : values) {
        ExperimentConfig point = cfg;
        if (param == "eta") {
            point.eta = value;
        } else if (param == "b") {
            point.b = value;
            point.b_auto = false;
        } else if (param == "np") {
            point.n_p = static_cast<int>(std::llround(value));
        } else if (param == "gamma") {
            point.gamma = value;
        } else {
            throw ConfigError("unknown sweep parameter '" + param + "'");
        }
        point.validate();
        char label[64];
        std::snprintf(label, sizeof(label), "%s@%s=%g", strategy.c_str(), param.c_str(), value);
        for (int s = 0; s < cfg.seeds; ++s) {
            auto run = run_otse(point, strategy_by_name(strategy),
                                base_seed + static_cast<std::uint64_t>(s));
            run.strategy = label;
            runs.push_back(std::move(run));
        }
    }
    return runs;
}

}  // namespace hat::expand
