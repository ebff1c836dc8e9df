#include "hat/expand/fleet.hpp"

#include <algorithm>
#include <numeric>
#include <string>
#include <utility>

#include "hat/nn/train.hpp"
#include "hat/select/centroids.hpp"
#include "hat/select/stats.hpp"

namespace hat::expand {
namespace {

std::string tag(const char* prefix, int domain_id) {
    return std::string(prefix) + std::to_string(domain_id);
}

std::uint64_t derive_seed(std::uint64_t run_seed, const std::string& name) {
    return rng::mix64(run_seed ^ rng::hash_name(name));
}

// Train inputs and their visible labels; labeled_only keeps just the
// samples the domain holds labels for.
void collect_train(const synth::DomainDataset& data, bool labeled_only, std::vector<nn::Vec>& xs,
                   std::vector<int>& ys) {
    xs.clear();
    ys.clear();
    for (int idx : data.train_indices()) {
        auto label = data.visible_label(idx);
        if (labeled_only && !label.has_value()) continue;
        xs.push_back(data.input(idx));
        ys.push_back(label.has_value() ? *label : -1);
    }
}

}  // namespace

std::vector<std::vector<nn::LayerSpec>> skeleton_library(int input_dim) {
    using nn::Activation;
    const int d = input_dim;
    return {
        {{d, 12, Activation::kRelu}},
        {{d, 16, Activation::kRelu}, {16, 14, Activation::kRelu}},
        {{d, 24, Activation::kRelu}, {24, 16, Activation::kRelu}},
        {{d, 32, Activation::kRelu}, {32, 20, Activation::kRelu}},
    };
}

net::DeviceConstraints device_constraints_for(int domain_id) {
    static const std::int64_t param_caps[] = {200, 500, 800, 1200};
    std::int64_t cap = param_caps[domain_id % 4];
    return {cap, cap};
}

synth::DomainShiftSpec domain_shift(const ExperimentConfig& cfg, int domain_id,
                                    std::uint64_t run_seed, bool full_labels) {
    rng::Stream stream(run_seed, tag("shift-", domain_id));
    synth::DomainShiftSpec shift;
    shift.rotation_angle = stream.uniform(-cfg.rotation, cfg.rotation);
    shift.rotation_plane_seed = derive_seed(run_seed, tag("plane-", domain_id));
    shift.scale = stream.uniform(cfg.scale_min, cfg.scale_max);
    if (cfg.translation_stddev > 0.0) {
        shift.translation.resize(static_cast<std::size_t>(cfg.input_dim));
        for (double& t : shift.translation) t = stream.normal(0.0, cfg.translation_stddev);
    }
    if (full_labels) {
        shift.label_subset.resize(static_cast<std::size_t>(cfg.classes));
        std::iota(shift.label_subset.begin(), shift.label_subset.end(), 0);
    } else {
        shift.label_subset = stream.sample_without_replacement(cfg.classes, cfg.source_label_count);
        std::sort(shift.label_subset.begin(), shift.label_subset.end());
    }
    return shift;
}

synth::DomainDataset domain_data(const ExperimentConfig& cfg, const synth::GlobalTaskSpec& task,
                                 const synth::DomainShiftSpec& shift, int domain_id,
                                 std::uint64_t run_seed, double gamma) {
    return synth::sample_domain(task, shift, cfg.samples, gamma,
                                derive_seed(run_seed, tag("data-", domain_id)));
}

net::SourceDomainHandle make_source_handle(const ExperimentConfig& cfg,
                                           const synth::GlobalTaskSpec& task, int domain_id,
                                           std::uint64_t run_seed) {
    auto shift = domain_shift(cfg, domain_id, run_seed, false);
    auto data = domain_data(cfg, task, shift, domain_id, run_seed, 1.0);

    auto skeleton = net::pick_skeleton(skeleton_library(cfg.input_dim),
                                       device_constraints_for(domain_id));
    rng::Stream model_stream(run_seed, tag("source-model-", domain_id));
    auto model = nn::NetModel::build(skeleton, data.label_space(), model_stream);

    std::vector<nn::Vec> xs;
    std::vector<int> ys;
    collect_train(data, true, xs, ys);
    nn::supervised_train(model, xs, ys, {cfg.source_epochs, cfg.source_lr});
    model.freeze_all();

    auto features = select::extract_stat_features(xs);
    auto centroids = select::compute_centroids(model, xs, &ys, cfg.omega);
    double self_acc = nn::accuracy(model, xs, ys);
    return {domain_id,  std::move(data),      std::move(model),
            std::move(features), std::move(centroids), self_acc};
}

net::SourceDomainHandle promote_to_source(int domain_id, synth::DomainDataset dataset,
                                          nn::NetModel model) {
    model.freeze_all();

    std::vector<nn::Vec> all_xs;
    std::vector<int> unused;
    collect_train(dataset, false, all_xs, unused);
    std::vector<nn::Vec> labeled_xs;
    std::vector<int> labeled_ys;
    collect_train(dataset, true, labeled_xs, labeled_ys);

    auto features = select::extract_stat_features(all_xs);
    auto centroids = select::compute_centroids(model, labeled_xs, &labeled_ys, 1.0);
    double self_acc = nn::accuracy(model, labeled_xs, labeled_ys);
    return {domain_id,  std::move(dataset),   std::move(model),
            std::move(features), std::move(centroids), self_acc};
}

OtseFleet build_otse_fleet(const ExperimentConfig& cfg, std::uint64_t seed) {
    auto task = synth::make_task(cfg.classes, cfg.input_dim, cfg.stddev, seed);
    net::Registry registry;
    for (int id = 0; id < cfg.sources; ++id) {
        registry.register_source(make_source_handle(cfg, task, id, seed));
    }
    int target_id = cfg.sources;
    registry.register_endpoint(target_id);
    auto shift = domain_shift(cfg, target_id, seed, true);
    auto data = domain_data(cfg, task, shift, target_id, seed, cfg.gamma);
    return {std::move(task), std::move(registry), target_id, std::move(data)};
}

}  // namespace hat::expand
