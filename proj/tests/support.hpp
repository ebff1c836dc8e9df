#pragma once

// Shared test helpers: finite-difference gradient checks and cheap fleet
// stubs that skip source training where only shapes and byte counts matter.

#include <algorithm>
#include <cmath>
#include <span>
#include <string>
#include <vector>

#include "hat/net/registry.hpp"
#include "hat/nn/model.hpp"
#include "hat/nn/optimizer.hpp"
#include "hat/nn/train.hpp"
#include "hat/select/centroids.hpp"
#include "hat/select/stats.hpp"
#include "hat/synth/domain.hpp"
#include "hat/synth/task.hpp"

namespace testsup {

inline double rel_err(double a, double b) {
    double denom = std::max({std::abs(a), std::abs(b), 1e-3});
    return std::abs(a - b) / denom;
}

// Central difference through an arbitrary loss closure; the parameter is
// restored afterwards.
template <typename F>
double fd_slope(F&& loss, double& param, double step = 1e-5) {
    double keep = param;
    param = keep + step;
    double hi = loss();
    param = keep - step;
    double lo = loss();
    param = keep;
    return (hi - lo) / (2.0 * step);
}

inline std::vector<std::span<double>> model_param_spans(hat::nn::NetModel& m) {
    std::vector<std::span<double>> out;
    for (auto& layer : m.encoder()) {
        out.push_back(layer.weights());
        out.push_back(layer.bias());
    }
    out.push_back(m.classifier().weights());
    out.push_back(m.classifier().bias());
    return out;
}

// Max relative error between the tape's gradients and finite differences
// over every parameter of the model. `loss` must recompute the full loss
// from the model's current parameters.
template <typename F>
double max_fd_error(hat::nn::NetModel& model, hat::nn::GradientTape& tape, F&& loss,
                    double step = 1e-5) {
    double worst = 0.0;
    for (auto span : model_param_spans(model)) {
        auto grad = tape.grad(span.data());
        for (std::size_t j = 0; j < span.size(); ++j) {
            double fd = fd_slope(loss, span[j], step);
            worst = std::max(worst, rel_err(grad[j], fd));
        }
    }
    return worst;
}

// A registered source whose model is built but (by default) untrained:
// enough for traffic, counting and ranking tests.
inline hat::net::SourceDomainHandle stub_source(
    int id, const hat::synth::GlobalTaskSpec& task, std::vector<int> subset, std::uint64_t seed,
    const std::vector<hat::nn::LayerSpec>& skeleton, int n = 40, int train_epochs = 0) {
    hat::synth::DomainShiftSpec shift;
    shift.rotation_angle = 0.1;
    shift.rotation_plane_seed = seed * 977 + static_cast<std::uint64_t>(id);
    shift.label_subset = std::move(subset);
    auto data = hat::synth::sample_domain(task, shift, n, 1.0, seed + static_cast<std::uint64_t>(id));

    hat::rng::Stream model_stream(seed, "stub-model-" + std::to_string(id));
    auto model = hat::nn::NetModel::build(skeleton, data.label_space(), model_stream);

    std::vector<hat::nn::Vec> xs;
    std::vector<int> ys;
    for (int idx : data.train_indices()) {
        xs.push_back(data.input(idx));
        ys.push_back(*data.visible_label(idx));
    }
    if (train_epochs > 0) hat::nn::supervised_train(model, xs, ys, {train_epochs, 0.1});
    model.freeze_all();

    auto features = hat::select::extract_stat_features(xs);
    auto centroids = hat::select::compute_centroids(model, xs, &ys, 1.0);
    double self_acc = hat::nn::accuracy(model, xs, ys);
    return {id, std::move(data), std::move(model), std::move(features), std::move(centroids),
            self_acc};
}

}  // namespace testsup
