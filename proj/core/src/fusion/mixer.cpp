#include "hat/fusion/mixer.hpp"

#include <cmath>
#include <cstdio>
#include <fstream>

#include "hat/error.hpp"
#include "hat/nn/ops.hpp"

namespace hat::fusion {

namespace {
constexpr double kProbFloor = 1e-12;
}

MixerState::MixerState(int target_feature_dim, const std::vector<int>& source_feature_dims,
                       int d_common, rng::Stream& stream)
    : d_common_(d_common),
      query_(nn::LayerSpec{target_feature_dim, d_common, nn::Activation::kIdentity}, stream) {
    if (d_common < 1) throw DimensionError("d_common must be at least 1");
    if (source_feature_dims.empty()) throw DimensionError("mixer needs at least one source");
    keys_.reserve(source_feature_dims.size());
    for (int dim : source_feature_dims) {
        keys_.emplace_back(nn::LayerSpec{dim, d_common, nn::Activation::kIdentity}, stream);
    }
}

std::int64_t MixerState::param_count() const {
    std::int64_t total = query_.param_count();
    for (const nn::DenseLayer& k : keys_) total += k.param_count();
    return total;
}

Vec attention_weights(const MixerState& mixer, const Vec& h_target,
                      const std::vector<Vec>& h_sources) {
    if (h_sources.size() != static_cast<std::size_t>(mixer.num_sources())) {
        throw DimensionError("source feature count does not match mixer keys");
    }
    Vec q = mixer.query().forward(h_target);
    Vec dots(h_sources.size());
    for (std::size_t i = 0; i < h_sources.size(); ++i) {
        Vec key = mixer.key(static_cast<int>(i)).forward(h_sources[i]);
        double d = 0.0;
        for (std::size_t j = 0; j < q.size(); ++j) d += q[j] * key[j];
        dots[i] = d;
    }
    return nn::softmax(dots);
}

FuseTrace fuse_traced(const MixerState& mixer, const Vec& h_target,
                      const std::vector<Vec>& h_sources,
                      const std::vector<const nn::NetModel*>& sources, const LabelMap& map) {
    if (h_sources.size() != sources.size() ||
        sources.size() != static_cast<std::size_t>(map.num_sources()) ||
        sources.size() != static_cast<std::size_t>(mixer.num_sources())) {
        throw DimensionError("mixer, sources and map disagree on source count");
    }
    FuseTrace trace;
    trace.q = mixer.query().forward(h_target);
    trace.keys.reserve(sources.size());
    trace.dots.resize(sources.size());
    for (std::size_t i = 0; i < sources.size(); ++i) {
        trace.keys.push_back(mixer.key(static_cast<int>(i)).forward(h_sources[i]));
        double d = 0.0;
        for (std::size_t j = 0; j < trace.q.size(); ++j) d += trace.q[j] * trace.keys[i][j];
        trace.dots[i] = d;
    }
    trace.weights = nn::softmax(trace.dots);
    trace.local_probs.reserve(sources.size());
    trace.mapped.reserve(sources.size());
    trace.p_mix.assign(static_cast<std::size_t>(map.global_classes()), 0.0);
    for (std::size_t i = 0; i < sources.size(); ++i) {
        trace.local_probs.push_back(nn::softmax(sources[i]->classify(h_sources[i])));
        trace.mapped.push_back(map_prediction(trace.local_probs[i], map, static_cast<int>(i)));
        for (std::size_t c = 0; c < trace.p_mix.size(); ++c) {
            trace.p_mix[c] += trace.weights[i] * trace.mapped[i][c];
        }
    }
    return trace;
}

FusedPrediction fuse(const MixerState& mixer, const Vec& h_target,
                     const std::vector<Vec>& h_sources,
                     const std::vector<const nn::NetModel*>& sources, const LabelMap& map) {
    FuseTrace trace = fuse_traced(mixer, h_target, h_sources, sources, map);
    return {std::move(trace.weights), std::move(trace.p_mix)};
}

FusedPrediction fuse_static(const std::vector<double>& weights,
                            const std::vector<Vec>& h_sources,
                            const std::vector<const nn::NetModel*>& sources,
                            const LabelMap& map) {
    if (weights.size() != sources.size() || h_sources.size() != sources.size() ||
        sources.size() != static_cast<std::size_t>(map.num_sources())) {
        throw DimensionError("weights, sources and map disagree on source count");
    }
    double sum = 0.0;
    for (double w : weights) {
        if (w < 0.0) throw NumericError("static fusion weights must be non-negative");
        sum += w;
    }
    if (std::abs(sum - 1.0) > 1e-9) throw NumericError("static fusion weights must sum to 1");
    FusedPrediction out;
    out.weights = weights;
    out.p_mix.assign(static_cast<std::size_t>(map.global_classes()), 0.0);
    for (std::size_t i = 0; i < sources.size(); ++i) {
        Vec mapped = map_prediction(nn::softmax(sources[i]->classify(h_sources[i])), map,
                                    static_cast<int>(i));
        for (std::size_t c = 0; c < out.p_mix.size(); ++c) {
            out.p_mix[c] += weights[i] * mapped[c];
        }
    }
    return out;
}

nn::ParamSet mixer_param_set(MixerState& mixer, std::vector<nn::NetModel>& sources) {
    nn::ParamSet params;
    params.add_layer(mixer.query());
    for (int i = 0; i < mixer.num_sources(); ++i) params.add_layer(mixer.key(i));
    for (nn::NetModel& model : sources) params.add_layer(model.classifier());
    return params;
}

double mixer_update(MixerState& mixer, std::vector<nn::NetModel>& sources, const LabelMap& map,
                    const std::vector<Vec>& h_target, const FeatureCache& cache,
                    const std::vector<int>& sample_ids, const std::vector<int>& labels_global,
                    nn::SgdOptimizer& optimizer, nn::GradientTape& tape) {
    if (h_target.empty()) throw DimensionError("empty mixer batch");
    if (h_target.size() != sample_ids.size() || sample_ids.size() != labels_global.size()) {
        throw DimensionError("mixer batch arrays disagree in length");
    }
    if (sources.size() != static_cast<std::size_t>(mixer.num_sources()) ||
        static_cast<std::size_t>(cache.num_sources()) != sources.size()) {
        throw DimensionError("mixer, sources and cache disagree on source count");
    }

    std::vector<const nn::NetModel*> source_ptrs;
    source_ptrs.reserve(sources.size());
    for (const nn::NetModel& m : sources) source_ptrs.push_back(&m);

    const std::size_t n_src = sources.size();
    const double scale = 1.0 / static_cast<double>(h_target.size());
    double loss = 0.0;

    for (std::size_t k = 0; k < h_target.size(); ++k) {
        std::vector<Vec> h_src;
        h_src.reserve(n_src);
        for (std::size_t i = 0; i < n_src; ++i) {
            h_src.push_back(cache.get(static_cast<int>(i), sample_ids[k]));
        }
        FuseTrace t = fuse_traced(mixer, h_target[k], h_src, source_ptrs, map);

        int y = labels_global[k];
        if (y < 0 || static_cast<std::size_t>(y) >= t.p_mix.size()) {
            throw DimensionError("label outside the global class space");
        }
        double py = std::max(t.p_mix[static_cast<std::size_t>(y)], kProbFloor);
        loss += -std::log(py);

        // dL/dp_mix has a single nonzero entry at the label.
        double dpy = -scale / py;

        // Through the convex combination: weight and per-source prob grads.
        Vec dw(n_src);
        for (std::size_t i = 0; i < n_src; ++i) {
            dw[i] = dpy * t.mapped[i][static_cast<std::size_t>(y)];
        }

        // Classifier branches: gather to local space, then softmax jacobian.
        for (std::size_t i = 0; i < n_src; ++i) {
            const nn::NetModel& model = sources[i];
            int local = model.local_index_of(y);
            if (local < 0) continue;  // this source never predicts y
            const Vec& p = t.local_probs[i];
            Vec dp(p.size(), 0.0);
            dp[static_cast<std::size_t>(local)] = t.weights[i] * dpy;
            double pdotd = 0.0;
            for (std::size_t j = 0; j < p.size(); ++j) pdotd += p[j] * dp[j];
            Vec dz(p.size());
            for (std::size_t j = 0; j < p.size(); ++j) dz[j] = p[j] * (dp[j] - pdotd);
            nn::dense_backward(model.classifier(), h_src[i], dz, dz, tape);
        }

        // Attention branch: softmax backward, then into query and keys.
        double wdotd = 0.0;
        for (std::size_t i = 0; i < n_src; ++i) wdotd += t.weights[i] * dw[i];
        Vec dq(t.q.size(), 0.0);
        for (std::size_t i = 0; i < n_src; ++i) {
            double dd = t.weights[i] * (dw[i] - wdotd);
            for (std::size_t j = 0; j < t.q.size(); ++j) {
                dq[j] += dd * t.keys[i][j];
            }
            Vec dkey(t.q.size());
            for (std::size_t j = 0; j < t.q.size(); ++j) dkey[j] = dd * t.q[j];
            nn::dense_backward(mixer.key(static_cast<int>(i)), h_src[i], dkey, dkey, tape);
        }
        nn::dense_backward(mixer.query(), h_target[k], dq, dq, tape);
    }

    tape.mark_populated();
    optimizer.step(tape);
    return loss * scale;
}

void write_weight_csv(const std::string& path, const std::vector<Vec>& weights) {
    std::ofstream out(path);
    if (!out) throw ProtocolError("cannot open " + path + " for writing");
    char buf[64];
    for (std::size_t k = 0; k < weights.size(); ++k) {
        out << k;
        for (double w : weights[k]) {
            std::snprintf(buf, sizeof(buf), "%.10g", w);
            out << "," << buf;
        }
        out << "\n";
    }
    if (!out) throw ProtocolError("write failed for " + path);
}

}  // namespace hat::fusion
