#include "hat/fusion/feature_cache.hpp"

#include "hat/error.hpp"

namespace hat::fusion {

FeatureCache::FeatureCache(const std::vector<const nn::NetModel*>& sources,
                           const std::vector<Vec>& inputs, net::TrafficLedger& ledger) {
    if (sources.empty()) throw DimensionError("feature cache needs at least one source");
    if (inputs.empty()) throw DimensionError("feature cache needs at least one sample");
    features_.reserve(sources.size());
    for (const nn::NetModel* model : sources) {
        if (!model->encoder_frozen()) {
            throw ProtocolError("source encoders must be frozen before caching");
        }
        std::vector<Vec> rows;
        rows.reserve(inputs.size());
        for (const Vec& x : inputs) rows.push_back(model->encode(x));
        features_.push_back(std::move(rows));
    }
    ledger.count_inference(static_cast<std::int64_t>(sources.size()) *
                           static_cast<std::int64_t>(inputs.size()));
}

int FeatureCache::num_samples() const { return static_cast<int>(features_.front().size()); }

const Vec& FeatureCache::get(int source_index, int sample_id) const {
    return features_.at(static_cast<std::size_t>(source_index))
        .at(static_cast<std::size_t>(sample_id));
}

const std::vector<Vec>& FeatureCache::per_source(int source_index) const {
    return features_.at(static_cast<std::size_t>(source_index));
}

}  // namespace hat::fusion
