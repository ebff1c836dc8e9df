#include "hat/select/centroids.hpp"

#include <algorithm>
#include <cmath>

#include "hat/error.hpp"
#include "hat/nn/ops.hpp"
#include "hat/select/stats.hpp"

namespace hat::select {

std::vector<int> ClassCentroidSet::covered_classes() const {
    std::vector<int> out;
    out.reserve(centroids.size());
    for (const auto& [cls, c] : centroids) out.push_back(cls);
    return out;
}

namespace {

ClassCentroidSet average_by_class(const std::vector<Vec>& features,
                                  const std::vector<int>& classes,
                                  const std::vector<std::size_t>& keep) {
    ClassCentroidSet out;
    out.feature_dim = static_cast<int>(features.front().size());
    std::map<int, int> counts;
    for (std::size_t i : keep) {
        int cls = classes[i];
        auto it = out.centroids.try_emplace(cls, Vec(features[i].size(), 0.0)).first;
        Vec& acc = it->second;
        for (std::size_t j = 0; j < acc.size(); ++j) acc[j] += features[i][j];
        ++counts[cls];
    }
    for (auto& [cls, acc] : out.centroids) {
        double n = static_cast<double>(counts[cls]);
        for (double& v : acc) v /= n;
    }
    return out;
}

}  // namespace

ClassCentroidSet centroids_from_outputs(const std::vector<Vec>& features,
                                        const std::vector<Vec>& logits,
                                        const std::vector<int>& label_space, double omega,
                                        bool per_class_rank) {
    if (features.empty()) throw DimensionError("no samples for centroids");
    if (features.size() != logits.size()) throw DimensionError("features/logits length mismatch");
    if (!(omega > 0.0) || omega > 1.0) throw NumericError("omega must be in (0,1]");

    std::size_t n = features.size();
    std::vector<int> pseudo(n);
    std::vector<double> ent(n);
    for (std::size_t i = 0; i < n; ++i) {
        const Vec& z = logits[i];
        if (z.size() != label_space.size()) throw DimensionError("logit width mismatch");
        std::size_t best = 0;
        for (std::size_t j = 1; j < z.size(); ++j) {
            if (z[j] > z[best]) best = j;
        }
        pseudo[i] = label_space[best];
        ent[i] = nn::entropy(nn::softmax(z));
    }

    auto lowest_entropy = [&](const std::vector<std::size_t>& pool, std::size_t count) {
        std::vector<std::size_t> sorted = pool;
        std::stable_sort(sorted.begin(), sorted.end(),
                         [&](std::size_t a, std::size_t b) { return ent[a] < ent[b]; });
        sorted.resize(count);
        return sorted;
    };

    std::vector<std::size_t> keep;
    if (per_class_rank) {
        std::map<int, std::vector<std::size_t>> by_class;
        for (std::size_t i = 0; i < n; ++i) by_class[pseudo[i]].push_back(i);
        for (const auto& [cls, pool] : by_class) {
            auto count = static_cast<std::size_t>(
                std::floor(omega * static_cast<double>(pool.size()) + 1e-9));
            if (count == 0) continue;
            for (std::size_t i : lowest_entropy(pool, count)) keep.push_back(i);
        }
    } else {
        std::vector<std::size_t> pool(n);
        for (std::size_t i = 0; i < n; ++i) pool[i] = i;
        auto count =
            static_cast<std::size_t>(std::floor(omega * static_cast<double>(n) + 1e-9));
        if (count > 0) keep = lowest_entropy(pool, count);
    }
    if (keep.empty()) throw NumericError("entropy filter keeps no samples");
    return average_by_class(features, pseudo, keep);
}

ClassCentroidSet compute_centroids(const nn::NetModel& model, const std::vector<Vec>& data,
                                   const std::vector<int>* true_labels, double omega,
                                   bool per_class_rank) {
    if (data.empty()) throw DimensionError("no samples for centroids");
    std::vector<Vec> features;
    features.reserve(data.size());
    for (const Vec& x : data) features.push_back(model.encode(x));

    if (true_labels != nullptr) {
        if (true_labels->size() != data.size()) {
            throw DimensionError("label array length mismatch");
        }
        std::vector<std::size_t> keep(data.size());
        for (std::size_t i = 0; i < keep.size(); ++i) {
            if (model.local_index_of((*true_labels)[i]) < 0) {
                throw DimensionError("centroid label outside model label space");
            }
            keep[i] = i;
        }
        return average_by_class(features, *true_labels, keep);
    }

    std::vector<Vec> logits;
    logits.reserve(data.size());
    for (const Vec& h : features) logits.push_back(model.classify(h));
    return centroids_from_outputs(features, logits, model.label_space(), omega, per_class_rank);
}

double centroid_similarity(const ClassCentroidSet& a, const ClassCentroidSet& b) {
    if (a.feature_dim != b.feature_dim) throw DimensionError("centroid feature dim mismatch");
    double sum = 0.0;
    int overlap = 0;
    for (const auto& [cls, ca] : a.centroids) {
        auto it = b.centroids.find(cls);
        if (it == b.centroids.end()) continue;
        sum += cosine_similarity(ca, it->second);
        ++overlap;
    }
    if (overlap == 0) return -1.0;
    return sum / static_cast<double>(overlap);
}

}  // namespace hat::select
