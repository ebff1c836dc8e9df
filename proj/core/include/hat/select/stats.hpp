#pragma once

#include <cstdint>
#include <vector>

#include "hat/nn/layer.hpp"

namespace hat::select {

using nn::Vec;

// The four per-dimension statistics a domain announces instead of raw data.
struct StatFeatureVector {
    Vec mean;
    Vec stddev;
    Vec skewness;
    Vec kurtosis;  // excess

    int dim() const { return static_cast<int>(mean.size()); }
    // Announced as 4 float32 vectors.
    std::int64_t announce_bytes() const { return 4LL * dim() * 4LL; }
};

// Population moments per dimension; skewness m3/sigma^3, excess kurtosis
// m4/sigma^4 - 3. Dimensions whose variance sits at double-precision noise
// level are treated as constant: stddev, skewness, kurtosis all 0.
StatFeatureVector extract_stat_features(const std::vector<Vec>& data);

// Mean cosine similarity over the four statistic vectors. A zero vector on
// either side contributes 0 for that statistic.
double feature_similarity(const StatFeatureVector& a, const StatFeatureVector& b);

double cosine_similarity(const Vec& a, const Vec& b);

}  // namespace hat::select
