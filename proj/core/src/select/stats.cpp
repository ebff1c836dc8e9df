#include "hat/select/stats.hpp"

#include <cmath>

#include "hat/error.hpp"

namespace hat::select {

double cosine_similarity(const Vec& a, const Vec& b) {
    if (a.size() != b.size()) throw DimensionError("cosine on mismatched dimensions");
    double dot = 0.0, na = 0.0, nb = 0.0;
    for (std::size_t i = 0; i < a.size(); ++i) {
        dot += a[i] * b[i];
        na += a[i] * a[i];
        nb += b[i] * b[i];
    }
    if (na == 0.0 || nb == 0.0) return 0.0;
    return dot / (std::sqrt(na) * std::sqrt(nb));
}

StatFeatureVector extract_stat_features(const std::vector<Vec>& data) {
    if (data.size() < 2) throw DimensionError("need at least 2 samples for moments");
    std::size_t d = data.front().size();
    if (d == 0) throw DimensionError("zero-dimensional samples");
    for (const Vec& x : data) {
        if (x.size() != d) throw DimensionError("ragged sample dimensions");
    }
    double n = static_cast<double>(data.size());
    StatFeatureVector out;
    out.mean.assign(d, 0.0);
    out.stddev.assign(d, 0.0);
    out.skewness.assign(d, 0.0);
    out.kurtosis.assign(d, 0.0);
    for (const Vec& x : data) {
        for (std::size_t j = 0; j < d; ++j) out.mean[j] += x[j];
    }
    for (std::size_t j = 0; j < d; ++j) out.mean[j] /= n;
    for (std::size_t j = 0; j < d; ++j) {
        double m2 = 0.0, m3 = 0.0, m4 = 0.0;
        for (const Vec& x : data) {
            double c = x[j] - out.mean[j];
            double c2 = c * c;
            m2 += c2;
            m3 += c2 * c;
            m4 += c2 * c2;
        }
        m2 /= n;
        m3 /= n;
        m4 /= n;
        double noise_floor = 1e-24 * (1.0 + out.mean[j] * out.mean[j]);
        if (m2 <= noise_floor) continue;  // constant dimension
        double sigma = std::sqrt(m2);
        out.stddev[j] = sigma;
        out.skewness[j] = m3 / (sigma * sigma * sigma);
        out.kurtosis[j] = m4 / (m2 * m2) - 3.0;
        if (!std::isfinite(out.skewness[j]) || !std::isfinite(out.kurtosis[j])) {
            throw NumericError("non-finite moment statistic");
        }
    }
    return out;
}

double feature_similarity(const StatFeatureVector& a, const StatFeatureVector& b) {
    if (a.dim() != b.dim()) throw DimensionError("feature dimension mismatch");
    double s = cosine_similarity(a.mean, b.mean) + cosine_similarity(a.stddev, b.stddev) +
               cosine_similarity(a.skewness, b.skewness) +
               cosine_similarity(a.kurtosis, b.kurtosis);
    return s / 4.0;
}

}  // namespace hat::select
