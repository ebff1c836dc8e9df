#include "hat/nn/ops.hpp"

#include <cmath>
#include <string>

#include "hat/error.hpp"

namespace hat::nn {

namespace {

// log softmax(z)[j] = z[j] - m - ln sum exp(z - m). Shared by both losses so
// the one-hot consistency between them is exact.
Vec log_softmax(std::span<const double> z) {
    if (z.empty()) throw DimensionError("softmax of empty vector");
    double m = z[0];
    for (double v : z) {
        if (!std::isfinite(v)) throw NumericError("softmax input is not finite");
        if (v > m) m = v;
    }
    double sum = 0.0;
    for (double v : z) sum += std::exp(v - m);
    const double lse = m + std::log(sum);
    Vec out(z.size());
    for (std::size_t j = 0; j < z.size(); ++j) out[j] = z[j] - lse;
    return out;
}

} // namespace

Vec softmax(std::span<const double> z) {
    Vec out = log_softmax(z);
    for (auto& v : out) v = std::exp(v);
    return out;
}

std::size_t argmax(std::span<const double> v) {
    if (v.empty()) throw DimensionError("argmax of empty vector");
    std::size_t best = 0;
    for (std::size_t j = 1; j < v.size(); ++j) {
        if (v[j] > v[best]) best = j;
    }
    return best;
}

double entropy(std::span<const double> p) {
    if (p.empty()) throw DimensionError("entropy of empty vector");
    double sum = 0.0;
    for (double v : p) {
        if (!std::isfinite(v) || v < -1e-9 || v > 1.0 + 1e-9) {
            throw NumericError("entropy input is not a probability vector");
        }
        sum += v;
    }
    if (std::abs(sum - 1.0) > 1e-6) {
        throw NumericError("entropy input does not sum to 1 (got " +
                           std::to_string(sum) + ")");
    }
    double e = 0.0;
    for (double v : p) {
        if (v > 0.0) e -= v * std::log(v);
    }
    return e < 0.0 ? 0.0 : e;
}

LossGrad ce_loss_hard(std::span<const double> logits, int label) {
    if (label < 0 || label >= static_cast<int>(logits.size())) {
        throw DimensionError("label index " + std::to_string(label) +
                             " out of range for " + std::to_string(logits.size()) +
                             " logits");
    }
    Vec logp = log_softmax(logits);
    LossGrad out;
    out.loss = -logp[static_cast<std::size_t>(label)];
    out.dlogits.resize(logits.size());
    for (std::size_t j = 0; j < logits.size(); ++j) {
        out.dlogits[j] = std::exp(logp[j]);
    }
    out.dlogits[static_cast<std::size_t>(label)] -= 1.0;
    return out;
}

LossGrad ce_loss_soft(std::span<const double> logits, std::span<const double> target) {
    if (logits.size() != target.size()) {
        throw DimensionError("soft target length " + std::to_string(target.size()) +
                             " does not match " + std::to_string(logits.size()) +
                             " logits");
    }
    Vec logp = log_softmax(logits);
    LossGrad out;
    out.dlogits.resize(logits.size());
    for (std::size_t j = 0; j < logits.size(); ++j) {
        if (!std::isfinite(target[j]) || target[j] < -1e-9) {
            throw NumericError("soft target entries must be non-negative");
        }
        out.loss -= target[j] * logp[j];
        out.dlogits[j] = std::exp(logp[j]) - target[j];
    }
    return out;
}

} // namespace hat::nn
