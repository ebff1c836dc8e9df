#include "hat/nn/layer.hpp"

#include <cmath>
#include <string>

#include "hat/error.hpp"

namespace hat::nn {

namespace {
void check_spec(const LayerSpec& spec) {
    if (spec.input_dim < 1 || spec.output_dim < 1) {
        throw DimensionError("layer dims must be >= 1, got " +
                             std::to_string(spec.input_dim) + "x" +
                             std::to_string(spec.output_dim));
    }
}
} // namespace

DenseLayer::DenseLayer(LayerSpec spec)
    : spec_(spec),
      w_(static_cast<std::size_t>(spec.output_dim) * static_cast<std::size_t>(spec.input_dim), 0.0),
      b_(static_cast<std::size_t>(spec.output_dim), 0.0) {
    check_spec(spec);
}

DenseLayer::DenseLayer(LayerSpec spec, rng::Stream& stream) : DenseLayer(spec) {
    const double bound = 1.0 / std::sqrt(static_cast<double>(spec.input_dim));
    for (auto& w : w_) w = stream.uniform(-bound, bound);
    for (auto& b : b_) b = stream.uniform(-bound, bound);
}

double DenseLayer::activate(Activation a, double z) {
    return a == Activation::kRelu ? (z > 0.0 ? z : 0.0) : z;
}

double DenseLayer::activate_grad(Activation a, double z) {
    return a == Activation::kRelu ? (z > 0.0 ? 1.0 : 0.0) : 1.0;
}

Vec DenseLayer::forward_linear(std::span<const double> x) const {
    if (static_cast<int>(x.size()) != spec_.input_dim) {
        throw DimensionError("dense layer expects input of length " +
                             std::to_string(spec_.input_dim) + ", got " +
                             std::to_string(x.size()));
    }
    Vec z(static_cast<std::size_t>(spec_.output_dim));
    const std::size_t in = static_cast<std::size_t>(spec_.input_dim);
    for (std::size_t r = 0; r < z.size(); ++r) {
        double acc = b_[r];
        const double* row = w_.data() + r * in;
        for (std::size_t c = 0; c < in; ++c) acc += row[c] * x[c];
        z[r] = acc;
    }
    return z;
}

Vec DenseLayer::forward(std::span<const double> x) const {
    Vec z = forward_linear(x);
    if (spec_.activation == Activation::kRelu) {
        for (auto& v : z) v = v > 0.0 ? v : 0.0;
    }
    return z;
}

int DenseLayer::param_count() const {
    return spec_.output_dim * spec_.input_dim + spec_.output_dim;
}

} // namespace hat::nn
