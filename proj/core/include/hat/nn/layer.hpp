#pragma once

#include <span>
#include <vector>

#include "hat/rng.hpp"

namespace hat::nn {

using Vec = std::vector<double>;

enum class Activation { kRelu, kIdentity };

struct LayerSpec {
    int input_dim = 0;
    int output_dim = 0;
    Activation activation = Activation::kIdentity;
};

// Fully connected layer, weights row-major (output_dim x input_dim).
// A frozen layer's parameters may not be handed to an optimizer.
class DenseLayer {
public:
    explicit DenseLayer(LayerSpec spec); // zero-initialized
    DenseLayer(LayerSpec spec, rng::Stream& stream); // uniform +-1/sqrt(fan_in)

    Vec forward(std::span<const double> x) const;
    // Pre-activation output; callers keep it for backward passes.
    Vec forward_linear(std::span<const double> x) const;
    static double activate(Activation a, double z);
    static double activate_grad(Activation a, double z);

    const LayerSpec& spec() const { return spec_; }
    int param_count() const;

    std::span<double> weights() { return w_; }
    std::span<double> bias() { return b_; }
    std::span<const double> weights() const { return w_; }
    std::span<const double> bias() const { return b_; }

    void freeze() { frozen_ = true; }
    void unfreeze() { frozen_ = false; }
    bool frozen() const { return frozen_; }

private:
    LayerSpec spec_;
    Vec w_;
    Vec b_;
    bool frozen_ = false;
};

} // namespace hat::nn
