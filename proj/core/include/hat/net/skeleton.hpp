#pragma once

#include <cstdint>
#include <vector>

#include "hat/nn/layer.hpp"

namespace hat::net {

// What a device can afford: parameter budget and multiply-accumulates per
// forward pass.
struct DeviceConstraints {
    std::int64_t max_param_count = 0;
    std::int64_t max_flops_per_inference = 0;
};

// Encoder-stack costs; the classifier is sized later by the label space.
std::int64_t skeleton_param_count(const std::vector<nn::LayerSpec>& stack);
std::int64_t skeleton_flops(const std::vector<nn::LayerSpec>& stack);

// Largest-capacity stack (by parameter count) that fits both budgets; ties
// go to the earliest library entry. Throws when nothing fits.
std::vector<nn::LayerSpec> pick_skeleton(const std::vector<std::vector<nn::LayerSpec>>& library,
                                         const DeviceConstraints& zeta);

}  // namespace hat::net
