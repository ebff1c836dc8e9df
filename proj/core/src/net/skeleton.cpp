#include "hat/net/skeleton.hpp"

#include "hat/error.hpp"

namespace hat::net {

std::int64_t skeleton_param_count(const std::vector<nn::LayerSpec>& stack) {
    std::int64_t total = 0;
    for (const nn::LayerSpec& spec : stack) {
        total += static_cast<std::int64_t>(spec.input_dim) * spec.output_dim + spec.output_dim;
    }
    return total;
}

std::int64_t skeleton_flops(const std::vector<nn::LayerSpec>& stack) {
    std::int64_t total = 0;
    for (const nn::LayerSpec& spec : stack) {
        total += static_cast<std::int64_t>(spec.input_dim) * spec.output_dim;
    }
    return total;
}

std::vector<nn::LayerSpec> pick_skeleton(const std::vector<std::vector<nn::LayerSpec>>& library,
                                         const DeviceConstraints& zeta) {
    if (library.empty()) throw ProtocolError("empty skeleton library");
    if (zeta.max_param_count <= 0 || zeta.max_flops_per_inference <= 0) {
        throw NumericError("device constraints must be positive");
    }
    int best = -1;
    std::int64_t best_params = -1;
    for (std::size_t i = 0; i < library.size(); ++i) {
        std::int64_t params = skeleton_param_count(library[i]);
        if (params > zeta.max_param_count) continue;
        if (skeleton_flops(library[i]) > zeta.max_flops_per_inference) continue;
        if (params > best_params) {
            best_params = params;
            best = static_cast<int>(i);
        }
    }
    if (best < 0) throw ProtocolError("no skeleton fits the device constraints");
    return library[static_cast<std::size_t>(best)];
}

}  // namespace hat::net
