#pragma once

#include <cstdint>
#include <vector>

#include "hat/nn/layer.hpp"

namespace hat::synth {

using nn::Vec;

// Shared class structure every domain is derived from: one Gaussian
// prototype per global class.
struct GlobalTaskSpec {
    int num_classes = 0;
    int input_dim = 0;
    std::vector<Vec> class_prototypes;
    double within_class_stddev = 0.0;
    std::uint64_t seed = 0;
};

// Seeded prototypes with minimum pairwise distance >= 2 * stddev, redrawn
// until separated. Throws NumericError when retries run out.
GlobalTaskSpec make_task(int num_classes, int input_dim, double within_class_stddev,
                         std::uint64_t seed);

double min_prototype_distance(const GlobalTaskSpec& task);

}  // namespace hat::synth
