#include "hat/synth/task.hpp"

#include <cmath>
#include <limits>

#include "hat/error.hpp"
#include "hat/rng.hpp"

namespace hat::synth {
namespace {

double distance(const Vec& a, const Vec& b) {
    double s = 0.0;
    for (std::size_t i = 0; i < a.size(); ++i) {
        double d = a[i] - b[i];
        s += d * d;
    }
    return std::sqrt(s);
}

}  // namespace

double min_prototype_distance(const GlobalTaskSpec& task) {
    double best = std::numeric_limits<double>::infinity();
    for (std::size_t i = 0; i < task.class_prototypes.size(); ++i) {
        for (std::size_t j = i + 1; j < task.class_prototypes.size(); ++j) {
            best = std::min(best, distance(task.class_prototypes[i], task.class_prototypes[j]));
        }
    }
    return best;
}

GlobalTaskSpec make_task(int num_classes, int input_dim, double within_class_stddev,
                         std::uint64_t seed) {
    if (num_classes < 2) throw DimensionError("need at least 2 classes");
    if (input_dim < 2) throw DimensionError("need input_dim >= 2");
    if (!(within_class_stddev > 0.0)) throw NumericError("stddev must be positive");

    GlobalTaskSpec task;
    task.num_classes = num_classes;
    task.input_dim = input_dim;
    task.within_class_stddev = within_class_stddev;
    task.seed = seed;

    rng::Stream stream(seed, "prototypes");
    constexpr int kMaxRetries = 1000;
    for (int attempt = 0; attempt < kMaxRetries; ++attempt) {
        task.class_prototypes.assign(static_cast<std::size_t>(num_classes), Vec());
        for (Vec& p : task.class_prototypes) {
            p.resize(static_cast<std::size_t>(input_dim));
            for (double& v : p) v = stream.normal(0.0, 1.0);
        }
        if (min_prototype_distance(task) >= 2.0 * within_class_stddev) return task;
    }
    throw NumericError("could not separate class prototypes; stddev too large");
}

}  // namespace hat::synth
