#include "hat/fusion/label_map.hpp"

#include <unordered_set>

#include "hat/error.hpp"

namespace hat::fusion {

LabelMap::LabelMap(int num_global_classes, std::vector<std::vector<int>> per_source_spaces)
    : num_global_(num_global_classes), spaces_(std::move(per_source_spaces)) {
    if (num_global_ < 1) throw DimensionError("need at least one global class");
    if (spaces_.empty()) throw DimensionError("label map needs at least one source");
    for (const std::vector<int>& space : spaces_) {
        if (space.empty()) throw DimensionError("empty source label space");
        std::unordered_set<int> seen;
        for (int id : space) {
            if (id < 0 || id >= num_global_) throw DimensionError("label id outside global space");
            if (!seen.insert(id).second) throw DimensionError("duplicate label in source space");
        }
    }
}

int LabelMap::local_size(int source_index) const {
    return static_cast<int>(spaces_.at(static_cast<std::size_t>(source_index)).size());
}

int LabelMap::to_global(int source_index, int local_index) const {
    const std::vector<int>& space = spaces_.at(static_cast<std::size_t>(source_index));
    if (local_index < 0 || static_cast<std::size_t>(local_index) >= space.size()) {
        throw DimensionError("local label index out of range");
    }
    return space[static_cast<std::size_t>(local_index)];
}

Vec map_prediction(const Vec& local_probs, const LabelMap& map, int source_index) {
    if (local_probs.size() != static_cast<std::size_t>(map.local_size(source_index))) {
        throw DimensionError("distribution size does not match the source label space");
    }
    Vec global(static_cast<std::size_t>(map.global_classes()), 0.0);
    for (std::size_t j = 0; j < local_probs.size(); ++j) {
        global[static_cast<std::size_t>(map.to_global(source_index, static_cast<int>(j)))] =
            local_probs[j];
    }
    return global;
}

}  // namespace hat::fusion
