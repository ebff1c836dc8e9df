#include "hat/inject/dictionary.hpp"

#include <cmath>

#include "hat/error.hpp"

namespace hat::inject {

KnowledgeDictionary::KnowledgeDictionary(int num_classes, GatePolicy policy)
    : num_classes_(num_classes), policy_(policy) {
    if (num_classes < 1) throw DimensionError("dictionary needs at least one class");
}

bool KnowledgeDictionary::would_write(double mixer_acc) const {
    if (!(mixer_acc >= 0.0) || mixer_acc > 1.0) {
        throw NumericError("mixer accuracy outside [0,1]");
    }
    return policy_ == GatePolicy::kAlways || mixer_acc > best_mixer_acc_;
}

bool KnowledgeDictionary::update(double mixer_acc, const std::vector<int>& sample_ids,
                                 const std::vector<Vec>& fused_predictions) {
    if (sample_ids.size() != fused_predictions.size()) {
        throw DimensionError("ids and predictions disagree in length");
    }
    bool write = would_write(mixer_acc);
    if (mixer_acc > best_mixer_acc_) best_mixer_acc_ = mixer_acc;
    if (!write) return false;
    for (std::size_t k = 0; k < sample_ids.size(); ++k) {
        if (sample_ids[k] < 0) throw DimensionError("negative sample id");
        const Vec& p = fused_predictions[k];
        if (p.size() != static_cast<std::size_t>(num_classes_)) {
            throw DimensionError("soft label has the wrong class count");
        }
        double sum = 0.0;
        for (double v : p) {
            if (!(v >= 0.0)) throw NumericError("soft label entries must be non-negative");
            sum += v;
        }
        if (std::abs(sum - 1.0) > 1e-9) throw NumericError("soft label does not sum to 1");
        entries_[sample_ids[k]] = p;
    }
    return true;
}

const Vec& KnowledgeDictionary::entry(int sample_id) const {
    auto it = entries_.find(sample_id);
    if (it == entries_.end()) throw ProtocolError("no dictionary entry for sample");
    return it->second;
}

}  // namespace hat::inject
