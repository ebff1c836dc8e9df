#include "hat/nn/model.hpp"

#include <algorithm>
#include <string>
#include <unordered_set>

#include "hat/error.hpp"

namespace hat::nn {

namespace {
void validate(const std::vector<DenseLayer>& encoder, const DenseLayer& classifier,
              const std::vector<int>& label_space) {
    if (encoder.empty()) throw DimensionError("encoder needs at least one layer");
    for (std::size_t i = 1; i < encoder.size(); ++i) {
        if (encoder[i].spec().input_dim != encoder[i - 1].spec().output_dim) {
            throw DimensionError("encoder layer dims do not chain at layer " +
                                 std::to_string(i));
        }
    }
    if (classifier.spec().input_dim != encoder.back().spec().output_dim) {
        throw DimensionError("classifier input dim must equal encoder output dim");
    }
    if (classifier.spec().activation != Activation::kIdentity) {
        throw DimensionError("classifier must be linear");
    }
    if (label_space.empty()) throw DimensionError("label space must be non-empty");
    if (classifier.spec().output_dim != static_cast<int>(label_space.size())) {
        throw DimensionError("classifier must emit one logit per local label");
    }
    std::unordered_set<int> seen(label_space.begin(), label_space.end());
    if (seen.size() != label_space.size()) {
        throw DimensionError("label space contains duplicate class ids");
    }
}
} // namespace

NetModel::NetModel(std::vector<DenseLayer> encoder, DenseLayer classifier,
                   std::vector<int> local_label_space)
    : encoder_(std::move(encoder)),
      classifier_(std::move(classifier)),
      label_space_(std::move(local_label_space)) {
    validate(encoder_, classifier_, label_space_);
}

NetModel NetModel::build(const std::vector<LayerSpec>& encoder_specs,
                         std::vector<int> local_label_space, rng::Stream& stream) {
    std::vector<DenseLayer> enc;
    enc.reserve(encoder_specs.size());
    for (const auto& spec : encoder_specs) enc.emplace_back(spec, stream);
    LayerSpec cls_spec{encoder_specs.back().output_dim,
                       static_cast<int>(local_label_space.size()),
                       Activation::kIdentity};
    DenseLayer cls(cls_spec, stream);
    return NetModel(std::move(enc), std::move(cls), std::move(local_label_space));
}

Vec NetModel::encode(std::span<const double> x) const {
    Vec h(x.begin(), x.end());
    for (const auto& layer : encoder_) h = layer.forward(h);
    return h;
}

Vec NetModel::encode(std::span<const double> x, EncoderTrace& trace) const {
    trace.inputs.clear();
    trace.preacts.clear();
    Vec h(x.begin(), x.end());
    for (const auto& layer : encoder_) {
        trace.inputs.push_back(h);
        Vec z = layer.forward_linear(h);
        trace.preacts.push_back(z);
        for (auto& v : z) v = DenseLayer::activate(layer.spec().activation, v);
        h = std::move(z);
    }
    return h;
}

Vec NetModel::classify(std::span<const double> h) const {
    return classifier_.forward(h);
}

int NetModel::local_index_of(int global_class) const {
    auto it = std::find(label_space_.begin(), label_space_.end(), global_class);
    return it == label_space_.end() ? -1
                                    : static_cast<int>(it - label_space_.begin());
}

std::int64_t NetModel::param_count() const {
    std::int64_t n = classifier_.param_count();
    for (const auto& layer : encoder_) n += layer.param_count();
    return n;
}

void NetModel::freeze_all() {
    for (auto& layer : encoder_) layer.freeze();
    classifier_.freeze();
}

bool NetModel::encoder_frozen() const {
    return std::all_of(encoder_.begin(), encoder_.end(),
                       [](const DenseLayer& l) { return l.frozen(); });
}

Vec forward_encode(const NetModel& model, std::span<const double> x) {
    return model.encode(x);
}

Vec classify(const NetModel& model, std::span<const double> h) {
    return model.classify(h);
}

int predict_class(const NetModel& model, std::span<const double> x) {
    Vec logits = model.classify(model.encode(x));
    std::size_t best = 0;
    for (std::size_t j = 1; j < logits.size(); ++j) {
        if (logits[j] > logits[best]) best = j;
    }
    return model.label_space()[best];
}

} // namespace hat::nn
