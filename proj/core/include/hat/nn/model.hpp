#pragma once

#include <cstdint>
#include <span>
#include <vector>

#include "hat/nn/layer.hpp"
#include "hat/rng.hpp"

namespace hat::nn {

// Per-layer inputs and pre-activations cached by a traced forward pass,
// consumed by backward_encoder.
struct EncoderTrace {
    std::vector<Vec> inputs;
    std::vector<Vec> preacts;
};

// Encoder (dense stack) plus a single linear classifier over a local label
// space. The label space lists global class ids; classifier logit j scores
// global class local_label_space[j].
class NetModel {
public:
    NetModel(std::vector<DenseLayer> encoder, DenseLayer classifier,
             std::vector<int> local_label_space);

    // Seeded construction: encoder per specs, classifier identity-activated
    // over |label_space| logits.
    static NetModel build(const std::vector<LayerSpec>& encoder_specs,
                          std::vector<int> local_label_space, rng::Stream& stream);

    Vec encode(std::span<const double> x) const;
    Vec encode(std::span<const double> x, EncoderTrace& trace) const;
    Vec classify(std::span<const double> h) const;

    int input_dim() const { return encoder_.front().spec().input_dim; }
    int feature_dim() const { return encoder_.back().spec().output_dim; }
    int num_local_labels() const { return static_cast<int>(label_space_.size()); }

    const std::vector<int>& label_space() const { return label_space_; }
    // Index of a global class in the local space, or -1.
    int local_index_of(int global_class) const;

    std::vector<DenseLayer>& encoder() { return encoder_; }
    const std::vector<DenseLayer>& encoder() const { return encoder_; }
    DenseLayer& classifier() { return classifier_; }
    const DenseLayer& classifier() const { return classifier_; }

    std::int64_t param_count() const;
    std::int64_t byte_size() const { return 4 * param_count(); }

    void freeze_all();
    void unfreeze_classifier() { classifier_.unfreeze(); }
    bool encoder_frozen() const;

private:
    std::vector<DenseLayer> encoder_;
    DenseLayer classifier_;
    std::vector<int> label_space_;
};

Vec forward_encode(const NetModel& model, std::span<const double> x);
Vec classify(const NetModel& model, std::span<const double> h);

// Argmax over logits, mapped to the global class id.
int predict_class(const NetModel& model, std::span<const double> x);

} // namespace hat::nn
