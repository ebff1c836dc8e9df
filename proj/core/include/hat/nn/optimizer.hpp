#pragma once

#include <span>
#include <unordered_map>
#include <vector>

#include "hat/nn/layer.hpp"
#include "hat/nn/model.hpp"

namespace hat::nn {

struct ParamRef {
    double* data = nullptr;
    std::size_t size = 0;
};

// An ordered view over parameter buffers. Frozen layers are rejected, which
// is what keeps encoders untouched during fusion and injection.
class ParamSet {
public:
    void add(std::span<double> buf);
    void add_layer(DenseLayer& layer); // weights then bias
    void add_model(NetModel& model);   // encoder layers then classifier

    const std::vector<ParamRef>& refs() const { return refs_; }
    std::size_t total() const;
    bool overlaps(const ParamSet& other) const;

private:
    std::vector<ParamRef> refs_;
};

// Gradient buffers shaped like a ParamSet, addressed by parameter buffer.
// Backward passes accumulate into it; the optimizer consumes and zeroes it.
class GradientTape {
public:
    explicit GradientTape(const ParamSet& params);

    bool tracks(const double* param_data) const;
    std::span<double> grad(const double* param_data);
    std::span<double> grad_weights(DenseLayer& layer) { return grad(layer.weights().data()); }
    std::span<double> grad_bias(DenseLayer& layer) { return grad(layer.bias().data()); }

    void mark_populated() { populated_ = true; }
    bool populated() const { return populated_; }
    void zero();

    const std::vector<ParamRef>& refs() const { return refs_; }
    std::span<const double> buffer(std::size_t i) const { return grads_[i]; }

private:
    std::vector<ParamRef> refs_;
    std::vector<Vec> grads_;
    std::unordered_map<const double*, std::size_t> index_;
    bool populated_ = false;
};

// Plain SGD: p <- p - lr * grad(p). One parameter buffer belongs to at most
// one optimizer; build_disjoint checks enforce that at wiring time.
class SgdOptimizer {
public:
    SgdOptimizer(double learning_rate, ParamSet params);

    // Applies the update and zeroes the tape. The tape must have been built
    // from this optimizer's ParamSet and populated by a backward pass.
    void step(GradientTape& tape);

    double learning_rate() const { return lr_; }
    const ParamSet& params() const { return params_; }

private:
    double lr_;
    ParamSet params_;
};

// Backward through one dense layer. x/preact come from the forward pass,
// dout is the gradient at the post-activation output. Parameter gradients
// accumulate into the tape when it tracks this layer; dx is returned.
Vec dense_backward(const DenseLayer& layer, std::span<const double> x,
                   std::span<const double> preact, std::span<const double> dout,
                   GradientTape& tape);

// Backward through a model's classifier given dlogits; returns dh.
Vec classifier_backward(const NetModel& model, std::span<const double> h,
                        std::span<const double> dlogits, GradientTape& tape);

// Backward through the encoder stack using a trace from encode(x, trace).
void encoder_backward(const NetModel& model, const EncoderTrace& trace,
                      std::span<const double> dh, GradientTape& tape);

} // namespace hat::nn
