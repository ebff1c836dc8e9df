#include "hat/nn/optimizer.hpp"

#include <algorithm>
#include <string>

#include "hat/error.hpp"

namespace hat::nn {

void ParamSet::add(std::span<double> buf) {
    if (buf.empty()) throw DimensionError("empty parameter buffer");
    refs_.push_back(ParamRef{buf.data(), buf.size()});
}

void ParamSet::add_layer(DenseLayer& layer) {
    if (layer.frozen()) {
        throw ProtocolError("frozen layer parameters cannot join an optimizer set");
    }
    add(layer.weights());
    add(layer.bias());
}

void ParamSet::add_model(NetModel& model) {
    for (auto& layer : model.encoder()) add_layer(layer);
    add_layer(model.classifier());
}

std::size_t ParamSet::total() const {
    std::size_t n = 0;
    for (const auto& r : refs_) n += r.size;
    return n;
}

bool ParamSet::overlaps(const ParamSet& other) const {
    for (const auto& a : refs_) {
        for (const auto& b : other.refs_) {
            if (a.data < b.data + b.size && b.data < a.data + a.size) return true;
        }
    }
    return false;
}

GradientTape::GradientTape(const ParamSet& params) : refs_(params.refs()) {
    grads_.reserve(refs_.size());
    for (std::size_t i = 0; i < refs_.size(); ++i) {
        grads_.emplace_back(refs_[i].size, 0.0);
        index_.emplace(refs_[i].data, i);
    }
}

bool GradientTape::tracks(const double* param_data) const {
    return index_.count(param_data) != 0;
}

std::span<double> GradientTape::grad(const double* param_data) {
    auto it = index_.find(param_data);
    if (it == index_.end()) {
        throw ProtocolError("gradient requested for a parameter the tape does not track");
    }
    return grads_[it->second];
}

void GradientTape::zero() {
    for (auto& g : grads_) std::fill(g.begin(), g.end(), 0.0);
    populated_ = false;
}

SgdOptimizer::SgdOptimizer(double learning_rate, ParamSet params)
    : lr_(learning_rate), params_(std::move(params)) {
    if (!(lr_ >= 0.0)) {
        throw NumericError("learning rate must be non-negative, got " + std::to_string(lr_));
    }
}

void SgdOptimizer::step(GradientTape& tape) {
    if (!tape.populated()) {
        throw ProtocolError("optimizer step on an unpopulated gradient tape");
    }
    const auto& refs = params_.refs();
    if (tape.refs().size() != refs.size()) {
        throw ProtocolError("gradient tape does not match the optimizer's parameter set");
    }
    for (std::size_t i = 0; i < refs.size(); ++i) {
        if (tape.refs()[i].data != refs[i].data || tape.refs()[i].size != refs[i].size) {
            throw ProtocolError("gradient tape does not match the optimizer's parameter set");
        }
        std::span<const double> g = tape.buffer(i);
        double* p = refs[i].data;
        for (std::size_t j = 0; j < refs[i].size; ++j) p[j] -= lr_ * g[j];
    }
    tape.zero();
}

Vec dense_backward(const DenseLayer& layer, std::span<const double> x,
                   std::span<const double> preact, std::span<const double> dout,
                   GradientTape& tape) {
    const auto& spec = layer.spec();
    const std::size_t out = static_cast<std::size_t>(spec.output_dim);
    const std::size_t in = static_cast<std::size_t>(spec.input_dim);
    if (x.size() != in || preact.size() != out || dout.size() != out) {
        throw DimensionError("dense_backward shape mismatch");
    }
    Vec dz(out);
    for (std::size_t r = 0; r < out; ++r) {
        dz[r] = dout[r] * DenseLayer::activate_grad(spec.activation, preact[r]);
    }
    if (tape.tracks(layer.weights().data())) {
        std::span<double> gw = tape.grad(layer.weights().data());
        std::span<double> gb = tape.grad(layer.bias().data());
        for (std::size_t r = 0; r < out; ++r) {
            double* grow = gw.data() + r * in;
            for (std::size_t c = 0; c < in; ++c) grow[c] += dz[r] * x[c];
            gb[r] += dz[r];
        }
    }
    Vec dx(in, 0.0);
    std::span<const double> w = layer.weights();
    for (std::size_t r = 0; r < out; ++r) {
        const double* row = w.data() + r * in;
        for (std::size_t c = 0; c < in; ++c) dx[c] += row[c] * dz[r];
    }
    return dx;
}

Vec classifier_backward(const NetModel& model, std::span<const double> h,
                        std::span<const double> dlogits, GradientTape& tape) {
    // classifier activation is identity, so preact == logits; dense_backward
    // only reads its sign structure for relu, pass dlogits as preact.
    return dense_backward(model.classifier(), h, dlogits, dlogits, tape);
}

void encoder_backward(const NetModel& model, const EncoderTrace& trace,
                      std::span<const double> dh, GradientTape& tape) {
    const auto& layers = model.encoder();
    if (trace.inputs.size() != layers.size() || trace.preacts.size() != layers.size()) {
        throw DimensionError("encoder trace does not match the encoder depth");
    }
    Vec d(dh.begin(), dh.end());
    for (std::size_t i = layers.size(); i-- > 0;) {
        d = dense_backward(layers[i], trace.inputs[i], trace.preacts[i], d, tape);
    }
}

} // namespace hat::nn
