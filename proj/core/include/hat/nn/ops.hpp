#pragma once

#include <span>

#include "hat/nn/layer.hpp"

namespace hat::nn {

// Max-stabilized softmax. Output entries are positive and sum to 1.
Vec softmax(std::span<const double> z);

// Index of the largest entry; earliest wins ties.
std::size_t argmax(std::span<const double> v);

// Shannon entropy -sum p ln p with 0 ln 0 := 0. p must be a distribution
// (entries in [0,1], sum 1 within 1e-6).
double entropy(std::span<const double> p);

struct LossGrad {
    double loss = 0.0;
    Vec dlogits; // gradient with respect to the logits
};

// -ln softmax(logits)[label]; gradient softmax - onehot(label).
LossGrad ce_loss_hard(std::span<const double> logits, int label);

// -sum target ln softmax(logits); gradient softmax - target. With a one-hot
// target this equals ce_loss_hard exactly.
LossGrad ce_loss_soft(std::span<const double> logits, std::span<const double> target);

} // namespace hat::nn
