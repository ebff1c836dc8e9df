#pragma once

#include <vector>

#include "hat/nn/model.hpp"
#include "hat/nn/optimizer.hpp"

namespace hat::nn {

struct TrainConfig {
    int epochs = 100;
    double learning_rate = 0.05;
};

struct TrainResult {
    std::vector<double> loss_history;  // mean label loss per epoch, pre-step
};

// Mean cross-entropy gradients over the batch, scaled by `scale` and added
// to the tape. Labels are global class ids and must lie in the model's
// label space. Returns scale * sum of per-sample losses.
double accumulate_label_gradients(const NetModel& model,
                                  const std::vector<Vec>& inputs,
                                  const std::vector<int>& global_labels,
                                  GradientTape& tape, double scale);

// Full-batch supervised training: one gradient step per epoch over the
// whole model. Also the reference arithmetic for the no-injection path of
// the joint trainer.
TrainResult supervised_train(NetModel& model, const std::vector<Vec>& inputs,
                             const std::vector<int>& global_labels,
                             const TrainConfig& config);

// Fraction of samples whose predicted global class matches. Labels outside
// the model's space can never match.
double accuracy(const NetModel& model, const std::vector<Vec>& inputs,
                const std::vector<int>& global_labels);

}  // namespace hat::nn
