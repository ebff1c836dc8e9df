#include "hat/nn/train.hpp"

#include "hat/error.hpp"
#include "hat/nn/ops.hpp"

namespace hat::nn {

double accumulate_label_gradients(const NetModel& model,
                                  const std::vector<Vec>& inputs,
                                  const std::vector<int>& global_labels,
                                  GradientTape& tape, double scale) {
    if (inputs.size() != global_labels.size()) {
        throw DimensionError("inputs and labels disagree in length");
    }
    if (inputs.empty()) throw DimensionError("empty training batch");
    double loss = 0.0;
    for (std::size_t i = 0; i < inputs.size(); ++i) {
        int local = model.local_index_of(global_labels[i]);
        if (local < 0) throw DimensionError("training label outside model label space");
        EncoderTrace trace;
        Vec h = model.encode(inputs[i], trace);
        Vec logits = model.classify(h);
        LossGrad lg = ce_loss_hard(logits, local);
        loss += lg.loss;
        for (double& g : lg.dlogits) g *= scale;
        Vec dh = classifier_backward(model, h, lg.dlogits, tape);
        encoder_backward(model, trace, dh, tape);
    }
    return loss * scale;
}

TrainResult supervised_train(NetModel& model, const std::vector<Vec>& inputs,
                             const std::vector<int>& global_labels,
                             const TrainConfig& config) {
    if (config.epochs < 0) throw NumericError("negative epoch count");
    ParamSet params;
    params.add_model(model);
    SgdOptimizer opt(config.learning_rate, params);
    GradientTape tape(params);
    TrainResult result;
    result.loss_history.reserve(static_cast<std::size_t>(config.epochs));
    double scale = 1.0 / static_cast<double>(inputs.size());
    for (int epoch = 0; epoch < config.epochs; ++epoch) {
        double loss = accumulate_label_gradients(model, inputs, global_labels, tape, scale);
        tape.mark_populated();
        opt.step(tape);
        result.loss_history.push_back(loss);
    }
    return result;
}

double accuracy(const NetModel& model, const std::vector<Vec>& inputs,
                const std::vector<int>& global_labels) {
    if (inputs.size() != global_labels.size()) {
        throw DimensionError("inputs and labels disagree in length");
    }
    if (inputs.empty()) return 0.0;
    int hits = 0;
    for (std::size_t i = 0; i < inputs.size(); ++i) {
        if (predict_class(model, inputs[i]) == global_labels[i]) ++hits;
    }
    return static_cast<double>(hits) / static_cast<double>(inputs.size());
}

}  // namespace hat::nn
