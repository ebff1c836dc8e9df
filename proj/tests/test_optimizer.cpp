#include <doctest.h>

#include <vector>

#include "hat/error.hpp"
#include "hat/nn/model.hpp"
#include "hat/nn/ops.hpp"
#include "hat/nn/optimizer.hpp"
#include "support.hpp"

using namespace hat::nn;

TEST_CASE("param sets refuse frozen layers and detect sharing") {
    DenseLayer layer({2, 2, Activation::kIdentity});
    layer.freeze();
    ParamSet set;
    CHECK_THROWS_AS(set.add_layer(layer), hat::ProtocolError);

    layer.unfreeze();
    set.add_layer(layer);
    CHECK(set.total() == layer.param_count());

    ParamSet other;
    other.add_layer(layer);
    CHECK(set.overlaps(other));

    DenseLayer separate({2, 2, Activation::kIdentity});
    ParamSet third;
    third.add_layer(separate);
    CHECK_FALSE(set.overlaps(third));
}

TEST_CASE("sgd step applies p -= lr * g and clears the tape") {
    DenseLayer layer({1, 1, Activation::kIdentity});
    layer.weights()[0] = 2.0;
    layer.bias()[0] = -1.0;
    ParamSet set;
    set.add_layer(layer);
    SgdOptimizer opt(0.5, set);
    GradientTape tape(set);

    tape.grad_weights(layer)[0] = 4.0;
    tape.grad_bias(layer)[0] = -2.0;
    tape.mark_populated();
    opt.step(tape);

    CHECK(layer.weights()[0] == 0.0);   // 2 - 0.5*4
    CHECK(layer.bias()[0] == 0.0);      // -1 - 0.5*(-2)
    CHECK(tape.grad_weights(layer)[0] == 0.0);

    // stepping again without fresh gradients is a protocol violation
    CHECK_THROWS_AS(opt.step(tape), hat::ProtocolError);
}

TEST_CASE("zero learning rate leaves parameters untouched") {
    DenseLayer layer({1, 2, Activation::kIdentity});
    layer.weights()[0] = 3.0;
    layer.weights()[1] = -3.0;
    ParamSet set;
    set.add_layer(layer);
    SgdOptimizer opt(0.0, set);
    GradientTape tape(set);
    tape.grad_weights(layer)[0] = 100.0;
    tape.mark_populated();
    opt.step(tape);
    CHECK(layer.weights()[0] == 3.0);
    CHECK(layer.weights()[1] == -3.0);

    CHECK_THROWS_AS(SgdOptimizer(-0.1, set), hat::NumericError);
}

TEST_CASE("dense backward matches finite differences and returns dx") {
    hat::rng::Stream s(17, "bw");
    DenseLayer layer({3, 2, Activation::kRelu}, s);
    ParamSet set;
    set.add_layer(layer);
    GradientTape tape(set);

    Vec x{0.4, -0.7, 1.2};
    Vec c{0.8, -1.5};  // fixed projection makes the loss scalar
    auto loss = [&] {
        Vec out = layer.forward(x);
        return c[0] * out[0] + c[1] * out[1];
    };

    Vec pre = layer.forward_linear(x);
    Vec dout = c;
    Vec dx = dense_backward(layer, x, pre, dout, tape);

    auto gw = tape.grad_weights(layer);
    for (std::size_t j = 0; j < gw.size(); ++j) {
        double fd = testsup::fd_slope(loss, layer.weights()[j]);
        CHECK(testsup::rel_err(gw[j], fd) < 1e-6);
    }
    auto gb = tape.grad_bias(layer);
    for (std::size_t j = 0; j < gb.size(); ++j) {
        double fd = testsup::fd_slope(loss, layer.bias()[j]);
        CHECK(testsup::rel_err(gb[j], fd) < 1e-6);
    }
    for (std::size_t j = 0; j < x.size(); ++j) {
        double fd = testsup::fd_slope(loss, x[j]);
        CHECK(testsup::rel_err(dx[j], fd) < 1e-6);
    }
}

TEST_CASE("encoder and classifier backward check against finite differences") {
    hat::rng::Stream s(23, "chain");
    auto model = NetModel::build({{4, 5, Activation::kRelu}, {5, 3, Activation::kRelu}},
                                 {0, 1, 2, 3}, s);
    ParamSet set;
    set.add_model(model);
    GradientTape tape(set);

    Vec x{0.3, -0.9, 0.5, 1.1};
    int y = 2;
    auto loss = [&] {
        Vec h = model.encode(x);
        Vec z = model.classify(h);
        return ce_loss_hard(z, y).loss;
    };

    EncoderTrace trace;
    Vec h = model.encode(x, trace);
    Vec z = model.classify(h);
    auto lg = ce_loss_hard(z, y);
    Vec dh = classifier_backward(model, h, lg.dlogits, tape);
    encoder_backward(model, trace, dh, tape);

    CHECK(testsup::max_fd_error(model, tape, loss) < 1e-6);
}
