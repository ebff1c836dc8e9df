#include <doctest.h>

#include "hat/error.hpp"
#include "hat/nn/ops.hpp"
#include "hat/nn/train.hpp"
#include "hat/rng.hpp"

using namespace hat::nn;

namespace {

// Two linearly separable blobs in 2D.
void blobs(std::vector<Vec>& xs, std::vector<int>& ys, int per_class, hat::rng::Stream& s) {
    for (int i = 0; i < per_class; ++i) {
        xs.push_back({s.normal(-1.5, 0.3), s.normal(0.0, 0.3)});
        ys.push_back(0);
        xs.push_back({s.normal(1.5, 0.3), s.normal(0.0, 0.3)});
        ys.push_back(1);
    }
}

}  // namespace

TEST_CASE("label gradient accumulation reports the scaled mean loss") {
    hat::rng::Stream s(31, "acc");
    auto model = NetModel::build({{2, 4, Activation::kRelu}}, {0, 1}, s);
    std::vector<Vec> xs{{0.5, -0.2}, {-0.8, 0.9}, {1.2, 0.1}};
    std::vector<int> ys{0, 1, 1};

    double expected = 0.0;
    for (std::size_t i = 0; i < xs.size(); ++i) {
        expected += ce_loss_hard(model.classify(model.encode(xs[i])), ys[i]).loss;
    }
    expected /= 3.0;

    ParamSet set;
    set.add_model(model);
    GradientTape tape(set);
    double got = accumulate_label_gradients(model, xs, ys, tape, 1.0 / 3.0);
    CHECK(got == doctest::Approx(expected).epsilon(1e-12));
}

TEST_CASE("labels outside the model's space are rejected") {
    hat::rng::Stream s(32, "space");
    auto model = NetModel::build({{2, 3, Activation::kRelu}}, {0, 2}, s);
    ParamSet set;
    set.add_model(model);
    GradientTape tape(set);
    std::vector<Vec> xs{{0.1, 0.2}};
    std::vector<int> ys{1};  // not in {0, 2}
    CHECK_THROWS_AS(accumulate_label_gradients(model, xs, ys, tape, 1.0), hat::DimensionError);
}

TEST_CASE("supervised training separates two blobs") {
    hat::rng::Stream data(33, "blobs");
    std::vector<Vec> xs;
    std::vector<int> ys;
    blobs(xs, ys, 40, data);

    hat::rng::Stream s(33, "net");
    auto model = NetModel::build({{2, 8, Activation::kRelu}}, {0, 1}, s);
    auto result = supervised_train(model, xs, ys, {120, 0.1});

    CHECK(result.loss_history.size() == 120);
    CHECK(result.loss_history.back() < result.loss_history.front());
    CHECK(accuracy(model, xs, ys) > 0.95);
}

TEST_CASE("accuracy counts out-of-space labels as wrong") {
    hat::rng::Stream s(34, "oos");
    auto model = NetModel::build({{2, 3, Activation::kRelu}}, {0, 1}, s);
    std::vector<Vec> xs{{0.3, 0.4}};
    std::vector<int> ys{5};
    CHECK(accuracy(model, xs, ys) == 0.0);
    CHECK(accuracy(model, {}, {}) == 0.0);
}
