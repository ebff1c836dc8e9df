#include <doctest.h>

#include <cmath>

#include "hat/error.hpp"
#include "hat/nn/ops.hpp"
#include "support.hpp"

using namespace hat::nn;

TEST_CASE("softmax matches the closed form and survives large logits") {
    Vec z{1.0, 2.0, 0.5};
    double denom = std::exp(1.0) + std::exp(2.0) + std::exp(0.5);
    Vec p = softmax(z);
    for (int i = 0; i < 3; ++i) CHECK(p[i] == doctest::Approx(std::exp(z[i]) / denom).epsilon(1e-12));

    Vec big{1000.0, 1001.0};
    Vec q = softmax(big);
    CHECK(std::isfinite(q[0]));
    CHECK(q[0] + q[1] == doctest::Approx(1.0).epsilon(1e-12));
    CHECK(q[1] > q[0]);
}

TEST_CASE("argmax prefers the earliest maximum and rejects empty input") {
    Vec v{0.2, 0.7, 0.7, 0.1};
    CHECK(argmax(v) == 1);
    CHECK_THROWS_AS(argmax(Vec{}), hat::DimensionError);
}

TEST_CASE("entropy closed forms") {
    Vec uniform(8, 1.0 / 8.0);
    CHECK(entropy(uniform) == doctest::Approx(std::log(8.0)).epsilon(1e-12));
    Vec onehot{0.0, 1.0, 0.0};
    CHECK(entropy(onehot) == 0.0);
    Vec not_dist{0.5, 0.2};
    CHECK_THROWS_AS(entropy(not_dist), hat::NumericError);
}

TEST_CASE("hard cross-entropy agrees with its definition and gradient") {
    Vec z{0.3, -1.2, 2.0, 0.0};
    int y = 2;
    auto lg = ce_loss_hard(z, y);
    Vec p = softmax(z);
    CHECK(lg.loss == doctest::Approx(-std::log(p[y])).epsilon(1e-12));
    for (int i = 0; i < 4; ++i) {
        double expect = p[i] - (i == y ? 1.0 : 0.0);
        CHECK(lg.dlogits[i] == doctest::Approx(expect).epsilon(1e-12));
    }

    // finite differences on the logits
    for (int i = 0; i < 4; ++i) {
        auto loss = [&] { return ce_loss_hard(z, y).loss; };
        double fd = testsup::fd_slope(loss, z[i]);
        CHECK(testsup::rel_err(lg.dlogits[i], fd) < 1e-6);
    }
}

TEST_CASE("soft cross-entropy with a one-hot target equals the hard loss exactly") {
    Vec z{0.7, -0.4, 1.1};
    Vec onehot{0.0, 0.0, 1.0};
    auto hard = ce_loss_hard(z, 2);
    auto soft = ce_loss_soft(z, onehot);
    CHECK(hard.loss == soft.loss);
    for (int i = 0; i < 3; ++i) CHECK(hard.dlogits[i] == soft.dlogits[i]);
}

TEST_CASE("soft cross-entropy gradient checks against finite differences") {
    Vec z{0.2, 0.9, -0.5, 1.4};
    Vec target{0.1, 0.4, 0.3, 0.2};
    auto lg = ce_loss_soft(z, target);
    for (int i = 0; i < 4; ++i) {
        auto loss = [&] { return ce_loss_soft(z, target).loss; };
        double fd = testsup::fd_slope(loss, z[i]);
        CHECK(testsup::rel_err(lg.dlogits[i], fd) < 1e-6);
    }
}
