#include <doctest.h>

#include <algorithm>
#include <cmath>

#include "hat/error.hpp"
#include "hat/select/centroids.hpp"
#include "hat/select/protocol.hpp"
#include "hat/select/stats.hpp"
#include "support.hpp"

using namespace hat::select;
using hat::nn::Vec;

TEST_CASE("statistic vectors match a directly computed oracle") {
    std::vector<Vec> data{{1.0, -2.0}, {3.0, 0.5}, {-1.0, 4.0}, {2.0, 1.5}};
    auto f = extract_stat_features(data);
    REQUIRE(f.dim() == 2);

    for (int d = 0; d < 2; ++d) {
        double mean = 0.0;
        for (auto& x : data) mean += x[d];
        mean /= 4.0;
        double m2 = 0.0, m3 = 0.0, m4 = 0.0;
        for (auto& x : data) {
            double c = x[d] - mean;
            m2 += c * c;
            m3 += c * c * c;
            m4 += c * c * c * c;
        }
        m2 /= 4.0;
        m3 /= 4.0;
        m4 /= 4.0;
        CHECK(f.mean[d] == doctest::Approx(mean).epsilon(1e-12));
        CHECK(f.stddev[d] == doctest::Approx(std::sqrt(m2)).epsilon(1e-12));
        CHECK(f.skewness[d] == doctest::Approx(m3 / std::pow(m2, 1.5)).epsilon(1e-12));
        CHECK(f.kurtosis[d] == doctest::Approx(m4 / (m2 * m2) - 3.0).epsilon(1e-12));
    }
    CHECK(f.announce_bytes() == 16 * 2);

    CHECK_THROWS_AS(extract_stat_features({{1.0}}), hat::DimensionError);
}

TEST_CASE("constant dimensions report zero spread instead of noise") {
    std::vector<Vec> data(50, Vec{3.0, -7.0});
    data[10][0] = 3.0;  // still constant
    auto f = extract_stat_features(data);
    CHECK(f.stddev[0] == 0.0);
    CHECK(f.skewness[0] == 0.0);
    CHECK(f.kurtosis[0] == 0.0);
    CHECK(f.mean[1] == -7.0);
}

TEST_CASE("cosine similarity basics feed the coarse score") {
    CHECK(cosine_similarity({1.0, 0.0}, {2.0, 0.0}) == doctest::Approx(1.0));
    CHECK(cosine_similarity({1.0, 0.0}, {0.0, 5.0}) == doctest::Approx(0.0));
    CHECK(cosine_similarity({0.0, 0.0}, {1.0, 1.0}) == 0.0);
    CHECK_THROWS_AS(cosine_similarity({1.0}, {1.0, 2.0}), hat::DimensionError);

    StatFeatureVector a{{1, 0}, {1, 0}, {1, 0}, {1, 0}};
    StatFeatureVector b{{1, 0}, {0, 1}, {1, 0}, {0, 1}};
    CHECK(feature_similarity(a, b) == doctest::Approx(0.5));  // mean of 1,0,1,0
}

TEST_CASE("entropy filter keeps exactly floor(omega * K) lowest-entropy samples") {
    // one-hot features expose which samples survive the filter
    auto run = [](int K, double omega) {
        std::vector<Vec> features;
        std::vector<Vec> logits;
        for (int i = 0; i < K; ++i) {
            Vec onehot(static_cast<std::size_t>(K), 0.0);
            onehot[static_cast<std::size_t>(i)] = 1.0;
            features.push_back(onehot);
            // sharper logits for larger i mean lower entropy
            logits.push_back({0.5 * (i + 1), 0.0});
        }
        auto set = centroids_from_outputs(features, logits, {4, 9}, omega, false);
        REQUIRE(set.centroids.count(4) == 1);
        int kept = 0;
        std::vector<int> kept_ids;
        const Vec& c = set.centroids.at(4);
        for (int i = 0; i < K; ++i) {
            if (c[static_cast<std::size_t>(i)] != 0.0) {
                ++kept;
                kept_ids.push_back(i);
            }
        }
        return std::pair{kept, kept_ids};
    };

    auto [kept10, ids10] = run(10, 0.75);
    CHECK(kept10 == 7);
    CHECK(ids10.front() == 3);  // the three highest-entropy samples 0,1,2 dropped

    CHECK(run(4, 0.75).first == 3);
    CHECK(run(3, 0.75).first == 2);
    CHECK(run(8, 1.0).first == 8);
    CHECK_THROWS_AS(run(1, 0.5), hat::NumericError);  // floor(0.5) keeps nothing
}

TEST_CASE("per-class ranking filters inside each pseudo-class") {
    std::vector<Vec> features;
    std::vector<Vec> logits;
    // class 0: four samples, class 1: two samples, entropy falling with index
    for (int i = 0; i < 4; ++i) {
        Vec onehot(6, 0.0);
        onehot[static_cast<std::size_t>(i)] = 1.0;
        features.push_back(onehot);
        logits.push_back({1.0 * (i + 1), 0.0});
    }
    for (int i = 4; i < 6; ++i) {
        Vec onehot(6, 0.0);
        onehot[static_cast<std::size_t>(i)] = 1.0;
        features.push_back(onehot);
        logits.push_back({0.0, 1.0 * (i + 1)});
    }
    auto set = centroids_from_outputs(features, logits, {0, 1}, 0.5, true);
    int kept0 = 0, kept1 = 0;
    for (int i = 0; i < 4; ++i) kept0 += set.centroids.at(0)[static_cast<std::size_t>(i)] != 0.0;
    for (int i = 4; i < 6; ++i) kept1 += set.centroids.at(1)[static_cast<std::size_t>(i)] != 0.0;
    CHECK(kept0 == 2);  // floor(0.5 * 4)
    CHECK(kept1 == 1);  // floor(0.5 * 2)
}

TEST_CASE("true-label centroids are plain per-class means") {
    hat::rng::Stream s(71, "centroids");
    auto model = hat::nn::NetModel::build({{3, 4, hat::nn::Activation::kRelu}}, {0, 1}, s);
    std::vector<Vec> xs{{0.1, 0.2, 0.3}, {0.4, -0.5, 0.6}, {1.0, 1.1, -1.2}, {0.0, 0.7, 0.9}};
    std::vector<int> ys{0, 1, 0, 1};
    auto set = compute_centroids(model, xs, &ys, 0.75);

    for (int cls : {0, 1}) {
        Vec mean(4, 0.0);
        int count = 0;
        for (std::size_t i = 0; i < xs.size(); ++i) {
            if (ys[i] != cls) continue;
            Vec h = model.encode(xs[i]);
            for (int d = 0; d < 4; ++d) mean[static_cast<std::size_t>(d)] += h[static_cast<std::size_t>(d)];
            ++count;
        }
        for (double& v : mean) v /= count;
        for (int d = 0; d < 4; ++d) {
            CHECK(set.centroids.at(cls)[static_cast<std::size_t>(d)] ==
                  doctest::Approx(mean[static_cast<std::size_t>(d)]).epsilon(1e-12));
        }
    }
    CHECK(set.feature_dim == 4);
    CHECK(set.transfer_bytes() == 2 * 4 * 4);
}

TEST_CASE("centroid similarity averages cosines over shared classes only") {
    ClassCentroidSet a{{{0, {1.0, 0.0}}, {1, {0.0, 1.0}}}, 2};
    ClassCentroidSet b{{{0, {2.0, 0.0}}, {1, {1.0, 0.0}}, {5, {3.0, 3.0}}}, 2};
    CHECK(centroid_similarity(a, b) == doctest::Approx(0.5));  // (1 + 0) / 2

    ClassCentroidSet c{{{7, {1.0, 1.0}}}, 2};
    CHECK(centroid_similarity(a, c) == -1.0);

    ClassCentroidSet d{{{0, {1.0, 0.0, 0.0}}}, 3};
    CHECK_THROWS_AS(centroid_similarity(a, d), hat::DimensionError);
}

TEST_CASE("coarse selection meters announcements and pulls the right count") {
    auto task = hat::synth::make_task(3, 4, 0.35, 55);
    std::vector<hat::nn::LayerSpec> skel{{4, 6, hat::nn::Activation::kRelu}};
    hat::net::Registry registry;
    for (int id = 0; id < 5; ++id) {
        registry.register_source(testsup::stub_source(id, task, {0, 1, 2}, 200 + id, skel));
    }
    registry.register_endpoint(99);

    hat::synth::DomainShiftSpec shift;
    shift.rotation_angle = 0.2;
    shift.rotation_plane_seed = 9;
    shift.label_subset = {0, 1, 2};
    auto target = hat::synth::sample_domain(task, shift, 40, 0.5, 900);
    std::vector<Vec> train;
    for (int i : target.train_indices()) train.push_back(target.input(i));
    auto features = extract_stat_features(train);

    SelectionConfig cfg;
    cfg.eta = 0.5;  // ceil(2.5) = 3 of 5
    hat::net::TrafficLedger ledger;
    auto coarse = coarse_select(features, registry, 99, cfg, ledger);

    CHECK(coarse.ids.size() == 3);
    CHECK(coarse.scores.size() == 5);

    // ranking is score-descending with id tie-break
    for (std::size_t k = 1; k < coarse.ids.size(); ++k) {
        double prev = coarse.scores.at(coarse.ids[k - 1]);
        double cur = coarse.scores.at(coarse.ids[k]);
        CHECK((prev > cur || (prev == cur && coarse.ids[k - 1] < coarse.ids[k])));
    }

    CHECK(ledger.bytes(hat::net::MessageKind::kFeatureAnnounce) == 5 * 16 * 4);
    CHECK(ledger.bytes(hat::net::MessageKind::kSimilarityReply) == 5 * 8);
    CHECK(ledger.bytes(hat::net::MessageKind::kModelInquiry) == 3 * 8);
    std::int64_t transfer = 0;
    for (int id : coarse.ids) {
        const auto& src = registry.source(id);
        transfer += src.model.byte_size() + src.centroids.transfer_bytes();
    }
    CHECK(ledger.bytes(hat::net::MessageKind::kModelTransfer) == transfer);
}

TEST_CASE("joint selection multiplies accuracy into the ranking and counts inference") {
    auto task = hat::synth::make_task(3, 4, 0.4, 56);
    std::vector<hat::nn::LayerSpec> skel{{4, 8, hat::nn::Activation::kRelu}};
    hat::net::Registry registry;
    for (int id = 0; id < 4; ++id) {
        registry.register_source(
            testsup::stub_source(id, task, {0, 1, 2}, 300 + id, skel, 60, 40));
    }
    registry.register_endpoint(42);

    hat::synth::DomainShiftSpec shift;
    shift.rotation_angle = 0.15;
    shift.rotation_plane_seed = 14;
    shift.label_subset = {0, 1, 2};
    auto target = hat::synth::sample_domain(task, shift, 60, 0.3, 901);
    std::vector<Vec> train;
    std::vector<int> labeled_pos, labeled_cls;
    int k = 0;
    for (int i : target.train_indices()) {
        train.push_back(target.input(i));
        if (auto y = target.visible_label(i)) {
            labeled_pos.push_back(k);
            labeled_cls.push_back(*y);
        }
        ++k;
    }

    SelectionConfig cfg;
    cfg.eta = 1.0;
    cfg.n_p = 2;
    hat::net::TrafficLedger ledger;
    auto features = extract_stat_features(train);
    auto coarse = coarse_select(features, registry, 42, cfg, ledger);
    auto outcome = joint_select(registry, coarse, train, labeled_pos, labeled_cls, cfg, ledger);

    CHECK(ledger.inference_count() == 4 * static_cast<std::int64_t>(train.size()));
    CHECK(outcome.final_ids.size() == 2);
    REQUIRE(outcome.scores.size() == 4);

    // the joint score is literally acc * fine-similarity, ranked descending
    for (const auto& cs : outcome.scores) {
        CHECK(cs.joint == cs.acc * cs.s_fine);
        CHECK(cs.acc >= 0.0);
        CHECK(cs.acc <= 1.0);
    }
    auto ranked = outcome.scores;
    std::stable_sort(ranked.begin(), ranked.end(), [](const auto& a, const auto& b) {
        if (a.joint != b.joint) return a.joint > b.joint;
        return a.domain_id < b.domain_id;
    });
    for (std::size_t i = 0; i < ranked.size(); ++i) {
        CHECK(ranked[i].domain_id == outcome.scores[i].domain_id);
    }
    CHECK(outcome.final_ids[0] == ranked[0].domain_id);
    CHECK(outcome.final_ids[1] == ranked[1].domain_id);
}
