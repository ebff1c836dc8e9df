#include <benchmark/benchmark.h>

#include <vector>

#include "hat/fusion/feature_cache.hpp"
#include "hat/fusion/label_map.hpp"
#include "hat/fusion/mixer.hpp"
#include "hat/net/ledger.hpp"
#include "hat/net/registry.hpp"
#include "hat/nn/model.hpp"
#include "hat/nn/optimizer.hpp"
#include "hat/nn/train.hpp"
#include "hat/rng.hpp"
#include "hat/select/protocol.hpp"
#include "hat/select/stats.hpp"
#include "hat/synth/domain.hpp"
#include "hat/synth/task.hpp"

using hat::nn::Activation;
using hat::nn::NetModel;
using hat::nn::Vec;

namespace {

std::vector<Vec> random_batch(int n, int dim, hat::rng::Stream& s) {
    std::vector<Vec> out(static_cast<std::size_t>(n), Vec(static_cast<std::size_t>(dim)));
    for (auto& x : out) {
        for (double& v : x) v = s.normal();
    }
    return out;
}

void bench_encoder_forward(benchmark::State& state) {
    hat::rng::Stream s(1, "bench-forward");
    auto model = NetModel::build({{8, 24, Activation::kRelu}, {24, 16, Activation::kRelu}},
                                 {0, 1, 2, 3, 4}, s);
    auto xs = random_batch(64, 8, s);
    for (auto _ : state) {
        for (const auto& x : xs) benchmark::DoNotOptimize(model.encode(x));
    }
    state.SetItemsProcessed(state.iterations() * 64);
}
BENCHMARK(bench_encoder_forward);

void bench_supervised_epoch(benchmark::State& state) {
    hat::rng::Stream s(2, "bench-train");
    auto xs = random_batch(128, 8, s);
    std::vector<int> ys;
    for (int i = 0; i < 128; ++i) ys.push_back(s.int_in(0, 4));
    for (auto _ : state) {
        state.PauseTiming();
        hat::rng::Stream ms(3, "bench-train-model");
        auto model = NetModel::build({{8, 24, Activation::kRelu}, {24, 16, Activation::kRelu}},
                                     {0, 1, 2, 3, 4}, ms);
        state.ResumeTiming();
        hat::nn::supervised_train(model, xs, ys, {10, 0.05});
    }
    state.SetItemsProcessed(state.iterations() * 128 * 10);
}
BENCHMARK(bench_supervised_epoch);

void bench_fuse(benchmark::State& state) {
    hat::rng::Stream s(4, "bench-fuse");
    const int n_src = static_cast<int>(state.range(0));
    std::vector<NetModel> sources;
    std::vector<std::vector<int>> spaces;
    std::vector<int> dims;
    for (int i = 0; i < n_src; ++i) {
        std::vector<int> space{i % 5, (i + 1) % 5, (i + 2) % 5};
        std::sort(space.begin(), space.end());
        sources.push_back(NetModel::build({{8, 16, Activation::kRelu}}, space, s));
        spaces.push_back(space);
        dims.push_back(16);
    }
    hat::fusion::LabelMap map(5, spaces);
    hat::fusion::MixerState mixer(16, dims, 32, s);
    std::vector<const NetModel*> ptrs;
    for (const auto& m : sources) ptrs.push_back(&m);
    Vec h_t = random_batch(1, 16, s)[0];
    std::vector<Vec> h_src;
    for (int i = 0; i < n_src; ++i) h_src.push_back(random_batch(1, 16, s)[0]);

    for (auto _ : state) {
        benchmark::DoNotOptimize(hat::fusion::fuse(mixer, h_t, h_src, ptrs, map));
    }
}
BENCHMARK(bench_fuse)->Arg(3)->Arg(10);

void bench_coarse_select(benchmark::State& state) {
    auto task = hat::synth::make_task(3, 8, 0.4, 9);
    hat::net::Registry reg;
    const int n = static_cast<int>(state.range(0));
    for (int id = 0; id < n; ++id) {
        hat::synth::DomainShiftSpec shift;
        shift.rotation_angle = 0.1;
        shift.rotation_plane_seed = static_cast<std::uint64_t>(id);
        shift.label_subset = {id % 3, (id + 1) % 3};
        std::sort(shift.label_subset.begin(), shift.label_subset.end());
        auto data = hat::synth::sample_domain(task, shift, 30, 1.0, 50 + static_cast<std::uint64_t>(id));
        hat::rng::Stream ms(60 + static_cast<std::uint64_t>(id), "bench-src");
        auto model = NetModel::build({{8, 16, Activation::kRelu}}, data.label_space(), ms);
        std::vector<Vec> xs;
        std::vector<int> ys;
        for (int i : data.train_indices()) {
            xs.push_back(data.input(i));
            ys.push_back(*data.visible_label(i));
        }
        model.freeze_all();
        auto features = hat::select::extract_stat_features(xs);
        auto centroids = hat::select::compute_centroids(model, xs, &ys, 1.0);
        reg.register_source({id, std::move(data), std::move(model), std::move(features),
                             std::move(centroids), 0.9});
    }
    reg.register_endpoint(n);

    hat::rng::Stream ts(70, "bench-target");
    auto target = random_batch(36, 8, ts);
    auto feats = hat::select::extract_stat_features(target);
    hat::select::SelectionConfig sc;
    sc.eta = 0.25;
    for (auto _ : state) {
        hat::net::TrafficLedger led;
        benchmark::DoNotOptimize(hat::select::coarse_select(feats, reg, n, sc, led));
    }
}
BENCHMARK(bench_coarse_select)->Arg(20)->Arg(100);

}  // namespace

BENCHMARK_MAIN();
