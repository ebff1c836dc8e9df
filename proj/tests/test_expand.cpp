#include <doctest.h>

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <filesystem>
#include <json.hpp>
#include <set>
#include <string>

#include "hat/error.hpp"
#include "hat/expand/config.hpp"
#include "hat/expand/experiment.hpp"
#include "hat/expand/fleet.hpp"
#include "hat/expand/report.hpp"
#include "hat/expand/strategy.hpp"
#include "hat/nn/serialize.hpp"

using namespace hat::expand;

namespace {

ExperimentConfig small_config() {
    ExperimentConfig cfg;
    cfg.classes = 3;
    cfg.input_dim = 4;
    cfg.sources = 4;
    cfg.samples = 60;
    cfg.source_label_count = 2;
    cfg.groups = {3, 2, 2};
    cfg.source_epochs = 25;
    cfg.gamma = 0.2;
    cfg.eta = 0.5;
    cfg.n_p = 2;
    cfg.epochs_target = 15;
    cfg.epochs_mixer = 8;
    cfg.seeds = 1;
    return cfg;
}

std::string parse_failure(const std::string& text) {
    try {
        parse_config_text(text, "test.ini");
    } catch (const hat::ConfigError& e) {
        return e.what();
    }
    return "";
}

}  // namespace

TEST_CASE("config defaults are valid and bounds are enforced") {
    ExperimentConfig cfg;
    CHECK_NOTHROW(cfg.validate());
    CHECK(cfg.eta == 0.25);
    CHECK(cfg.omega == 0.75);
    CHECK(cfg.n_p == 3);
    CHECK(cfg.b_auto);
    CHECK(cfg.strategy == "hat");

    auto bad = cfg;
    bad.eta = 0.0;
    CHECK_THROWS_AS(bad.validate(), hat::ConfigError);
    bad = cfg;
    bad.eta = 1.5;
    CHECK_THROWS_AS(bad.validate(), hat::ConfigError);
    bad = cfg;
    bad.gamma = 0.0;
    CHECK_THROWS_AS(bad.validate(), hat::ConfigError);
    bad = cfg;
    bad.groups = {5};
    CHECK_THROWS_AS(bad.validate(), hat::ConfigError);
    bad = cfg;
    bad.source_label_count = 1;
    CHECK_THROWS_AS(bad.validate(), hat::ConfigError);
    bad = cfg;
    bad.b_auto = false;
    bad.b = 1.5;
    CHECK_THROWS_AS(bad.validate(), hat::ConfigError);
    bad = cfg;
    bad.b_auto = true;
    bad.b = -1.0;
    CHECK_NOTHROW(bad.validate());
}

TEST_CASE("config text with sections, comments and noise parses") {
    std::string text =
        "# experiment\n"
        "\n"
        "[task]\n"
        "classes = 4\n"
        "  input_dim=6  \n"
        "\n"
        "[select]\n"
        "eta = 0.5\n"
        "np = 2\n"
        "per_class_rank = yes\n"
        "\n"
        "[fleet]\n"
        "groups = 4, 2,2\n"
        "\n"
        "[inject]\n"
        "b = 0.35\n"
        "\n"
        "[run]\n"
        "strategy = equal\n";
    auto cfg = parse_config_text(text, "test.ini");
    CHECK(cfg.classes == 4);
    CHECK(cfg.input_dim == 6);
    CHECK(cfg.eta == 0.5);
    CHECK(cfg.n_p == 2);
    CHECK(cfg.per_class_rank);
    CHECK(cfg.groups == std::vector<int>{4, 2, 2});
    CHECK(cfg.b == 0.35);
    CHECK_FALSE(cfg.b_auto);
    CHECK(cfg.strategy == "equal");
    CHECK(cfg.omega == 0.75);  // untouched keys keep defaults

    auto cfg2 = parse_config_text("[inject]\nb = auto\n", "test.ini");
    CHECK(cfg2.b_auto);
}

TEST_CASE("config diagnostics name the file and line") {
    CHECK(parse_failure("[task]\nclasses = 4\nwat = 1\n").find("test.ini:3") != std::string::npos);
    CHECK(parse_failure("just words\n").find("test.ini:1") != std::string::npos);
    CHECK(parse_failure("[task\n").find("unterminated") != std::string::npos);
    CHECK(parse_failure("[task]\nclasses = 4x\n").find("trailing") != std::string::npos);
    CHECK(parse_failure("[task]\nclasses = two\n").find("expected an integer") !=
          std::string::npos);
    CHECK(parse_failure("[select]\nper_class_rank = maybe\n").find("expected a boolean") !=
          std::string::npos);
    CHECK(parse_failure("[fleet]\ngroups = 3,,2\n").find("empty element") != std::string::npos);
    CHECK(parse_failure("[task]\nclasses =\n").find("empty value") != std::string::npos);
    CHECK(parse_failure("[task]\nstddev = -1\n") != "");  // validate() failures surface too
}

TEST_CASE("config echo round-trips every field") {
    auto cfg = small_config();
    cfg.b_auto = false;
    cfg.b = 0.4;
    cfg.per_class_rank = true;
    cfg.true_label_centroids = true;
    cfg.kd_always = true;
    cfg.strategy = "weighted";
    cfg.stddev = 0.123456789012345;
    cfg.seeds = 3;

    auto echo = parse_config_text(config_to_text(cfg), "echo");
    CHECK(echo.classes == cfg.classes);
    CHECK(echo.input_dim == cfg.input_dim);
    CHECK(echo.stddev == cfg.stddev);
    CHECK(echo.sources == cfg.sources);
    CHECK(echo.samples == cfg.samples);
    CHECK(echo.source_label_count == cfg.source_label_count);
    CHECK(echo.rotation == cfg.rotation);
    CHECK(echo.translation_stddev == cfg.translation_stddev);
    CHECK(echo.scale_min == cfg.scale_min);
    CHECK(echo.scale_max == cfg.scale_max);
    CHECK(echo.groups == cfg.groups);
    CHECK(echo.source_epochs == cfg.source_epochs);
    CHECK(echo.source_lr == cfg.source_lr);
    CHECK(echo.gamma == cfg.gamma);
    CHECK(echo.eta == cfg.eta);
    CHECK(echo.omega == cfg.omega);
    CHECK(echo.n_p == cfg.n_p);
    CHECK(echo.per_class_rank == cfg.per_class_rank);
    CHECK(echo.true_label_centroids == cfg.true_label_centroids);
    CHECK(echo.epochs_target == cfg.epochs_target);
    CHECK(echo.epochs_mixer == cfg.epochs_mixer);
    CHECK(echo.ratio == cfg.ratio);
    CHECK(echo.lr_target == cfg.lr_target);
    CHECK(echo.lr_mixer == cfg.lr_mixer);
    CHECK(echo.m == cfg.m);
    CHECK(echo.b == cfg.b);
    CHECK(echo.b_auto == cfg.b_auto);
    CHECK(echo.kd_always == cfg.kd_always);
    CHECK(echo.kd_full_refresh == cfg.kd_full_refresh);
    CHECK(echo.distill_labeled == cfg.distill_labeled);
    CHECK(echo.strategy == cfg.strategy);
    CHECK(echo.seeds == cfg.seeds);

    // the auto marker survives the trip as well
    auto cfg_auto = small_config();
    auto echo_auto = parse_config_text(config_to_text(cfg_auto), "echo");
    CHECK(echo_auto.b_auto);
}

TEST_CASE("strategy presets wire the advertised machinery") {
    auto hat = strategy_by_name("hat");
    CHECK(hat.selection == SelectionKind::kHat);
    CHECK(hat.fusion == FusionKind::kHatMixer);
    CHECK(hat.injection == InjectionKind::kHatAdaptive);

    CHECK(strategy_by_name("supervised").injection == InjectionKind::kNone);
    CHECK(strategy_by_name("random").selection == SelectionKind::kRandom);
    CHECK(strategy_by_name("accuracy_only").selection == SelectionKind::kAccuracyOnly);
    CHECK(strategy_by_name("all").selection == SelectionKind::kAll);

    for (const char* name : {"equal", "nearest", "weighted"}) {
        auto s = strategy_by_name(name);
        CHECK(s.selection == SelectionKind::kHat);
        CHECK(s.injection == InjectionKind::kFixedAlpha);
    }
    CHECK(strategy_by_name("equal").fusion == FusionKind::kEqual);
    CHECK(strategy_by_name("nearest").fusion == FusionKind::kNearest);
    CHECK(strategy_by_name("weighted").fusion == FusionKind::kWeighted);

    CHECK_THROWS_AS(strategy_by_name("mystery"), hat::ConfigError);

    auto names = known_strategies();
    CHECK(names.size() == 8);
    for (const auto& n : names) CHECK(strategy_by_name(n).name == n);
    CHECK(to_string(SelectionKind::kRandom) == "random");
    CHECK(to_string(FusionKind::kNearest) == "nearest");
    CHECK(to_string(InjectionKind::kNone) == "none");
}

TEST_CASE("every budget tier fits a library skeleton and tiers cycle") {
    auto library = skeleton_library(8);
    REQUIRE(library.size() >= 2);
    for (std::size_t i = 1; i < library.size(); ++i) {
        CHECK(hat::net::skeleton_param_count(library[i]) >
              hat::net::skeleton_param_count(library[i - 1]));
    }
    for (int id = 0; id < 8; ++id) {
        auto zeta = device_constraints_for(id);
        auto stack = hat::net::pick_skeleton(library, zeta);
        CHECK(hat::net::skeleton_param_count(stack) <= zeta.max_param_count);
        CHECK(hat::net::skeleton_flops(stack) <= zeta.max_flops_per_inference);
        CHECK(stack.front().input_dim == 8);
    }
    CHECK(device_constraints_for(0).max_param_count ==
          device_constraints_for(4).max_param_count);
    CHECK(device_constraints_for(1).max_param_count !=
          device_constraints_for(2).max_param_count);
}

TEST_CASE("fleet construction replays byte for byte") {
    auto cfg = small_config();
    auto a = build_otse_fleet(cfg, 11);
    auto b = build_otse_fleet(cfg, 11);

    CHECK(a.registry.size() == cfg.sources);
    CHECK(a.target_id == cfg.sources);
    auto ids = a.registry.source_ids();
    REQUIRE(static_cast<int>(ids.size()) == cfg.sources);
    for (int id : ids) {
        const auto& sa = a.registry.source(id);
        const auto& sb = b.registry.source(id);
        CHECK(hat::nn::serialize_model(sa.model) == hat::nn::serialize_model(sb.model));
        CHECK(sa.self_accuracy == sb.self_accuracy);
        CHECK(sa.features.announce_bytes() == sb.features.announce_bytes());
        CHECK(static_cast<int>(sa.dataset.label_space().size()) == cfg.source_label_count);
        REQUIRE(sa.dataset.size() == sb.dataset.size());
        for (int i = 0; i < sa.dataset.size(); ++i) CHECK(sa.dataset.input(i) == sb.dataset.input(i));
    }
    CHECK(static_cast<int>(a.target_data.label_space().size()) == cfg.classes);
    REQUIRE(a.target_data.size() == b.target_data.size());
    for (int i = 0; i < a.target_data.size(); ++i) {
        CHECK(a.target_data.input(i) == b.target_data.input(i));
    }

    // a different seed actually moves the data
    auto c = build_otse_fleet(cfg, 12);
    bool same = true;
    for (int i = 0; i < a.target_data.size() && same; ++i) {
        same = a.target_data.input(i) == c.target_data.input(i);
    }
    CHECK_FALSE(same);
}

TEST_CASE("supervised expansion stays off the network") {
    auto cfg = small_config();
    auto run = run_otse(cfg, strategy_by_name("supervised"), 5);
    CHECK(run.strategy == "supervised");
    CHECK(run.traffic_bytes == 0);
    CHECK(run.inference_count == 0);
    REQUIRE(run.targets.size() == 1);
    const auto& t = run.targets[0];
    CHECK_FALSE(t.fusion_used);
    CHECK(t.selected_ids.empty());
    CHECK(std::isnan(t.p_acc));
    CHECK(std::isnan(run.mean_p_acc));
    CHECK(t.accuracy >= 0.0);
    CHECK(t.accuracy <= 1.0);
    CHECK(static_cast<int>(t.history.size()) == cfg.epochs_target);
    for (const auto& kv : run.traffic_by_kind) CHECK(kv.second == 0);
}

TEST_CASE("full transfer meters announce, reply, inquiry and transfer traffic") {
    auto cfg = small_config();
    auto run = run_otse(cfg, strategy_by_name("hat"), 5);
    REQUIRE(run.targets.size() == 1);
    const auto& t = run.targets[0];

    CHECK(t.fusion_used);
    CHECK(t.selected_ids.size() == 2);  // ceil(0.5 * 4) coarse survivors, n_p = 2
    CHECK(t.p_acc >= 0.0);
    CHECK(t.p_acc <= 1.0);
    CHECK(run.mean_p_acc == t.p_acc);
    CHECK(run.mean_accuracy == t.accuracy);

    // every source hears one announce and answers with one scalar
    CHECK(run.traffic_by_kind.at("feature_announce") == cfg.sources * 16 * cfg.input_dim);
    CHECK(run.traffic_by_kind.at("similarity_reply") == cfg.sources * 8);
    CHECK(run.traffic_by_kind.at("model_inquiry") == 2 * 8);
    CHECK(run.traffic_by_kind.at("model_transfer") > 0);
    std::int64_t sum = 0;
    for (const auto& kv : run.traffic_by_kind) sum += kv.second;
    CHECK(sum == run.traffic_bytes);
    CHECK(run.inference_count > 0);
}

TEST_CASE("a repeated run reproduces its report byte for byte") {
    auto cfg = small_config();
    auto r1 = run_otse(cfg, strategy_by_name("hat"), 7);
    auto r2 = run_otse(cfg, strategy_by_name("hat"), 7);
    CHECK(report_json({r1}, cfg) == report_json({r2}, cfg));
    CHECK(comparison_csv({r1}) == comparison_csv({r2}));
    CHECK(r1.targets[0].accuracy == r2.targets[0].accuracy);
    CHECK(r1.traffic_bytes == r2.traffic_bytes);
}

TEST_CASE("multi-round expansion grows the registry and books per-round traffic") {
    auto cfg = small_config();
    auto run = run_mrse(cfg, strategy_by_name("hat"), 9);

    CHECK(run.registry_sizes == std::vector<int>{3, 5});
    REQUIRE(run.targets.size() == 4);
    std::set<int> ids;
    for (const auto& t : run.targets) ids.insert(t.target_id);
    CHECK(ids == std::set<int>{3, 4, 5, 6});
    REQUIRE(run.round_traffic_bytes.size() == 2);
    CHECK(run.round_traffic_bytes[0] + run.round_traffic_bytes[1] == run.traffic_bytes);
    CHECK(run.round_traffic_bytes[0] > 0);
    CHECK(run.round_traffic_bytes[1] > 0);
    for (const auto& t : run.targets) {
        CHECK(t.fusion_used);
        CHECK(t.accuracy >= 0.0);
    }

    auto replay = run_mrse(cfg, strategy_by_name("hat"), 9);
    CHECK(report_json({run}, cfg) == report_json({replay}, cfg));
}

TEST_CASE("the grid crosses strategies with seeds over a shared fleet") {
    auto cfg = small_config();
    cfg.seeds = 2;
    auto runs = run_grid(cfg, {"supervised", "equal"}, 21);
    REQUIRE(runs.size() == 4);
    int supervised_count = 0;
    std::set<std::uint64_t> seeds;
    for (const auto& r : runs) {
        if (r.strategy == "supervised") ++supervised_count;
        seeds.insert(r.seed);
        REQUIRE(r.targets.size() == 1);
    }
    CHECK(supervised_count == 2);
    CHECK(seeds == std::set<std::uint64_t>{21, 22});

    // same seed means the same fleet, so the supervised baseline repeats
    // identically inside one grid row pair
    auto again = run_grid(cfg, {"supervised", "equal"}, 21);
    CHECK(comparison_csv(runs) == comparison_csv(again));

    CHECK_THROWS_AS(run_grid(cfg, {}, 21), hat::ConfigError);
}

TEST_CASE("sweeps tag each point and move only the swept knob") {
    auto cfg = small_config();
    auto runs = run_sweep(cfg, "eta", {0.5, 1.0}, "hat", 3);
    REQUIRE(runs.size() == 2);
    CHECK(runs[0].strategy == "hat@eta=0.5");
    CHECK(runs[1].strategy == "hat@eta=1");

    auto np_runs = run_sweep(cfg, "np", {1.0}, "equal", 3);
    REQUIRE(np_runs.size() == 1);
    CHECK(np_runs[0].strategy == "equal@np=1");
    CHECK(np_runs[0].targets[0].selected_ids.size() == 1);

    CHECK_THROWS_AS(run_sweep(cfg, "omega", {0.5}, "hat", 3), hat::ConfigError);
    CHECK_THROWS_AS(run_sweep(cfg, "eta", {}, "hat", 3), hat::ConfigError);
    CHECK_THROWS_AS(run_sweep(cfg, "eta", {2.0}, "hat", 3), hat::ConfigError);
}

TEST_CASE("the json report carries config echo and per-run tables") {
    auto cfg = small_config();
    std::vector<RunResult> runs;
    runs.push_back(run_otse(cfg, strategy_by_name("supervised"), 4));
    runs.push_back(run_otse(cfg, strategy_by_name("hat"), 4));

    auto doc = nlohmann::json::parse(report_json(runs, cfg));
    REQUIRE(doc.contains("config"));
    auto echoed = parse_config_text(doc["config"].get<std::string>(), "embedded");
    CHECK(echoed.sources == cfg.sources);

    REQUIRE(doc["runs"].size() == 2);
    const auto& sup = doc["runs"][0];
    CHECK(sup["strategy"] == "supervised");
    CHECK(sup["seed"] == 4);
    CHECK(sup["mean_p_acc"].is_null());
    CHECK(sup["traffic_bytes"] == 0);
    CHECK(sup["targets"][0]["p_acc"].is_null());
    CHECK(sup["targets"][0]["fusion_used"] == false);

    const auto& hat_run = doc["runs"][1];
    CHECK(hat_run["mean_p_acc"].is_number());
    CHECK(hat_run["traffic_by_kind"]["model_transfer"].get<std::int64_t>() > 0);
    CHECK(hat_run["targets"][0]["selected_ids"].size() == 2);
    CHECK(hat_run["inference_count"].get<std::int64_t>() > 0);

    auto csv = comparison_csv(runs);
    CHECK(csv.rfind("strategy,seed,accuracy,p_acc,traffic_bytes,inference_count\n", 0) == 0);
    CHECK(std::count(csv.begin(), csv.end(), '\n') == 3);
    CHECK(csv.find("supervised,4,") != std::string::npos);
    CHECK(csv.find(",nan,0,0") != std::string::npos);  // supervised row: no fusion, no traffic

    auto hist = history_csv(runs[1].targets[0]);
    CHECK(hist.rfind("epoch,mixer_acc,alpha,label_loss,distill_loss,val_acc\n", 0) == 0);
    CHECK(std::count(hist.begin(), hist.end(), '\n') ==
          static_cast<long>(runs[1].targets[0].history.size()) + 1);
}

TEST_CASE("write_outputs lays the report tree on disk") {
    auto cfg = small_config();
    std::vector<RunResult> runs;
    runs.push_back(run_otse(cfg, strategy_by_name("supervised"), 6));

    namespace fs = std::filesystem;
    auto dir = fs::temp_directory_path() / "hat-expand-test-out";
    fs::remove_all(dir);
    write_outputs(runs, cfg, dir.string());

    CHECK(fs::exists(dir / "report.json"));
    CHECK(fs::exists(dir / "comparison.csv"));
    CHECK(fs::exists(dir / "supervised-seed6" / "history_4.csv"));
    fs::remove_all(dir);
}
