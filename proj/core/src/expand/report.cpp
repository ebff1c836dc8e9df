#include "hat/expand/report.hpp"

#include <cmath>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <sstream>

#include <json.hpp>

#include "hat/error.hpp"

namespace hat::expand {
namespace {

std::string num(double x) {
    if (std::isnan(x)) return "nan";
    char buf[64];
    std::snprintf(buf, sizeof(buf), "%.17g", x);
    return buf;
}

nlohmann::json target_json(const TargetOutcome& t) {
    nlohmann::json j;
    j["target_id"] = t.target_id;
    j["accuracy"] = t.accuracy;
    if (t.fusion_used) {
        j["p_acc"] = t.p_acc;
    } else {
        j["p_acc"] = nullptr;
    }
    j["fusion_used"] = t.fusion_used;
    j["selected_ids"] = t.selected_ids;
    j["best_mixer_acc"] = t.best_mixer_acc;
    return j;
}

nlohmann::json run_json(const RunResult& run) {
    nlohmann::json j;
    j["strategy"] = run.strategy;
    j["seed"] = run.seed;
    j["mean_accuracy"] = run.mean_accuracy;
    if (std::isnan(run.mean_p_acc)) {
        j["mean_p_acc"] = nullptr;
    } else {
        j["mean_p_acc"] = run.mean_p_acc;
    }
    j["traffic_bytes"] = run.traffic_bytes;
    j["traffic_by_kind"] = run.traffic_by_kind;
    j["inference_count"] = run.inference_count;
    if (!run.registry_sizes.empty()) {
        j["registry_sizes"] = run.registry_sizes;
        j["round_traffic_bytes"] = run.round_traffic_bytes;
    }
    j["targets"] = nlohmann::json::array();
    for (const auto& t : run.targets) j["targets"].push_back(target_json(t));
    return j;
}

void write_file(const std::string& path, const std::string& content) {
    std::ofstream out(path, std::ios::binary);
    if (!out) throw ConfigError("cannot write " + path);
    out << content;
    if (!out) throw ConfigError("failed writing " + path);
}

}  // namespace

std::string report_json(const std::vector<RunResult>& runs, const ExperimentConfig& cfg) {
    nlohmann::json j;
    j["config"] = config_to_text(cfg);
    j["runs"] = nlohmann::json::array();
    for (const auto& run : runs) j["runs"].push_back(run_json(run));
    return j.dump(2) + "\n";
}

std::string comparison_csv(const std::vector<RunResult>& runs) {
    std::ostringstream out;
    out << "strategy,seed,accuracy,p_acc,traffic_bytes,inference_count\n";
    for (const auto& run : runs) {
        out << run.strategy << "," << run.seed << "," << num(run.mean_accuracy) << ","
            << num(run.mean_p_acc) << "," << run.traffic_bytes << "," << run.inference_count
            << "\n";
    }
    return out.str();
}

std::string history_csv(const TargetOutcome& target) {
    std::ostringstream out;
    out << "epoch,mixer_acc,alpha,label_loss,distill_loss,val_acc\n";
    for (const auto& r : target.history) {
        out << r.epoch << "," << num(r.mixer_acc) << "," << num(r.alpha) << ","
            << num(r.label_loss) << "," << num(r.distill_loss) << "," << num(r.val_acc) << "\n";
    }
    return out.str();
}

void write_outputs(const std::vector<RunResult>& runs, const ExperimentConfig& cfg,
                   const std::string& out_dir) {
    namespace fs = std::filesystem;
    fs::create_directories(out_dir);
    write_file((fs::path(out_dir) / "report.json").string(), report_json(runs, cfg));
    write_file((fs::path(out_dir) / "comparison.csv").string(), comparison_csv(runs));
    for (const auto& run : runs) {
        fs::path run_dir = fs::path(out_dir) / (run.strategy + "-seed" + std::to_string(run.seed));
        fs::create_directories(run_dir);
        for (const auto& t : run.targets) {
            auto name = "history_" + std::to_string(t.target_id) + ".csv";
            write_file((run_dir / name).string(), history_csv(t));
        }
    }
}

}  // namespace hat::expand
