#include "hat/expand/config.hpp"

#include <cctype>
#include <cstdio>
#include <fstream>
#include <sstream>

#include "hat/error.hpp"

namespace hat::expand {
namespace {

std::string trim(const std::string& s) {
    std::size_t a = 0;
    std::size_t b = s.size();
    while (a < b && std::isspace(static_cast<unsigned char>(s[a]))) ++a;
    while (b > a && std::isspace(static_cast<unsigned char>(s[b - 1]))) --b;
    return s.substr(a, b - a);
}

[[noreturn]] void fail(const std::string& origin, int line, const std::string& what) {
    throw ConfigError(origin + ":" + std::to_string(line) + ": " + what);
}

double parse_double(const std::string& origin, int line, const std::string& v) {
    try {
        std::size_t used = 0;
        double x = std::stod(v, &used);
        if (used != v.size()) fail(origin, line, "trailing characters in number '" + v + "'");
        return x;
    } catch (const ConfigError&) {
        throw;
    } catch (const std::exception&) {
        fail(origin, line, "expected a number, got '" + v + "'");
    }
}

int parse_int(const std::string& origin, int line, const std::string& v) {
    try {
        std::size_t used = 0;
        long x = std::stol(v, &used);
        if (used != v.size()) fail(origin, line, "trailing characters in integer '" + v + "'");
        return static_cast<int>(x);
    } catch (const ConfigError&) {
        throw;
    } catch (const std::exception&) {
        fail(origin, line, "expected an integer, got '" + v + "'");
    }
}

bool parse_bool(const std::string& origin, int line, const std::string& v) {
    if (v == "true" || v == "1" || v == "yes" || v == "on") return true;
    if (v == "false" || v == "0" || v == "no" || v == "off") return false;
    fail(origin, line, "expected a boolean, got '" + v + "'");
}

std::vector<int> parse_int_list(const std::string& origin, int line, const std::string& v) {
    std::vector<int> out;
    std::stringstream ss(v);
    std::string item;
    while (std::getline(ss, item, ',')) {
        item = trim(item);
        if (item.empty()) fail(origin, line, "empty element in list '" + v + "'");
        out.push_back(parse_int(origin, line, item));
    }
    if (out.empty()) fail(origin, line, "empty list");
    return out;
}

}  // namespace

void ExperimentConfig::validate() const {
    if (classes < 2) throw ConfigError("task.classes must be at least 2");
    if (input_dim < 2) throw ConfigError("task.input_dim must be at least 2");
    if (!(stddev > 0.0)) throw ConfigError("task.stddev must be positive");
    if (sources < 1) throw ConfigError("fleet.sources must be positive");
    if (samples < 10) throw ConfigError("fleet.samples must be at least 10");
    if (source_label_count < 2 || source_label_count > classes) {
        throw ConfigError("fleet.source_label_count must be in [2, classes]");
    }
    if (!(rotation >= 0.0)) throw ConfigError("fleet.rotation must be non-negative");
    if (!(translation_stddev >= 0.0)) throw ConfigError("fleet.translation must be non-negative");
    if (!(scale_min > 0.0) || !(scale_max >= scale_min)) {
        throw ConfigError("fleet.scale range must satisfy 0 < scale_min <= scale_max");
    }
    if (groups.size() < 2) throw ConfigError("fleet.groups needs at least two groups");
    for (int g : groups) {
        if (g < 1) throw ConfigError("fleet.groups entries must be positive");
    }
    if (source_epochs < 1) throw ConfigError("fleet.source_epochs must be positive");
    if (!(source_lr > 0.0)) throw ConfigError("fleet.source_lr must be positive");
    if (!(gamma > 0.0) || gamma > 1.0) throw ConfigError("target.gamma must be in (0, 1]");
    if (!(eta > 0.0) || eta > 1.0) throw ConfigError("select.eta must be in (0, 1]");
    if (!(omega > 0.0) || omega > 1.0) throw ConfigError("select.omega must be in (0, 1]");
    if (n_p < 1) throw ConfigError("select.np must be positive");
    if (epochs_target < 1) throw ConfigError("train.epochs_target must be positive");
    if (epochs_mixer < 0) throw ConfigError("train.epochs_mixer must be non-negative");
    if (!(ratio > 0.0)) throw ConfigError("train.ratio must be positive");
    if (!(lr_target > 0.0)) throw ConfigError("train.lr_target must be positive");
    if (!(lr_mixer > 0.0)) throw ConfigError("train.lr_mixer must be positive");
    if (!(m > 0.0)) throw ConfigError("inject.m must be positive");
    if (!b_auto && (b < 0.0 || b > 1.0)) throw ConfigError("inject.b must be in [0, 1] or auto");
    if (seeds < 1) throw ConfigError("run.seeds must be positive");
}

ExperimentConfig parse_config_text(const std::string& text, const std::string& origin) {
    ExperimentConfig cfg;
    std::istringstream in(text);
    std::string raw;
    std::string section;
    int line = 0;
    while (std::getline(in, raw)) {
        ++line;
        std::string s = trim(raw);
        if (s.empty() || s[0] == '#') continue;
        if (s.front() == '[') {
            if (s.back() != ']') fail(origin, line, "unterminated section header");
            section = trim(s.substr(1, s.size() - 2));
            if (section.empty()) fail(origin, line, "empty section name");
            continue;
        }
        std::size_t eq = s.find('=');
        if (eq == std::string::npos) fail(origin, line, "expected 'key = value'");
        std::string key = trim(s.substr(0, eq));
        std::string value = trim(s.substr(eq + 1));
        if (key.empty()) fail(origin, line, "empty key");
        if (value.empty()) fail(origin, line, "empty value for key '" + key + "'");
        std::string full = section.empty() ? key : section + "." + key;

        if (full == "task.classes") cfg.classes = parse_int(origin, line, value);
        else if (full == "task.input_dim") cfg.input_dim = parse_int(origin, line, value);
        else if (full == "task.stddev") cfg.stddev = parse_double(origin, line, value);
        else if (full == "fleet.sources") cfg.sources = parse_int(origin, line, value);
        else if (full == "fleet.samples") cfg.samples = parse_int(origin, line, value);
        else if (full == "fleet.source_label_count") cfg.source_label_count = parse_int(origin, line, value);
        else if (full == "fleet.rotation") cfg.rotation = parse_double(origin, line, value);
        else if (full == "fleet.translation") cfg.translation_stddev = parse_double(origin, line, value);
        else if (full == "fleet.scale_min") cfg.scale_min = parse_double(origin, line, value);
        else if (full == "fleet.scale_max") cfg.scale_max = parse_double(origin, line, value);
        else if (full == "fleet.groups") cfg.groups = parse_int_list(origin, line, value);
        else if (full == "fleet.source_epochs") cfg.source_epochs = parse_int(origin, line, value);
        else if (full == "fleet.source_lr") cfg.source_lr = parse_double(origin, line, value);
        else if (full == "target.gamma") cfg.gamma = parse_double(origin, line, value);
        else if (full == "select.eta") cfg.eta = parse_double(origin, line, value);
        else if (full == "select.omega") cfg.omega = parse_double(origin, line, value);
        else if (full == "select.np") cfg.n_p = parse_int(origin, line, value);
        else if (full == "select.per_class_rank") cfg.per_class_rank = parse_bool(origin, line, value);
        else if (full == "select.true_label_centroids") cfg.true_label_centroids = parse_bool(origin, line, value);
        else if (full == "train.epochs_target") cfg.epochs_target = parse_int(origin, line, value);
        else if (full == "train.epochs_mixer") cfg.epochs_mixer = parse_int(origin, line, value);
        else if (full == "train.ratio") cfg.ratio = parse_double(origin, line, value);
        else if (full == "train.lr_target") cfg.lr_target = parse_double(origin, line, value);
        else if (full == "train.lr_mixer") cfg.lr_mixer = parse_double(origin, line, value);
        else if (full == "inject.m") cfg.m = parse_double(origin, line, value);
        else if (full == "inject.b") {
            if (value == "auto") {
                cfg.b_auto = true;
                cfg.b = -1.0;
            } else {
                cfg.b_auto = false;
                cfg.b = parse_double(origin, line, value);
            }
        } else if (full == "inject.kd_always") cfg.kd_always = parse_bool(origin, line, value);
        else if (full == "inject.kd_full_refresh") cfg.kd_full_refresh = parse_bool(origin, line, value);
        else if (full == "inject.distill_labeled") cfg.distill_labeled = parse_bool(origin, line, value);
        else if (full == "run.strategy") cfg.strategy = value;
        else if (full == "run.seeds") cfg.seeds = parse_int(origin, line, value);
        else fail(origin, line, "unknown key '" + full + "'");
    }
    cfg.validate();
    return cfg;
}

ExperimentConfig load_config(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw ConfigError("cannot open config file " + path);
    std::ostringstream buf;
    buf << in.rdbuf();
    return parse_config_text(buf.str(), path);
}

namespace {

std::string num(double x) {
    char buf[64];
    std::snprintf(buf, sizeof(buf), "%.17g", x);
    return buf;
}

std::string num(int x) { return std::to_string(x); }

std::string yesno(bool b) { return b ? "true" : "false"; }

}  // namespace

std::string config_to_text(const ExperimentConfig& cfg) {
    std::ostringstream out;
    out << "[task]\n"
        << "classes = " << num(cfg.classes) << "\n"
        << "input_dim = " << num(cfg.input_dim) << "\n"
        << "stddev = " << num(cfg.stddev) << "\n\n";
    out << "[fleet]\n"
        << "sources = " << num(cfg.sources) << "\n"
        << "samples = " << num(cfg.samples) << "\n"
        << "source_label_count = " << num(cfg.source_label_count) << "\n"
        << "rotation = " << num(cfg.rotation) << "\n"
        << "translation = " << num(cfg.translation_stddev) << "\n"
        << "scale_min = " << num(cfg.scale_min) << "\n"
        << "scale_max = " << num(cfg.scale_max) << "\n"
        << "groups = ";
    for (std::size_t i = 0; i < cfg.groups.size(); ++i) {
        if (i) out << ",";
        out << cfg.groups[i];
    }
    out << "\n"
        << "source_epochs = " << num(cfg.source_epochs) << "\n"
        << "source_lr = " << num(cfg.source_lr) << "\n\n";
    out << "[target]\n"
        << "gamma = " << num(cfg.gamma) << "\n\n";
    out << "[select]\n"
        << "eta = " << num(cfg.eta) << "\n"
        << "omega = " << num(cfg.omega) << "\n"
        << "np = " << num(cfg.n_p) << "\n"
        << "per_class_rank = " << yesno(cfg.per_class_rank) << "\n"
        << "true_label_centroids = " << yesno(cfg.true_label_centroids) << "\n\n";
    out << "[train]\n"
        << "epochs_target = " << num(cfg.epochs_target) << "\n"
        << "epochs_mixer = " << num(cfg.epochs_mixer) << "\n"
        << "ratio = " << num(cfg.ratio) << "\n"
        << "lr_target = " << num(cfg.lr_target) << "\n"
        << "lr_mixer = " << num(cfg.lr_mixer) << "\n\n";
    out << "[inject]\n"
        << "m = " << num(cfg.m) << "\n"
        << "b = " << (cfg.b_auto ? std::string("auto") : num(cfg.b)) << "\n"
        << "kd_always = " << yesno(cfg.kd_always) << "\n"
        << "kd_full_refresh = " << yesno(cfg.kd_full_refresh) << "\n"
        << "distill_labeled = " << yesno(cfg.distill_labeled) << "\n\n";
    out << "[run]\n"
        << "strategy = " << cfg.strategy << "\n"
        << "seeds = " << num(cfg.seeds) << "\n";
    return out.str();
}

}  // namespace hat::expand
