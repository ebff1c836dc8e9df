#pragma once

#include <cstdint>
#include <string>
#include <vector>

namespace hat::expand {

// Everything an experiment run needs, read from a flat `key = value` file
// with [section] headers. Unset keys keep these defaults.
struct ExperimentConfig {
    // [task]
    int classes = 5;
    int input_dim = 8;
    double stddev = 0.4;

    // [fleet]
    int sources = 10;
    int samples = 300;
    int source_label_count = 3;
    double rotation = 0.5;            // max |angle| in radians
    double translation_stddev = 0.3;
    double scale_min = 0.9;
    double scale_max = 1.1;
    std::vector<int> groups = {8, 4, 4, 4, 4};  // multi-round layout
    int source_epochs = 150;
    double source_lr = 0.1;

    // [target]
    double gamma = 0.1;

    // [select]
    double eta = 0.25;
    double omega = 0.75;
    int n_p = 3;
    bool per_class_rank = false;
    bool true_label_centroids = false;

    // [train]
    int epochs_target = 200;
    int epochs_mixer = 100;
    double ratio = 1.0;
    double lr_target = 0.05;
    double lr_mixer = 0.05;

    // [inject]
    double m = 2.0;
    double b = -1.0;  // < 0 means auto: highest selected-model accuracy + 0.02
    bool b_auto = true;
    bool kd_always = false;
    bool kd_full_refresh = false;
    bool distill_labeled = false;

    // [run]
    std::string strategy = "hat";
    int seeds = 1;

    void validate() const;
};

ExperimentConfig parse_config_text(const std::string& text, const std::string& origin);
ExperimentConfig load_config(const std::string& path);

// Round-trippable echo of every setting, in the file format itself.
std::string config_to_text(const ExperimentConfig& cfg);

}  // namespace hat::expand
