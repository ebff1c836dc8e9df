#pragma once

#include <cstdint>
#include <optional>
#include <string>
#include <vector>

#include "hat/synth/task.hpp"

namespace hat::synth {

// Covariate shift applied to the shared prototypes: rotation by
// rotation_angle inside a seeded random 2-plane, then scaling, then
// translation. label_subset is the domain's partial label space.
struct DomainShiftSpec {
    double rotation_angle = 0.0;
    std::uint64_t rotation_plane_seed = 0;
    Vec translation;
    double scale = 1.0;
    std::vector<int> label_subset;
};

// Applies the shift to one point.
Vec apply_shift(const DomainShiftSpec& shift, const Vec& x, int input_dim);

class EvalView;

// One domain's data. Ground-truth labels of unlabeled samples are hidden
// behind EvalView so learning code cannot reach them.
class DomainDataset {
  public:
    DomainDataset(std::vector<Vec> inputs, std::vector<std::optional<int>> visible_labels,
                  std::vector<std::optional<int>> hidden_labels, std::vector<int> label_space,
                  double gamma, std::vector<int> train_idx, std::vector<int> val_idx,
                  std::vector<int> test_idx);

    int size() const { return static_cast<int>(inputs_.size()); }
    int input_dim() const;
    const Vec& input(int i) const { return inputs_.at(static_cast<std::size_t>(i)); }
    // Label as the learner sees it: present only for labeled train samples.
    std::optional<int> visible_label(int i) const {
        return visible_labels_.at(static_cast<std::size_t>(i));
    }

    const std::vector<int>& label_space() const { return label_space_; }
    double gamma() const { return gamma_; }

    const std::vector<int>& train_indices() const { return train_idx_; }
    const std::vector<int>& val_indices() const { return val_idx_; }
    const std::vector<int>& test_indices() const { return test_idx_; }
    std::vector<int> labeled_train_indices() const;
    std::vector<int> unlabeled_train_indices() const;

  private:
    friend class EvalView;
    std::vector<Vec> inputs_;
    std::vector<std::optional<int>> visible_labels_;
    std::vector<std::optional<int>> hidden_labels_;
    std::vector<int> label_space_;
    double gamma_;
    std::vector<int> train_idx_;
    std::vector<int> val_idx_;
    std::vector<int> test_idx_;
};

// Evaluation-side window onto ground truth. Learning code never constructs
// one; imported datasets may lack truth, in which case label() throws.
class EvalView {
  public:
    explicit EvalView(const DomainDataset& data) : data_(&data) {}

    int label(int i) const;
    std::vector<int> labels(const std::vector<int>& indices) const;

  private:
    const DomainDataset* data_;
};

// Gaussian samples around the shifted prototypes of shift.label_subset,
// balanced per class, split 60/20/20 into train/val/test, with exactly
// round(gamma * |train|) labeled train samples.
DomainDataset sample_domain(const GlobalTaskSpec& task, const DomainShiftSpec& shift, int n,
                            double gamma, std::uint64_t seed);

// Contiguous group ids, one per domain: counts [40,20,...] give domains
// 0..39 group 0, 40..59 group 1, and so on.
std::vector<int> make_group_layout(const std::vector<int>& domain_counts);

// Debugging export: one row per sample as "split,label-or-blank,features...".
// Import rebuilds the label space from the visible labels and gamma from the
// labeled fraction; ground truth of unlabeled samples is not representable,
// so evaluation through EvalView refuses on such datasets.
void export_csv(const DomainDataset& data, const std::string& path);
DomainDataset import_csv(const std::string& path);

}  // namespace hat::synth
