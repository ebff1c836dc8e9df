#include "hat/synth/domain.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <fstream>
#include <sstream>
#include <unordered_set>

#include "hat/error.hpp"
#include "hat/rng.hpp"

namespace hat::synth {
namespace {

struct PlaneRotation {
    Vec u;
    Vec v;
    double angle = 0.0;
};

double dot(const Vec& a, const Vec& b) {
    double s = 0.0;
    for (std::size_t i = 0; i < a.size(); ++i) s += a[i] * b[i];
    return s;
}

PlaneRotation make_plane(std::uint64_t plane_seed, double angle, int dim) {
    rng::Stream stream(plane_seed, "rotation-plane");
    PlaneRotation plane;
    plane.angle = angle;
    std::size_t d = static_cast<std::size_t>(dim);
    for (int attempt = 0; attempt < 64; ++attempt) {
        plane.u.assign(d, 0.0);
        for (double& x : plane.u) x = stream.normal(0.0, 1.0);
        double un = std::sqrt(dot(plane.u, plane.u));
        if (un < 1e-9) continue;
        for (double& x : plane.u) x /= un;
        plane.v.assign(d, 0.0);
        for (double& x : plane.v) x = stream.normal(0.0, 1.0);
        double proj = dot(plane.v, plane.u);
        for (std::size_t i = 0; i < d; ++i) plane.v[i] -= proj * plane.u[i];
        double vn = std::sqrt(dot(plane.v, plane.v));
        if (vn < 1e-9) continue;
        for (double& x : plane.v) x /= vn;
        return plane;
    }
    throw NumericError("degenerate rotation plane draws");
}

Vec rotate_in_plane(const PlaneRotation& plane, const Vec& x) {
    double a = dot(x, plane.u);
    double b = dot(x, plane.v);
    double c = std::cos(plane.angle);
    double s = std::sin(plane.angle);
    Vec out = x;
    for (std::size_t i = 0; i < x.size(); ++i) {
        out[i] += (c - 1.0) * (a * plane.u[i] + b * plane.v[i]) +
                  s * (a * plane.v[i] - b * plane.u[i]);
    }
    return out;
}

void validate_shift(const DomainShiftSpec& shift, int num_classes, int input_dim) {
    if (shift.label_subset.size() < 2) {
        throw DimensionError("label subset needs at least 2 classes");
    }
    std::unordered_set<int> seen;
    for (int c : shift.label_subset) {
        if (c < 0 || c >= num_classes) throw DimensionError("label subset id out of range");
        if (!seen.insert(c).second) throw DimensionError("duplicate class in label subset");
    }
    if (!(shift.scale > 0.0)) throw NumericError("shift scale must be positive");
    if (!shift.translation.empty() &&
        shift.translation.size() != static_cast<std::size_t>(input_dim)) {
        throw DimensionError("translation dimension mismatch");
    }
}

}  // namespace

Vec apply_shift(const DomainShiftSpec& shift, const Vec& x, int input_dim) {
    if (x.size() != static_cast<std::size_t>(input_dim)) {
        throw DimensionError("point dimension mismatch");
    }
    PlaneRotation plane = make_plane(shift.rotation_plane_seed, shift.rotation_angle, input_dim);
    Vec out = rotate_in_plane(plane, x);
    for (double& v : out) v *= shift.scale;
    if (!shift.translation.empty()) {
        for (std::size_t i = 0; i < out.size(); ++i) out[i] += shift.translation[i];
    }
    return out;
}

DomainDataset::DomainDataset(std::vector<Vec> inputs,
                             std::vector<std::optional<int>> visible_labels,
                             std::vector<std::optional<int>> hidden_labels,
                             std::vector<int> label_space, double gamma,
                             std::vector<int> train_idx, std::vector<int> val_idx,
                             std::vector<int> test_idx)
    : inputs_(std::move(inputs)),
      visible_labels_(std::move(visible_labels)),
      hidden_labels_(std::move(hidden_labels)),
      label_space_(std::move(label_space)),
      gamma_(gamma),
      train_idx_(std::move(train_idx)),
      val_idx_(std::move(val_idx)),
      test_idx_(std::move(test_idx)) {
    std::size_t n = inputs_.size();
    if (n == 0) throw DimensionError("empty dataset");
    if (visible_labels_.size() != n || hidden_labels_.size() != n) {
        throw DimensionError("label array length mismatch");
    }
    if (label_space_.empty()) throw DimensionError("empty label space");
    std::unordered_set<int> space(label_space_.begin(), label_space_.end());
    if (space.size() != label_space_.size()) throw DimensionError("duplicate label space entry");
    std::size_t dim = inputs_.front().size();
    if (dim == 0) throw DimensionError("zero-dimensional sample");
    for (const Vec& x : inputs_) {
        if (x.size() != dim) throw DimensionError("ragged sample dimensions");
    }
    for (std::size_t i = 0; i < n; ++i) {
        if (visible_labels_[i]) {
            if (!space.count(*visible_labels_[i])) {
                throw DimensionError("visible label outside label space");
            }
            if (!hidden_labels_[i] || *hidden_labels_[i] != *visible_labels_[i]) {
                throw DimensionError("visible label contradicts ground truth");
            }
        }
        if (hidden_labels_[i] && !space.count(*hidden_labels_[i])) {
            throw DimensionError("ground-truth label outside label space");
        }
    }
    if (!(gamma_ > 0.0) || gamma_ > 1.0) throw NumericError("gamma must be in (0,1]");
    std::vector<char> seen(n, 0);
    auto mark = [&](const std::vector<int>& idx) {
        for (int i : idx) {
            if (i < 0 || static_cast<std::size_t>(i) >= n) {
                throw DimensionError("split index out of range");
            }
            if (seen[static_cast<std::size_t>(i)]) throw DimensionError("overlapping splits");
            seen[static_cast<std::size_t>(i)] = 1;
        }
    };
    mark(train_idx_);
    mark(val_idx_);
    mark(test_idx_);
    for (char s : seen) {
        if (!s) throw DimensionError("splits do not cover the dataset");
    }
    std::unordered_set<int> train_set(train_idx_.begin(), train_idx_.end());
    for (std::size_t i = 0; i < n; ++i) {
        if (visible_labels_[i] && !train_set.count(static_cast<int>(i))) {
            throw DimensionError("visible label outside the train split");
        }
    }
}

int DomainDataset::input_dim() const { return static_cast<int>(inputs_.front().size()); }

std::vector<int> DomainDataset::labeled_train_indices() const {
    std::vector<int> out;
    for (int i : train_idx_) {
        if (visible_labels_[static_cast<std::size_t>(i)]) out.push_back(i);
    }
    return out;
}

std::vector<int> DomainDataset::unlabeled_train_indices() const {
    std::vector<int> out;
    for (int i : train_idx_) {
        if (!visible_labels_[static_cast<std::size_t>(i)]) out.push_back(i);
    }
    return out;
}

int EvalView::label(int i) const {
    const auto& h = data_->hidden_labels_.at(static_cast<std::size_t>(i));
    if (!h) throw ProtocolError("ground truth unavailable for sample");
    return *h;
}

std::vector<int> EvalView::labels(const std::vector<int>& indices) const {
    std::vector<int> out;
    out.reserve(indices.size());
    for (int i : indices) out.push_back(label(i));
    return out;
}

DomainDataset sample_domain(const GlobalTaskSpec& task, const DomainShiftSpec& shift, int n,
                            double gamma, std::uint64_t seed) {
    if (n < 10) throw DimensionError("need at least 10 samples per domain");
    if (!(gamma > 0.0) || gamma > 1.0) throw NumericError("gamma must be in (0,1]");
    validate_shift(shift, task.num_classes, task.input_dim);
    int k = static_cast<int>(shift.label_subset.size());
    if (n < k) throw DimensionError("n too small to cover the label subset");

    PlaneRotation plane =
        make_plane(shift.rotation_plane_seed, shift.rotation_angle, task.input_dim);
    std::vector<Vec> shifted;
    shifted.reserve(static_cast<std::size_t>(k));
    for (int c : shift.label_subset) {
        Vec p = rotate_in_plane(plane, task.class_prototypes[static_cast<std::size_t>(c)]);
        for (double& v : p) v *= shift.scale;
        if (!shift.translation.empty()) {
            for (std::size_t i = 0; i < p.size(); ++i) p[i] += shift.translation[i];
        }
        shifted.push_back(std::move(p));
    }

    rng::Stream noise(seed, "noise");
    std::vector<Vec> xs;
    std::vector<int> truth;
    xs.reserve(static_cast<std::size_t>(n));
    truth.reserve(static_cast<std::size_t>(n));
    for (int ci = 0; ci < k; ++ci) {
        int count = n / k + (ci < n % k ? 1 : 0);
        for (int s = 0; s < count; ++s) {
            Vec x = shifted[static_cast<std::size_t>(ci)];
            for (double& v : x) v += noise.normal(0.0, task.within_class_stddev);
            xs.push_back(std::move(x));
            truth.push_back(shift.label_subset[static_cast<std::size_t>(ci)]);
        }
    }

    std::vector<int> order(static_cast<std::size_t>(n));
    for (int i = 0; i < n; ++i) order[static_cast<std::size_t>(i)] = i;
    rng::Stream order_stream(seed, "order");
    order_stream.shuffle(order);
    std::vector<Vec> shuffled_xs(static_cast<std::size_t>(n));
    std::vector<std::optional<int>> hidden(static_cast<std::size_t>(n));
    for (int i = 0; i < n; ++i) {
        shuffled_xs[static_cast<std::size_t>(i)] =
            std::move(xs[static_cast<std::size_t>(order[static_cast<std::size_t>(i)])]);
        hidden[static_cast<std::size_t>(i)] = truth[static_cast<std::size_t>(order[i])];
    }

    int train_n = static_cast<int>(std::llround(0.6 * n));
    int val_n = static_cast<int>(std::llround(0.2 * n));
    int test_n = n - train_n - val_n;
    if (train_n < 1 || val_n < 1 || test_n < 1) {
        throw DimensionError("n too small to populate all splits");
    }
    std::vector<int> train_idx, val_idx, test_idx;
    for (int i = 0; i < train_n; ++i) train_idx.push_back(i);
    for (int i = train_n; i < train_n + val_n; ++i) val_idx.push_back(i);
    for (int i = train_n + val_n; i < n; ++i) test_idx.push_back(i);

    int labeled_n = static_cast<int>(std::llround(gamma * train_n));
    rng::Stream label_stream(seed, "labels");
    std::vector<int> picks = label_stream.sample_without_replacement(train_n, labeled_n);
    std::vector<std::optional<int>> visible(static_cast<std::size_t>(n));
    for (int pos : picks) {
        int idx = train_idx[static_cast<std::size_t>(pos)];
        visible[static_cast<std::size_t>(idx)] = hidden[static_cast<std::size_t>(idx)];
    }

    std::vector<int> space = shift.label_subset;
    std::sort(space.begin(), space.end());
    return DomainDataset(std::move(shuffled_xs), std::move(visible), std::move(hidden),
                         std::move(space), gamma, std::move(train_idx), std::move(val_idx),
                         std::move(test_idx));
}

std::vector<int> make_group_layout(const std::vector<int>& domain_counts) {
    if (domain_counts.empty()) throw DimensionError("empty group layout");
    std::vector<int> group_of;
    for (std::size_t g = 0; g < domain_counts.size(); ++g) {
        if (domain_counts[g] <= 0) throw DimensionError("group counts must be positive");
        for (int i = 0; i < domain_counts[g]; ++i) group_of.push_back(static_cast<int>(g));
    }
    return group_of;
}

void export_csv(const DomainDataset& data, const std::string& path) {
    std::ofstream out(path);
    if (!out) throw ProtocolError("cannot open " + path + " for writing");
    out << "split,label";
    for (int d = 0; d < data.input_dim(); ++d) out << ",f" << d;
    out << "\n";
    std::vector<std::string> split_of(static_cast<std::size_t>(data.size()));
    for (int i : data.train_indices()) split_of[static_cast<std::size_t>(i)] = "train";
    for (int i : data.val_indices()) split_of[static_cast<std::size_t>(i)] = "val";
    for (int i : data.test_indices()) split_of[static_cast<std::size_t>(i)] = "test";
    char buf[64];
    for (int i = 0; i < data.size(); ++i) {
        out << split_of[static_cast<std::size_t>(i)] << ",";
        if (auto y = data.visible_label(i)) out << *y;
        for (double v : data.input(i)) {
            std::snprintf(buf, sizeof(buf), "%.17g", v);
            out << "," << buf;
        }
        out << "\n";
    }
    if (!out) throw ProtocolError("write failed for " + path);
}

DomainDataset import_csv(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw ProtocolError("cannot open " + path);
    std::string line;
    std::vector<Vec> xs;
    std::vector<std::optional<int>> visible;
    std::vector<int> train_idx, val_idx, test_idx;
    int row = 0;
    while (std::getline(in, line)) {
        if (line.empty()) continue;
        std::vector<std::string> cells;
        std::stringstream ss(line);
        std::string cell;
        while (std::getline(ss, cell, ',')) cells.push_back(cell);
        if (!line.empty() && line.back() == ',') cells.push_back("");
        if (cells[0] == "split") continue;
        if (cells.size() < 3) throw ProtocolError("malformed dataset row: " + line);
        if (cells[0] == "train") {
            train_idx.push_back(row);
        } else if (cells[0] == "val") {
            val_idx.push_back(row);
        } else if (cells[0] == "test") {
            test_idx.push_back(row);
        } else {
            throw ProtocolError("unknown split name: " + cells[0]);
        }
        if (cells[1].empty()) {
            visible.emplace_back(std::nullopt);
        } else {
            visible.emplace_back(std::stoi(cells[1]));
        }
        Vec x;
        for (std::size_t c = 2; c < cells.size(); ++c) x.push_back(std::stod(cells[c]));
        xs.push_back(std::move(x));
        ++row;
    }
    if (xs.empty()) throw ProtocolError("empty dataset file");
    std::vector<int> space;
    for (const auto& y : visible) {
        if (y && std::find(space.begin(), space.end(), *y) == space.end()) space.push_back(*y);
    }
    std::sort(space.begin(), space.end());
    if (space.empty()) throw ProtocolError("dataset file has no labeled samples");
    int labeled = 0;
    for (const auto& y : visible) {
        if (y) ++labeled;
    }
    double gamma = static_cast<double>(labeled) / static_cast<double>(train_idx.size());
    std::vector<std::optional<int>> hidden = visible;
    return DomainDataset(std::move(xs), std::move(visible), std::move(hidden), std::move(space),
                         gamma, std::move(train_idx), std::move(val_idx), std::move(test_idx));
}

}  // namespace hat::synth
