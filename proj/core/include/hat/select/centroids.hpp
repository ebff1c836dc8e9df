#pragma once

#include <cstdint>
#include <map>
#include <vector>

#include "hat/nn/model.hpp"

namespace hat::select {

using nn::Vec;

// Per-class mean encoder output, in whatever feature space produced it.
struct ClassCentroidSet {
    std::map<int, Vec> centroids;  // class id -> centroid
    int feature_dim = 0;

    std::vector<int> covered_classes() const;
    // Shipped alongside a model transfer as float32.
    std::int64_t transfer_bytes() const {
        return static_cast<std::int64_t>(centroids.size()) * feature_dim * 4;
    }
};

// Centroids from already-computed encoder outputs and logits: pseudo-label
// each sample by arg-max, rank by softmax entropy ascending, keep the
// lowest-entropy floor(omega * K) samples (per class when per_class_rank),
// then average features per pseudo-class. Classes losing every sample are
// simply absent.
ClassCentroidSet centroids_from_outputs(const std::vector<Vec>& features,
                                        const std::vector<Vec>& logits,
                                        const std::vector<int>& label_space, double omega,
                                        bool per_class_rank);

// True-label path (no filter) when labels are given, pseudo-label path with
// the entropy filter otherwise.
ClassCentroidSet compute_centroids(const nn::NetModel& model, const std::vector<Vec>& data,
                                   const std::vector<int>* true_labels, double omega,
                                   bool per_class_rank = false);

// Mean cosine similarity over classes covered by both sets; no overlap
// scores -1, the floor of the similarity range.
double centroid_similarity(const ClassCentroidSet& a, const ClassCentroidSet& b);

}  // namespace hat::select
