#pragma once

#include <map>
#include <string>
#include <vector>

#include "hat/net/registry.hpp"
#include "hat/select/centroids.hpp"
#include "hat/select/stats.hpp"

namespace hat::select {

struct SelectionConfig {
    double eta = 0.25;   // coarse keep ratio, (0,1]
    double omega = 0.75; // entropy keep ratio, (0,1]
    int n_p = 3;         // final model count
    bool per_class_entropy_rank = false;
    // Build target-side centroids from labeled samples' true classes
    // instead of pseudo-labeling the whole train split.
    bool target_centroids_use_true_labels = false;

    void validate() const;
};

struct CoarseResult {
    std::vector<int> ids;  // rank order: similarity descending, ties by id
    std::map<int, double> scores;
};

struct CandidateScore {
    int domain_id = -1;
    double s_coarse = 0.0;
    double acc = 0.0;
    double s_fine = 0.0;
    double joint = 0.0;
};

struct SelectionOutcome {
    std::vector<int> coarse_ids;
    std::vector<int> final_ids;  // joint-score rank order
    std::vector<CandidateScore> scores;  // one per coarse candidate, rank order
    net::TrafficLedger ledger_snapshot;
};

std::string outcome_to_json(const SelectionOutcome& outcome);

// Stage one: the target announces its statistic vectors to every source,
// collects similarity replies, keeps the top ceil(eta * N) sources, and
// pulls their models (with riding centroids). All of it is metered.
CoarseResult coarse_select(const StatFeatureVector& target_features,
                           const net::Registry& registry, int target_id,
                           const SelectionConfig& cfg, net::TrafficLedger& ledger);

// Stage two: each pulled candidate is run over the target train split once
// (inference counted), scored by accuracy on the labeled samples times
// centroid similarity, and the top n_p survive.
SelectionOutcome joint_select(const net::Registry& registry, const CoarseResult& coarse,
                              const std::vector<Vec>& target_train,
                              const std::vector<int>& labeled_idx,
                              const std::vector<int>& labeled_classes,
                              const SelectionConfig& cfg, net::TrafficLedger& ledger);

}  // namespace hat::select
