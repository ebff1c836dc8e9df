#include "hat/select/protocol.hpp"

#include <algorithm>
#include <cmath>
#include <json.hpp>

#include "hat/error.hpp"
#include "hat/nn/ops.hpp"

namespace hat::select {

void SelectionConfig::validate() const {
    if (!(eta > 0.0) || eta > 1.0) throw NumericError("eta must be in (0,1]");
    if (!(omega > 0.0) || omega > 1.0) throw NumericError("omega must be in (0,1]");
    if (n_p < 1) throw NumericError("n_p must be at least 1");
}

std::string outcome_to_json(const SelectionOutcome& outcome) {
    nlohmann::json cands = nlohmann::json::array();
    for (const CandidateScore& c : outcome.scores) {
        cands.push_back({{"id", c.domain_id},
                         {"s_coarse", c.s_coarse},
                         {"acc", c.acc},
                         {"s_fine", c.s_fine},
                         {"joint", c.joint}});
    }
    nlohmann::json doc{{"coarse_ids", outcome.coarse_ids},
                       {"final_ids", outcome.final_ids},
                       {"candidates", cands},
                       {"ledger", nlohmann::json::parse(outcome.ledger_snapshot.to_json())}};
    return doc.dump(2);
}

CoarseResult coarse_select(const StatFeatureVector& target_features,
                           const net::Registry& registry, int target_id,
                           const SelectionConfig& cfg, net::TrafficLedger& ledger) {
    cfg.validate();
    std::vector<int> ids = registry.source_ids();
    if (ids.empty()) throw ProtocolError("no registered sources to select from");

    CoarseResult result;
    for (int id : ids) {
        const net::SourceDomainHandle& src = registry.source(id);
        registry.send({net::MessageKind::kFeatureAnnounce, target_features.announce_bytes(),
                       target_id, id},
                      ledger);
        double s = feature_similarity(src.features, target_features);
        registry.send({net::MessageKind::kSimilarityReply, 8, id, target_id}, ledger);
        result.scores[id] = s;
    }

    std::size_t keep = static_cast<std::size_t>(
        std::ceil(cfg.eta * static_cast<double>(ids.size()) - 1e-9));
    keep = std::max<std::size_t>(1, std::min(keep, ids.size()));

    std::vector<int> order = ids;
    std::sort(order.begin(), order.end(), [&](int a, int b) {
        if (result.scores[a] != result.scores[b]) return result.scores[a] > result.scores[b];
        return a < b;
    });
    order.resize(keep);
    result.ids = order;

    for (int id : result.ids) {
        registry.send({net::MessageKind::kModelInquiry, 8, target_id, id}, ledger);
        const net::SourceDomainHandle& src = registry.source(id);
        std::int64_t payload = src.model.byte_size() + src.centroids.transfer_bytes();
        registry.send({net::MessageKind::kModelTransfer, payload, id, target_id}, ledger);
    }
    return result;
}

SelectionOutcome joint_select(const net::Registry& registry, const CoarseResult& coarse,
                              const std::vector<Vec>& target_train,
                              const std::vector<int>& labeled_idx,
                              const std::vector<int>& labeled_classes,
                              const SelectionConfig& cfg, net::TrafficLedger& ledger) {
    cfg.validate();
    if (coarse.ids.empty()) throw ProtocolError("no candidates to select from");
    if (labeled_idx.empty()) throw ProtocolError("no labeled target data");
    if (labeled_idx.size() != labeled_classes.size()) {
        throw DimensionError("labeled index/class length mismatch");
    }
    for (int idx : labeled_idx) {
        if (idx < 0 || static_cast<std::size_t>(idx) >= target_train.size()) {
            throw DimensionError("labeled index out of range");
        }
    }

    std::vector<CandidateScore> scored;
    scored.reserve(coarse.ids.size());
    for (int id : coarse.ids) {
        const net::SourceDomainHandle& src = registry.source(id);
        const nn::NetModel& model = src.model;

        std::vector<Vec> features;
        std::vector<Vec> logits;
        features.reserve(target_train.size());
        logits.reserve(target_train.size());
        for (const Vec& x : target_train) {
            features.push_back(model.encode(x));
            logits.push_back(model.classify(features.back()));
        }
        ledger.count_inference(static_cast<std::int64_t>(target_train.size()));

        int hits = 0;
        for (std::size_t k = 0; k < labeled_idx.size(); ++k) {
            const Vec& z = logits[static_cast<std::size_t>(labeled_idx[k])];
            std::size_t best = 0;
            for (std::size_t j = 1; j < z.size(); ++j) {
                if (z[j] > z[best]) best = j;
            }
            if (model.label_space()[best] == labeled_classes[k]) ++hits;
        }
        double acc = static_cast<double>(hits) / static_cast<double>(labeled_idx.size());

        ClassCentroidSet target_centroids;
        if (cfg.target_centroids_use_true_labels) {
            std::map<int, std::pair<Vec, int>> sums;
            for (std::size_t k = 0; k < labeled_idx.size(); ++k) {
                const Vec& h = features[static_cast<std::size_t>(labeled_idx[k])];
                auto it = sums.try_emplace(labeled_classes[k],
                                           std::make_pair(Vec(h.size(), 0.0), 0))
                              .first;
                for (std::size_t j = 0; j < h.size(); ++j) it->second.first[j] += h[j];
                ++it->second.second;
            }
            target_centroids.feature_dim = model.feature_dim();
            for (auto& [cls, acc_count] : sums) {
                for (double& v : acc_count.first) {
                    v /= static_cast<double>(acc_count.second);
                }
                target_centroids.centroids[cls] = std::move(acc_count.first);
            }
        } else {
            target_centroids = centroids_from_outputs(features, logits, model.label_space(),
                                                      cfg.omega, cfg.per_class_entropy_rank);
        }
        double s_fine = centroid_similarity(target_centroids, src.centroids);

        CandidateScore cs;
        cs.domain_id = id;
        auto it = coarse.scores.find(id);
        cs.s_coarse = it == coarse.scores.end() ? 0.0 : it->second;
        cs.acc = acc;
        cs.s_fine = s_fine;
        cs.joint = s_fine * acc;
        scored.push_back(cs);
    }

    std::sort(scored.begin(), scored.end(), [](const CandidateScore& a, const CandidateScore& b) {
        if (a.joint != b.joint) return a.joint > b.joint;
        return a.domain_id < b.domain_id;
    });

    SelectionOutcome outcome;
    outcome.coarse_ids = coarse.ids;
    outcome.scores = scored;
    std::size_t take = std::min<std::size_t>(static_cast<std::size_t>(cfg.n_p), scored.size());
    for (std::size_t i = 0; i < take; ++i) outcome.final_ids.push_back(scored[i].domain_id);
    outcome.ledger_snapshot = ledger;
    return outcome;
}

}  // namespace hat::select
