#pragma once

#include <cstdint>
#include <map>
#include <vector>

#include "hat/net/ledger.hpp"
#include "hat/nn/model.hpp"
#include "hat/select/centroids.hpp"
#include "hat/select/stats.hpp"
#include "hat/synth/domain.hpp"

namespace hat::net {

// A source domain as the network sees it: data, a trained frozen model,
// and the statistics it is willing to announce. Features and centroids are
// computed source-side once, before registration.
struct SourceDomainHandle {
    int domain_id = -1;
    synth::DomainDataset dataset;
    nn::NetModel model;
    select::StatFeatureVector features;
    select::ClassCentroidSet centroids;
    // Accuracy of the frozen model on the source's own validation split,
    // reported alongside fine-selection scores.
    double self_accuracy = 0.0;
};

struct ProtocolMessage {
    MessageKind kind = MessageKind::kFeatureAnnounce;
    std::int64_t payload_bytes = 0;
    int sender = -1;
    int receiver = -1;
};

// In-process stand-in for the network: knows every reachable domain and
// meters every message through a ledger. Delivery is synchronous and
// lossless; only volume is modeled.
class Registry {
  public:
    // Fails on duplicate ids or a model that is not fully frozen.
    void register_source(SourceDomainHandle handle);
    // Target-side domains are plain endpoints with no published model.
    void register_endpoint(int id);

    int size() const { return static_cast<int>(sources_.size()); }
    std::vector<int> source_ids() const;  // ascending
    bool has_source(int id) const;
    const SourceDomainHandle& source(int id) const;

    // Validates endpoints and payload, meters the ledger, and returns the
    // delivered byte count.
    std::int64_t send(const ProtocolMessage& msg, TrafficLedger& ledger) const;

  private:
    bool has_endpoint(int id) const;
    std::map<int, SourceDomainHandle> sources_;
    std::vector<int> endpoints_;
};

}  // namespace hat::net
