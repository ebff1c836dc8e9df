#include "hat/net/registry.hpp"

#include <algorithm>

#include "hat/error.hpp"

namespace hat::net {

void Registry::register_source(SourceDomainHandle handle) {
    if (handle.domain_id < 0) throw ProtocolError("source id must be non-negative");
    if (has_source(handle.domain_id)) throw ProtocolError("duplicate domain id");
    // a plain endpoint may be promoted to source duty under its own id
    auto it = std::find(endpoints_.begin(), endpoints_.end(), handle.domain_id);
    if (it != endpoints_.end()) endpoints_.erase(it);
    if (!handle.model.encoder_frozen() || !handle.model.classifier().frozen()) {
        throw ProtocolError("source model must be frozen before registration");
    }
    if (handle.features.dim() != handle.dataset.input_dim()) {
        throw ProtocolError("announced features do not match the dataset dimension");
    }
    if (handle.centroids.feature_dim != handle.model.feature_dim()) {
        throw ProtocolError("shipped centroids do not match the model feature dim");
    }
    sources_.emplace(handle.domain_id, std::move(handle));
}

void Registry::register_endpoint(int id) {
    if (id < 0) throw ProtocolError("endpoint id must be non-negative");
    if (has_endpoint(id)) throw ProtocolError("duplicate domain id");
    endpoints_.push_back(id);
}

std::vector<int> Registry::source_ids() const {
    std::vector<int> ids;
    ids.reserve(sources_.size());
    for (const auto& [id, handle] : sources_) ids.push_back(id);
    return ids;
}

bool Registry::has_source(int id) const { return sources_.count(id) > 0; }

const SourceDomainHandle& Registry::source(int id) const {
    auto it = sources_.find(id);
    if (it == sources_.end()) throw ProtocolError("unknown source domain");
    return it->second;
}

bool Registry::has_endpoint(int id) const {
    return has_source(id) ||
           std::find(endpoints_.begin(), endpoints_.end(), id) != endpoints_.end();
}

std::int64_t Registry::send(const ProtocolMessage& msg, TrafficLedger& ledger) const {
    if (!has_endpoint(msg.sender)) throw ProtocolError("unknown sender");
    if (!has_endpoint(msg.receiver)) throw ProtocolError("unknown receiver");
    if (msg.payload_bytes <= 0) throw ProtocolError("message payload must be positive");
    ledger.add(msg.kind, msg.payload_bytes);
    return msg.payload_bytes;
}

}  // namespace hat::net
