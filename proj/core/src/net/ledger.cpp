#include "hat/net/ledger.hpp"

#include <json.hpp>

#include "hat/error.hpp"

namespace hat::net {

const char* kind_name(MessageKind kind) {
    switch (kind) {
        case MessageKind::kFeatureAnnounce: return "feature_announce";
        case MessageKind::kSimilarityReply: return "similarity_reply";
        case MessageKind::kModelInquiry: return "model_inquiry";
        case MessageKind::kModelTransfer: return "model_transfer";
    }
    throw ProtocolError("unknown message kind");
}

void TrafficLedger::add(MessageKind kind, std::int64_t bytes) {
    if (bytes <= 0) throw ProtocolError("message payload must be positive");
    per_kind_[static_cast<std::size_t>(kind)] += bytes;
    total_ += bytes;
}

void TrafficLedger::count_inference(std::int64_t n_forward_passes) {
    if (n_forward_passes < 0) throw ProtocolError("negative inference count");
    inference_count_ += n_forward_passes;
}

std::int64_t TrafficLedger::bytes(MessageKind kind) const {
    return per_kind_[static_cast<std::size_t>(kind)];
}

std::string TrafficLedger::to_json() const {
    nlohmann::json per_kind;
    for (int k = 0; k < kNumMessageKinds; ++k) {
        per_kind[kind_name(static_cast<MessageKind>(k))] = per_kind_[static_cast<std::size_t>(k)];
    }
    nlohmann::json doc{{"total_bytes", total_},
                       {"per_kind", per_kind},
                       {"inference_count", inference_count_}};
    return doc.dump(2);
}

}  // namespace hat::net
