#pragma once

#include <array>
#include <cstdint>
#include <string>

namespace hat::net {

enum class MessageKind { kFeatureAnnounce, kSimilarityReply, kModelInquiry, kModelTransfer };

constexpr int kNumMessageKinds = 4;
const char* kind_name(MessageKind kind);

// Byte-exact accounting of everything that crosses the simulated network,
// plus the number of source-encoder forward passes run on target data.
// Counters only ever grow.
class TrafficLedger {
  public:
    void add(MessageKind kind, std::int64_t bytes);
    void count_inference(std::int64_t n_forward_passes);

    std::int64_t total_bytes() const { return total_; }
    std::int64_t bytes(MessageKind kind) const;
    std::int64_t inference_count() const { return inference_count_; }

    // {"total_bytes":..., "per_kind":{...}, "inference_count":...}
    std::string to_json() const;

  private:
    std::int64_t total_ = 0;
    std::array<std::int64_t, kNumMessageKinds> per_kind_{};
    std::int64_t inference_count_ = 0;
};

}  // namespace hat::net
