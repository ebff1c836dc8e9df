#pragma once

#include <cstdint>
#include <string>
#include <vector>

#include "hat/nn/model.hpp"

namespace hat::nn {

// Flat binary model image. Layout:
//   magic "HATM", u32 version, u32 encoder layer count,
//   per encoder layer: u32 in, u32 out, u32 activation,
//   classifier: u32 in, u32 out,
//   u32 label count, i32 label ids,
//   then every parameter as little-endian float32, weights row-major
//   followed by bias, encoder layers first, classifier last.
std::vector<std::uint8_t> serialize_model(const NetModel& model);
NetModel deserialize_model(const std::vector<std::uint8_t>& bytes);

void save_model(const NetModel& model, const std::string& path);
NetModel load_model(const std::string& path);

}  // namespace hat::nn
