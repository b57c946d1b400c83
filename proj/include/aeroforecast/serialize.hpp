#pragma once

#include <cstdint>
#include <filesystem>
#include <span>
#include <string>

#include "aeroforecast/model.hpp"

namespace aero {

// IEEE CRC-32 (polynomial 0xEDB88320).
std::uint32_t crc32(std::span<const unsigned char> bytes);
inline std::uint32_t crc32(const std::string& s) {
  return crc32(std::span<const unsigned char>(
      reinterpret_cast<const unsigned char*>(s.data()), s.size()));
}

// Model file layout (little-endian throughout):
//   magic "AFM1", u16 format version,
//   payload: model config (9 x u32), normalization stats
//     (u32 count, then u16 name length + name + f64 min + f64 max per
//     feature, then u32 target index), u32 layer count, per layer a u32
//     tensor count, per tensor u32 rank + u32 dims + raw f64 data,
//   trailing u32 CRC-32 of the payload.
// A round trip reproduces every parameter bitwise.
void save_model(const Model& model, const std::filesystem::path& path);
Model load_model(const std::filesystem::path& path);

// In-memory variants used by tests and the checksum helpers.
std::string serialize_model(const Model& model);
Model deserialize_model(std::span<const unsigned char> bytes);

// CRC-32 over the serialized parameter tensors only; changes iff some
// parameter bit changes.
std::uint32_t params_crc32(const Model& model);

}  // namespace aero
