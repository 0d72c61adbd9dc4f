#pragma once

#include <cstdint>
#include <filesystem>
#include <span>
#include <string>
#include <utility>
#include <vector>

#include "fedload/nn/layers.hpp"

namespace fedload::nn {

using Blob = std::vector<std::uint8_t>;

// Flat little-endian parameter snapshot:
//
//   "FLDB" | u32 version | u32 bytes_per_param | u32 block_count
//   block_count x { u32 name_len | name | u32 rank | u64 dims[rank] }
//   body: every block's values, row-major, as float32 (4) or float64 (8)
//
// The body is exactly param_count * bytes_per_param bytes.
struct BlobInfo {
  int bytes_per_param = 0;
  std::vector<std::pair<std::string, Shape>> blocks;
  std::size_t header_bytes = 0;
  std::size_t payload_bytes = 0;
};

Blob serialize_blocks(const ConstParamBlocks& blocks, int bytes_per_param);
BlobInfo inspect_blob(std::span<const std::uint8_t> blob);
// Block names and shapes in the blob must match `into` exactly.
void deserialize_blocks(std::span<const std::uint8_t> blob, const ParamBlocks& into);

template <class Model>
Blob to_blob(const Model& model, int bytes_per_param) {
  return serialize_blocks(model.blocks(), bytes_per_param);
}

template <class Model>
void from_blob(Model& model, std::span<const std::uint8_t> blob) {
  deserialize_blocks(blob, model.blocks());
}

inline std::size_t payload_bytes(std::span<const std::uint8_t> blob) {
  return inspect_blob(blob).payload_bytes;
}

void write_blob_file(const std::filesystem::path& path, const Blob& blob);
Blob read_blob_file(const std::filesystem::path& path);

}  // namespace fedload::nn
