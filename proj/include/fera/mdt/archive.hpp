// SPDX-License-Identifier: Apache-2.0
#pragma once

#include <filesystem>
#include <iosfwd>
#include <map>
#include <string>

#include "fera/mdt/model.hpp"

namespace fera::mdt {

using Manifest = std::map<std::string, std::string>;

struct WeightsArchive {
  ModelWeights weights;
  Manifest manifest;  // model.* keys plus training provenance
};

/// Layout: "FERAWTS1", u32 manifest length, manifest text (key=value lines),
/// u32 tensor count, per tensor {str16 name, u8 dtype (0 = f32), u8 rank,
/// u32 dims[rank], u64 data offset}, then little-endian f32 data row-major.
void write_weights_stream(std::ostream& out, const ModelWeights& weights, const Manifest& provenance);
void save_weights(const std::filesystem::path& path, const ModelWeights& weights, const Manifest& provenance);

WeightsArchive read_weights_stream(std::istream& in, const std::string& source_name);
WeightsArchive load_weights(const std::filesystem::path& path);

/// Rounds every tensor through f32, matching what a save/load cycle yields.
void round_to_f32(ModelWeights& weights);

}  // namespace fera::mdt
