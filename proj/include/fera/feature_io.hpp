// SPDX-License-Identifier: Apache-2.0
#pragma once

#include <filesystem>
#include <iosfwd>
#include <string>
#include <vector>

#include "fera/features.hpp"

namespace fera {

// Binary feature file, all integers and floats little-endian:
//   "FERAFEAT" | u32 version=1 | u16 len | clip_id bytes | u8 side |
//   u32 frame_count | u32 dim (=101) | i64 first_frame |
//   frame_count x (u8 valid, u8 flags, u16 joint_mask) |
//   frame_count x dim f32 values.
// Values are narrowed to f32 on write.

void write_feature_stream(std::ostream& out, const FeatureSequence& seq);
FeatureSequence read_feature_stream(std::istream& in, const std::string& source_name);
void write_feature_file(const std::filesystem::path& path, const FeatureSequence& seq);
FeatureSequence read_feature_file(const std::filesystem::path& path);

/// Column names of the 101-D layout, e.g. "joint3_y", "dist_lwr_rwr".
const std::vector<std::string>& feature_names();

/// Debug export: `frame,valid,<101 named columns>`.
void write_feature_csv(std::ostream& out, const FeatureSequence& seq);

}  // namespace fera
