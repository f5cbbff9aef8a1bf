// SPDX-License-Identifier: Apache-2.0
#include "fera/feature_io.hpp"

#include <bit>
#include <cstring>
#include <fstream>
#include <iomanip>
#include <istream>
#include <ostream>

#include "fera/binary_io.hpp"
#include "fera/error.hpp"

namespace fera {

namespace {
constexpr char kMagic[8] = {'F', 'E', 'R', 'A', 'F', 'E', 'A', 'T'};
constexpr std::uint32_t kVersion = 1;
}  // namespace

void write_feature_stream(std::ostream& out, const FeatureSequence& seq) {
  binio::Writer w(out);
  w.bytes(kMagic, sizeof kMagic);
  w.u32(kVersion);
  w.str16(seq.clip_id);
  w.u8(static_cast<std::uint8_t>(seq.side));
  w.u32(static_cast<std::uint32_t>(seq.size()));
  w.u32(kFeatureDim);
  w.i64(seq.first_frame);
  for (std::size_t t = 0; t < seq.size(); ++t) {
    w.u8(seq.valid_mask[t]);
    w.u8(seq.flags[t]);
    w.u16(seq.joint_masks[t]);
  }
  for (const auto& f : seq.frames)
    for (double v : f) w.f32(static_cast<float>(v));
}

FeatureSequence read_feature_stream(std::istream& in, const std::string& source_name) {
  binio::Reader r(in, source_name);
  char magic[8];
  r.bytes(magic, sizeof magic);
  if (std::memcmp(magic, kMagic, sizeof kMagic) != 0) throw ValidationError(source_name + ": not a feature file");
  if (r.u32() != kVersion) throw ValidationError(source_name + ": unsupported feature file version");
  FeatureSequence seq;
  seq.clip_id = r.str16();
  const auto side = r.u8();
  if (side > 1) throw ValidationError(source_name + ": bad side byte");
  seq.side = static_cast<Side>(side);
  const auto n = r.u32();
  if (r.u32() != kFeatureDim) throw ValidationError(source_name + ": feature dimension must be 101");
  seq.first_frame = r.i64();
  seq.valid_mask.resize(n);
  seq.flags.resize(n);
  seq.joint_masks.resize(n);
  for (std::uint32_t t = 0; t < n; ++t) {
    seq.valid_mask[t] = r.u8();
    seq.flags[t] = r.u8();
    seq.joint_masks[t] = r.u16();
  }
  seq.frames.resize(n);
  for (auto& f : seq.frames)
    for (double& v : f) v = r.f32();
  return seq;
}

void write_feature_file(const std::filesystem::path& path, const FeatureSequence& seq) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw IoError("cannot write " + path.string());
  write_feature_stream(out, seq);
  if (!out) throw IoError("failed writing " + path.string());
}

FeatureSequence read_feature_file(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw IoError("cannot open " + path.string());
  return read_feature_stream(in, path.string());
}

const std::vector<std::string>& feature_names() {
  static const std::vector<std::string> names = [] {
    static constexpr const char* kBody[kBodyJoints] = {"lsh", "rsh", "lel", "rel", "lwr", "rwr",
                                                       "lhip", "rhip", "lkn", "rkn", "lank", "rank"};
    std::vector<std::string> n;
    for (auto* j : kBody) {
      n.push_back(std::string(j) + "_x");
      n.push_back(std::string(j) + "_y");
    }
    n.push_back("com_x");
    n.push_back("com_y");
    for (const auto& [a, b] : kDistancePairs) n.push_back(std::string("dist_") + kBody[a] + "_" + kBody[b]);
    for (auto* a : {"angle_lelbow", "angle_relbow", "angle_lknee", "angle_rknee"}) n.push_back(a);
    n.push_back("torso_sin");
    n.push_back("torso_cos");
    for (auto* arm : {"larm", "rarm"}) {
      n.push_back(std::string(arm) + "_mag");
      n.push_back(std::string(arm) + "_dx");
      n.push_back(std::string(arm) + "_dy");
    }
    for (auto* prefix : {"vel_", "acc_"})
      for (auto* j : kBody) {
        n.push_back(prefix + std::string(j) + "_x");
        n.push_back(prefix + std::string(j) + "_y");
      }
    for (auto* c : {"com_vx", "com_vy", "com_ax", "com_ay"}) n.push_back(c);
    return n;
  }();
  return names;
}

void write_feature_csv(std::ostream& out, const FeatureSequence& seq) {
  out << "frame,valid";
  for (const auto& n : feature_names()) out << ',' << n;
  out << '\n' << std::setprecision(9);
  for (std::size_t t = 0; t < seq.size(); ++t) {
    out << seq.first_frame + static_cast<std::int64_t>(t) << ',' << int(seq.valid_mask[t]);
    for (double v : seq.frames[t]) out << ',' << v;
    out << '\n';
  }
}

}  // namespace fera
