// SPDX-License-Identifier: Apache-2.0
#include "fera/mdt/archive.hpp"

#include <algorithm>
#include <fstream>
#include <sstream>
#include <vector>

#include "fera/binary_io.hpp"
#include "fera/error.hpp"
#include "fera/text.hpp"

namespace fera::mdt {

namespace {

constexpr char kMagic[8] = {'F', 'E', 'R', 'A', 'W', 'T', 'S', '1'};
constexpr std::uint8_t kDtypeF32 = 0;

Manifest model_manifest(const ModelConfig& c) {
  return {
      {"model.input_dim", std::to_string(c.input_dim)}, {"model.embed_dim", std::to_string(c.embed_dim)},
      {"model.layers", std::to_string(c.layers)},       {"model.heads", std::to_string(c.heads)},
      {"model.ff_dim", std::to_string(c.ff_dim)},       {"model.dropout", format_double(c.dropout)},
      {"model.num_moves", std::to_string(c.num_moves)}, {"model.num_blades", std::to_string(c.num_blades)},
  };
}

ModelConfig config_from_manifest(const Manifest& m, const std::string& source) {
  auto get = [&](const std::string& key) -> const std::string& {
    const auto it = m.find(key);
    if (it == m.end()) throw ValidationError(source + ": manifest lacks " + key);
    return it->second;
  };
  auto get_int = [&](const std::string& key) {
    const auto v = parse_number<int>(get(key));
    if (!v) throw ValidationError(source + ": manifest value " + key + " is not an integer");
    return *v;
  };
  ModelConfig c;
  c.input_dim = get_int("model.input_dim");
  c.embed_dim = get_int("model.embed_dim");
  c.layers = get_int("model.layers");
  c.heads = get_int("model.heads");
  c.ff_dim = get_int("model.ff_dim");
  c.num_moves = get_int("model.num_moves");
  c.num_blades = get_int("model.num_blades");
  const auto d = parse_number<double>(get("model.dropout"));
  if (!d) throw ValidationError(source + ": manifest value model.dropout is not a number");
  c.dropout = *d;
  c.validate();
  return c;
}

}  // namespace

void write_weights_stream(std::ostream& out, const ModelWeights& weights, const Manifest& provenance) {
  check_weights(weights);
  Manifest manifest = provenance;
  for (auto& [k, v] : model_manifest(weights.config)) manifest[k] = v;
  std::string text;
  for (const auto& [k, v] : manifest) {
    if (k.find_first_of("=\n") != std::string::npos || v.find('\n') != std::string::npos)
      throw ValidationError("manifest entry \"" + k + "\" contains a reserved character");
    text += k + "=" + v + "\n";
  }

  binio::Writer w(out);
  w.bytes(kMagic, sizeof kMagic);
  w.u32(static_cast<std::uint32_t>(text.size()));
  w.bytes(text.data(), text.size());

  std::uint32_t count = 0;
  weights.for_each([&](const std::string&, const Mat&) { ++count; });
  w.u32(count);
  std::uint64_t offset = 0;
  weights.for_each([&](const std::string& name, const Mat& m) {
    w.str16(name);
    w.u8(kDtypeF32);
    w.u8(2);
    w.u32(static_cast<std::uint32_t>(m.rows()));
    w.u32(static_cast<std::uint32_t>(m.cols()));
    w.u64(offset);
    offset += static_cast<std::uint64_t>(m.size()) * 4;
  });
  weights.for_each([&](const std::string&, const Mat& m) {
    for (Eigen::Index r = 0; r < m.rows(); ++r)
      for (Eigen::Index c = 0; c < m.cols(); ++c) w.f32(static_cast<float>(m(r, c)));
  });
}

void save_weights(const std::filesystem::path& path, const ModelWeights& weights, const Manifest& provenance) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw IoError("cannot write " + path.string());
  write_weights_stream(out, weights, provenance);
  if (!out) throw IoError("failed writing " + path.string());
}

WeightsArchive read_weights_stream(std::istream& in, const std::string& source) {
  binio::Reader r(in, source);
  char magic[8];
  r.bytes(magic, sizeof magic);
  if (!std::equal(magic, magic + 8, kMagic)) throw ValidationError(source + ": not a weights archive");
  std::string text(r.u32(), '\0');
  if (!text.empty()) r.bytes(text.data(), text.size());

  WeightsArchive out;
  std::istringstream lines(text);
  std::string line;
  while (std::getline(lines, line)) {
    if (line.empty()) continue;
    const auto eq = line.find('=');
    if (eq == std::string::npos) throw ValidationError(source + ": malformed manifest line \"" + line + "\"");
    out.manifest[line.substr(0, eq)] = line.substr(eq + 1);
  }
  out.weights = ModelWeights::zeros(config_from_manifest(out.manifest, source));

  struct Entry {
    std::string name;
    std::uint32_t rows, cols;
    std::uint64_t offset;
  };
  std::vector<Entry> table(r.u32());
  for (auto& e : table) {
    e.name = r.str16();
    if (r.u8() != kDtypeF32) throw ValidationError(source + ": tensor " + e.name + " has an unsupported dtype");
    if (r.u8() != 2) throw ValidationError(source + ": tensor " + e.name + " is not rank 2");
    e.rows = r.u32();
    e.cols = r.u32();
    e.offset = r.u64();
  }

  std::size_t i = 0;
  std::uint64_t offset = 0;
  out.weights.for_each([&](const std::string& name, Mat& m) {
    if (i >= table.size()) throw ValidationError(source + ": missing tensor " + name);
    const auto& e = table[i++];
    if (e.name != name) throw ValidationError(source + ": expected tensor " + name + ", found " + e.name);
    if (e.rows != m.rows() || e.cols != m.cols())
      throw ValidationError(source + ": tensor " + name + " has shape " + std::to_string(e.rows) + "x" +
                            std::to_string(e.cols) + ", expected " + std::to_string(m.rows()) + "x" +
                            std::to_string(m.cols()));
    if (e.offset != offset) throw ValidationError(source + ": tensor " + name + " has an unexpected data offset");
    offset += static_cast<std::uint64_t>(m.size()) * 4;
  });
  if (i != table.size()) throw ValidationError(source + ": unexpected extra tensors");
  out.weights.for_each([&](const std::string&, Mat& m) {
    for (Eigen::Index row = 0; row < m.rows(); ++row)
      for (Eigen::Index c = 0; c < m.cols(); ++c) m(row, c) = r.f32();
  });
  check_weights(out.weights);
  return out;
}

WeightsArchive load_weights(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw IoError("cannot open " + path.string());
  return read_weights_stream(in, path.string());
}

void round_to_f32(ModelWeights& weights) {
  weights.for_each([](const std::string&, Mat& m) {
    m = m.unaryExpr([](double v) { return static_cast<double>(static_cast<float>(v)); });
  });
}

}  // namespace fera::mdt
