// SPDX-License-Identifier: Apache-2.0
#include "fera/calib/calibration.hpp"

#include <array>
#include <fstream>
#include <sstream>
#include <vector>

#include "fera/error.hpp"
#include "fera/text.hpp"

namespace fera::calib {

void write_calibration_stream(std::ostream& out, const Calibration& c) {
  out << "kind,name,threshold,temperature\n";
  for (int m = 0; m < kNumMoves; ++m)
    out << "move," << move_name(move_from_index(m)) << ',' << format_double(c.thresholds.tau[static_cast<std::size_t>(m)])
        << ',' << format_double(c.temperatures.t[static_cast<std::size_t>(m)]) << '\n';
  for (int b = 0; b < kNumBlades; ++b)
    out << "blade," << blade_name(blade_from_index(b)) << ",,"
        << format_double(c.temperatures.t[static_cast<std::size_t>(kNumMoves + b)]) << '\n';
}

void save_calibration(const std::filesystem::path& path, const Calibration& c) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw IoError("cannot write " + path.string());
  write_calibration_stream(out, c);
  if (!out) throw IoError("failed writing " + path.string());
}

Calibration read_calibration_stream(std::istream& in, const std::string& source) {
  Calibration c;
  std::array<bool, kNumMoves + kNumBlades> seen{};
  std::string line;
  std::size_t line_no = 0;
  while (std::getline(in, line)) {
    ++line_no;
    if (trim(line).empty() || line.starts_with("kind,")) continue;
    std::vector<std::string> f;
    std::stringstream ss(line);
    std::string cell;
    while (std::getline(ss, cell, ',')) f.emplace_back(trim(cell));
    if (f.size() == 3 && line.back() == ',') f.emplace_back();
    if (f.size() != 4) throw ParseError(source, line_no, "row", "expected 4 columns, got " + std::to_string(f.size()));
    const auto temp = parse_number<double>(f[3]);
    if (!temp || !(*temp > 0.0)) throw ParseError(source, line_no, "temperature", "must be a positive number");
    std::size_t slot;
    if (f[0] == "move") {
      slot = static_cast<std::size_t>(move_index(parse_move(f[1])));
      const auto tau = parse_number<double>(f[2]);
      if (!tau || !(*tau > 0.0 && *tau < 1.0)) throw ParseError(source, line_no, "threshold", "must lie in (0, 1)");
      c.thresholds.tau[slot] = *tau;
    } else if (f[0] == "blade") {
      slot = static_cast<std::size_t>(kNumMoves + blade_index(parse_blade(f[1])));
    } else {
      throw ParseError(source, line_no, "kind", "expected move or blade, got \"" + f[0] + "\"");
    }
    if (seen[slot]) throw ParseError(source, line_no, "name", "duplicate entry " + f[1]);
    seen[slot] = true;
    c.temperatures.t[slot] = *temp;
  }
  for (std::size_t i = 0; i < seen.size(); ++i)
    if (!seen[i])
      throw ValidationError(source + ": missing calibration entry for " +
                            (i < kNumMoves ? std::string(move_name(move_from_index(static_cast<int>(i))))
                                           : "blade " + std::string(blade_name(blade_from_index(static_cast<int>(i) - kNumMoves)))));
  return c;
}

Calibration load_calibration(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) throw IoError("cannot open " + path.string());
  return read_calibration_stream(in, path.string());
}

}  // namespace fera::calib
