// SPDX-License-Identifier: Apache-2.0
#include "fera/labels.hpp"

#include <bit>

#include "fera/error.hpp"

namespace fera {

namespace {

constexpr std::array<std::string_view, kNumMoves> kMoveNames = {
    "step_forward", "step_backward", "half_step_forward", "half_step_backward",
    "lunge",        "fleche",        "wait",              "parry",
    "beat",         "counterattack", "fake",              "hit",
};

constexpr std::array<std::string_view, kNumMoves> kMoveDisplay = {
    "step forward", "step backward", "half step forward", "half step backward",
    "lunge",        "fleche",        "wait",              "parry",
    "beat",         "counterattack", "fake",              "hit",
};

constexpr std::array<std::string_view, kNumBlades> kBladeNames = {"4", "6", "7", "8", "other"};

std::string valid_move_list() {
  std::string out;
  for (auto n : kMoveNames) {
    if (!out.empty()) out += ", ";
    out += n;
  }
  return out;
}

}  // namespace

std::string_view move_name(MoveLabel m) noexcept { return kMoveNames[move_index(m)]; }
std::string_view move_display_name(MoveLabel m) noexcept { return kMoveDisplay[move_index(m)]; }

MoveLabel parse_move(std::string_view name) {
  for (int i = 0; i < kNumMoves; ++i)
    if (kMoveNames[i] == name) return move_from_index(i);
  throw ValidationError("unknown move \"" + std::string(name) + "\"; valid moves: " + valid_move_list());
}

std::string_view blade_name(BladeLine b) noexcept { return kBladeNames[blade_index(b)]; }

BladeLine parse_blade(std::string_view name) {
  for (int i = 0; i < kNumBlades; ++i)
    if (kBladeNames[i] == name) return blade_from_index(i);
  throw ValidationError("unknown blade line \"" + std::string(name) + "\"; valid: 4, 6, 7, 8, other");
}

std::string_view side_name(Side s) noexcept { return s == Side::Left ? "left" : "right"; }

Side parse_side(std::string_view name) {
  if (name == "left") return Side::Left;
  if (name == "right") return Side::Right;
  throw ValidationError("unknown side \"" + std::string(name) + "\"; expected left or right");
}

int MoveSet::size() const noexcept { return std::popcount(mask_); }

std::vector<MoveLabel> MoveSet::labels() const {
  std::vector<MoveLabel> out;
  for (int i = 0; i < kNumMoves; ++i)
    if ((mask_ >> i) & 1u) out.push_back(move_from_index(i));
  return out;
}

std::array<bool, kNumMoves> MoveSet::indicators() const noexcept {
  std::array<bool, kNumMoves> out{};
  for (int i = 0; i < kNumMoves; ++i) out[i] = (mask_ >> i) & 1u;
  return out;
}

std::string format_moves(MoveSet moves) {
  std::string out;
  for (auto m : moves.labels()) {
    if (!out.empty()) out += '+';
    out += move_name(m);
  }
  return out;
}

MoveSet parse_moves(std::string_view text) {
  MoveSet out;
  std::size_t pos = 0;
  while (pos <= text.size()) {
    auto next = text.find('+', pos);
    if (next == std::string_view::npos) next = text.size();
    auto token = text.substr(pos, next - pos);
    if (token.empty()) throw ValidationError("empty move name in \"" + std::string(text) + "\"");
    out.insert(parse_move(token));
    pos = next + 1;
  }
  if (out.empty()) throw ValidationError("move set must not be empty");
  return out;
}

std::string display_moves(MoveSet moves, std::string_view separator) {
  std::string out;
  for (auto m : moves.labels()) {
    if (!out.empty()) out += separator;
    out += move_display_name(m);
  }
  return out;
}

}  // namespace fera
