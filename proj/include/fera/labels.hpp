// SPDX-License-Identifier: Apache-2.0
#pragma once

#include <array>
#include <cstdint>
#include <string>
#include <string_view>
#include <vector>

namespace fera {

inline constexpr int kNumMoves = 12;
inline constexpr int kNumBlades = 5;

/// Move vocabulary. Numeric codes follow the annotation protocol (1-based).
enum class MoveLabel : std::uint8_t {
  StepForward = 1,
  StepBackward = 2,
  HalfStepForward = 3,
  HalfStepBackward = 4,
  Lunge = 5,
  Fleche = 6,
  Wait = 7,
  Parry = 8,
  Beat = 9,
  Counterattack = 10,
  Fake = 11,
  Hit = 12,
};

enum class BladeLine : std::uint8_t { Four = 0, Six = 1, Seven = 2, Eight = 3, Other = 4 };

enum class Side : std::uint8_t { Left = 0, Right = 1 };

constexpr int move_index(MoveLabel m) noexcept { return static_cast<int>(m) - 1; }
constexpr MoveLabel move_from_index(int i) noexcept { return static_cast<MoveLabel>(i + 1); }
constexpr int blade_index(BladeLine b) noexcept { return static_cast<int>(b); }
constexpr BladeLine blade_from_index(int i) noexcept { return static_cast<BladeLine>(i); }
constexpr Side opposite(Side s) noexcept { return s == Side::Left ? Side::Right : Side::Left; }

/// Machine name used in CSV files, e.g. "step_forward".
std::string_view move_name(MoveLabel m) noexcept;
/// Human wording used in explanations and prompts, e.g. "step forward".
std::string_view move_display_name(MoveLabel m) noexcept;
/// Parses a machine name; throws ValidationError listing all valid names.
MoveLabel parse_move(std::string_view name);

/// "4", "6", "7", "8" or "other".
std::string_view blade_name(BladeLine b) noexcept;
BladeLine parse_blade(std::string_view name);

std::string_view side_name(Side s) noexcept;
Side parse_side(std::string_view name);

/// Set of move labels as a 12-bit mask. Ordering compares the mask value,
/// which gives a stable lexicographic tie-break over label sets.
class MoveSet {
public:
  constexpr MoveSet() = default;
  constexpr explicit MoveSet(std::uint16_t mask) : mask_(mask & 0x0FFFu) {}
  MoveSet(std::initializer_list<MoveLabel> labels) {
    for (auto m : labels) insert(m);
  }

  constexpr bool contains(MoveLabel m) const noexcept { return (mask_ >> move_index(m)) & 1u; }
  constexpr void insert(MoveLabel m) noexcept { mask_ |= static_cast<std::uint16_t>(1u << move_index(m)); }
  constexpr void erase(MoveLabel m) noexcept { mask_ &= static_cast<std::uint16_t>(~(1u << move_index(m))); }
  constexpr bool empty() const noexcept { return mask_ == 0; }
  int size() const noexcept;
  constexpr std::uint16_t mask() const noexcept { return mask_; }
  constexpr bool intersects(MoveSet o) const noexcept { return (mask_ & o.mask_) != 0; }
  constexpr MoveSet united(MoveSet o) const noexcept { return MoveSet(mask_ | o.mask_); }

  /// Labels in ascending code order.
  std::vector<MoveLabel> labels() const;
  /// Binary indicator vector in class-index order.
  std::array<bool, kNumMoves> indicators() const noexcept;

  friend constexpr bool operator==(MoveSet a, MoveSet b) noexcept { return a.mask_ == b.mask_; }
  friend constexpr auto operator<=>(MoveSet a, MoveSet b) noexcept { return a.mask_ <=> b.mask_; }

private:
  std::uint16_t mask_ = 0;
};

/// "step_forward+beat" (ascending code order).
std::string format_moves(MoveSet moves);
/// Inverse of format_moves; rejects empty sets and unknown names.
MoveSet parse_moves(std::string_view text);
/// "step forward, beat": display names joined by ", ".
std::string display_moves(MoveSet moves, std::string_view separator = ", ");

}  // namespace fera
