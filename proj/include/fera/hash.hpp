// SPDX-License-Identifier: Apache-2.0
#pragma once

#include <cstdint>
#include <cstring>
#include <string_view>

namespace fera {

/// 64-bit FNV-1a, used for content fingerprints in manifests.
class Fnv1a {
public:
  void update(const void* data, std::size_t n) noexcept {
    const auto* p = static_cast<const unsigned char*>(data);
    for (std::size_t i = 0; i < n; ++i) {
      state_ ^= p[i];
      state_ *= 0x100000001B3ull;
    }
  }
  void update(std::string_view s) noexcept { update(s.data(), s.size()); }
  template <typename T>
  void update_value(T v) noexcept {
    unsigned char buf[sizeof(T)];
    std::memcpy(buf, &v, sizeof(T));
    update(buf, sizeof(T));
  }
  std::uint64_t digest() const noexcept { return state_; }

private:
  std::uint64_t state_ = 0xCBF29CE484222325ull;
};

}  // namespace fera
