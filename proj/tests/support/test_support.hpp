// SPDX-License-Identifier: Apache-2.0
#pragma once

#include <atomic>
#include <filesystem>
#include <fstream>
#include <sstream>
#include <string>

#include <unistd.h>

#include "fera/pose.hpp"
#include "fera/rng.hpp"

namespace fera::test {

/// Scratch directory removed on destruction.
class TempDir {
public:
  explicit TempDir(const std::string& tag = "fera") {
    static std::atomic<int> counter{0};
    const auto base = std::filesystem::temp_directory_path();
    for (;;) {
      path_ = base / (tag + "_" + std::to_string(::getpid()) + "_" + std::to_string(counter++));
      if (std::filesystem::create_directories(path_)) break;
    }
  }
  ~TempDir() {
    std::error_code ec;
    std::filesystem::remove_all(path_, ec);
  }
  TempDir(const TempDir&) = delete;
  TempDir& operator=(const TempDir&) = delete;

  const std::filesystem::path& path() const noexcept { return path_; }
  std::filesystem::path operator/(const std::string& name) const { return path_ / name; }

private:
  std::filesystem::path path_;
};

inline std::string read_text(const std::filesystem::path& p) {
  std::ifstream in(p, std::ios::binary);
  std::ostringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

/// Upright fencer-like skeleton with its pelvis at (cx, ground - 2 * torso).
inline Skeleton17 standing_skeleton(double cx, double ground, double torso = 90.0, double conf = 0.9) {
  Skeleton17 s;
  const double hip_y = ground - 1.9 * torso;
  const double sh_y = hip_y - torso;
  auto set = [&](int j, double x, double y) { s[j] = Keypoint{snap_pixel(x), snap_pixel(y), conf}; };
  set(kNose, cx + 5, sh_y - 0.45 * torso);
  set(kLeftEye, cx + 8, sh_y - 0.5 * torso);
  set(kRightEye, cx + 2, sh_y - 0.5 * torso);
  set(kLeftEar, cx + 10, sh_y - 0.45 * torso);
  set(kRightEar, cx, sh_y - 0.45 * torso);
  set(kLeftShoulder, cx + 0.2 * torso, sh_y);
  set(kRightShoulder, cx - 0.2 * torso, sh_y);
  set(kLeftElbow, cx + 0.5 * torso, sh_y + 0.3 * torso);
  set(kRightElbow, cx - 0.45 * torso, sh_y + 0.2 * torso);
  set(kLeftWrist, cx + 0.9 * torso, sh_y + 0.35 * torso);
  set(kRightWrist, cx - 0.6 * torso, sh_y - 0.1 * torso);
  set(kLeftHip, cx + 0.15 * torso, hip_y);
  set(kRightHip, cx - 0.15 * torso, hip_y);
  set(kLeftKnee, cx + 0.6 * torso, hip_y + 0.95 * torso);
  set(kRightKnee, cx - 0.5 * torso, hip_y + 0.95 * torso);
  set(kLeftAnkle, cx + 0.8 * torso, ground);
  set(kRightAnkle, cx - 0.8 * torso, ground);
  return s;
}

/// Skeleton with every joint uniform in the given rectangle.
inline Skeleton17 random_skeleton(Rng& rng, double x0, double y0, double x1, double y1) {
  Skeleton17 s;
  for (int j = 0; j < kNumJoints; ++j)
    s[j] = Keypoint{snap_pixel(rng.uniform(x0, x1)), snap_pixel(rng.uniform(y0, y1)), rng.uniform(0.3, 1.0)};
  return s;
}

}  // namespace fera::test
