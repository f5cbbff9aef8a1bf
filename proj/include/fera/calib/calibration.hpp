// SPDX-License-Identifier: Apache-2.0
#pragma once

#include <filesystem>
#include <iosfwd>
#include <string>

#include "fera/calib/temperature.hpp"
#include "fera/calib/thresholds.hpp"

namespace fera::calib {

/// Decision parameters applied on top of a trained model.
struct Calibration {
  ThresholdSet thresholds;
  TemperatureSet temperatures;

  friend bool operator==(const Calibration&, const Calibration&) = default;
};

/// CSV `kind,name,threshold,temperature`; one row per move and per blade
/// class (blade rows leave the threshold empty).
void write_calibration_stream(std::ostream& out, const Calibration& c);
void save_calibration(const std::filesystem::path& path, const Calibration& c);

Calibration read_calibration_stream(std::istream& in, const std::string& source_name);
Calibration load_calibration(const std::filesystem::path& path);

}  // namespace fera::calib
