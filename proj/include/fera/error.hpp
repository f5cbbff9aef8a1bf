// SPDX-License-Identifier: Apache-2.0
#pragma once

#include <stdexcept>
#include <string>

namespace fera {

/// Input that is well-formed on disk but violates a contract (bad config key,
/// unknown label, inconsistent spec). The CLI maps it to exit code 1.
class ValidationError : public std::runtime_error {
public:
  using std::runtime_error::runtime_error;
};

/// Malformed file content, carrying the 1-based line and the offending field.
class ParseError : public ValidationError {
public:
  ParseError(std::string file, std::size_t line, std::string field, const std::string& what)
      : ValidationError(file + ":" + std::to_string(line) + ": field \"" + field + "\": " + what),
        file_(std::move(file)), line_(line), field_(std::move(field)) {}

  const std::string& file() const noexcept { return file_; }
  std::size_t line() const noexcept { return line_; }
  const std::string& field() const noexcept { return field_; }

private:
  std::string file_;
  std::size_t line_;
  std::string field_;
};

/// Missing or unreadable files; CLI exit code 2.
class IoError : public std::runtime_error {
public:
  using std::runtime_error::runtime_error;
};

}  // namespace fera
