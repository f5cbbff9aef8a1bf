// SPDX-License-Identifier: Apache-2.0
#pragma once

#include <iosfwd>

namespace fera::cli {

/// Entry point of the `fera` tool. Returns 0 on success, 1 on a validation
/// error (bad config, labels or arguments) and 2 on an I/O error.
int run(int argc, const char* const* argv, std::ostream& out, std::ostream& err);

}  // namespace fera::cli
