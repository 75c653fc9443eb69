#pragma once

namespace aos::cli {

/// Entry point behind main(). Exit codes: 0 success, 1 usage error,
/// 2 data/parse error, 3 failed validation.
int run(int argc, const char* const* argv);

}  // namespace aos::cli
