#pragma once

#include <iosfwd>

namespace nanoshuttle::cli {

/// Exit codes: 0 success, 1 internal error, 2 user or input error.
enum ExitCode : int { kOk = 0, kInternalError = 1, kUserError = 2 };

/// Entry point for `nanoshuttle <spectrum|simulate|analyze|constants>`.
/// Data files go to --out with the summary on `out`; without --out the data
/// goes to `out` and the summary to `err`. Diagnostics always go to `err`.
int run(int argc, const char* const* argv, std::ostream& out, std::ostream& err);

}  // namespace nanoshuttle::cli
