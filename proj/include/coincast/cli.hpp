#pragma once

namespace coincast::cli {

/// Runs the coincast command-line tool. Returns the process exit code:
/// 0 success, 2 usage errors, 1 data/model errors.
int run(int argc, const char* const* argv);

} // namespace coincast::cli
