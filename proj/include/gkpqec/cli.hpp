#pragma once

namespace gkpqec {

// Entry point for the command-line tool. Returns the process exit code:
// 0 on success, 2 for configuration or usage errors, 3 for numerical failures.
int run_cli(int argc, char** argv);

}  // namespace gkpqec
