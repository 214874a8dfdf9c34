#pragma once

namespace zll {

// Command-line entry point (subcommands: sample-z, build-ladder,
// verify-lemma, splitting, geometry, fourth-moment, report).
// Returns 0 when all numeric checks pass, 1 on numeric check failures,
// 2 on usage or configuration errors.
int cli_main(int argc, const char* const* argv);

}  // namespace zll
