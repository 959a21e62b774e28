#pragma once

namespace ccqm {

/// Entry point of the `ccqm` tool. Returns the process exit code:
/// 0 success, 2 config error, 3 numerical error, 4 physics-domain error.
int run_cli(int argc, char** argv);

}  // namespace ccqm
