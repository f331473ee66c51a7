#pragma once

#include <iosfwd>

namespace mqrank {

/// Entry point of the `mqrank` tool. Returns 0 on success, 1 on domain and
/// input errors, 2 on usage errors. MQRANK_SEED and MQRANK_JOBS supply
/// --seed and --jobs when those flags are absent.
int run_cli(int argc, const char* const* argv, std::ostream& out, std::ostream& err);

}  // namespace mqrank
