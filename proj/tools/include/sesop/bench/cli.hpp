#pragma once

#include <iosfwd>

namespace sesop::bench {

/// Entry point of sesop-bench. Returns 0 on success, 1 on bad flags or
/// unknown names, 2 when a solver run failed.
int cli_main(int argc, const char* const* argv, std::ostream& out, std::ostream& err);

}  // namespace sesop::bench
