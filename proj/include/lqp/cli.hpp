#pragma once

#include <ostream>

namespace lqp {

// The lqp-lab entry point. Returns 0 on success, 1 on domain errors and 2
// on usage errors.
int run_cli(int argc, const char* const* argv, std::ostream& out, std::ostream& err);

}  // namespace lqp
