#pragma once

#include <iosfwd>

#include "tvl/grid.hpp"

namespace tvl {

// 1 for solver and assertion failures, 2 for usage and input errors.
int exit_code(ErrorCode c);

// Subcommands denoise, curvature, cheeger, hausdorff, experiment. Errors go to
// err as "ERROR <code>: <message>".
int cli_dispatch(int argc, const char* const* argv, std::ostream& out, std::ostream& err);

}  // namespace tvl
