#pragma once
//
// Command-line front end. Exit codes: 0 analysis ran (whatever the verdict),
// 2 usage or parameter error, 3 internal validation failure.
//

#include <ostream>

namespace qch {

int run_cli(int argc, const char* const* argv, std::ostream& out, std::ostream& err);

// Exception-to-exit-code mapping used by run_cli; exposed for tests.
int exit_code_for_current_exception(std::ostream& err);

}  // namespace qch
