#pragma once

#include <iosfwd>
#include <string>
#include <vector>

namespace slag::cli {

/// Exit codes: 0 success, 1 usage error, 2 input error, 3 property
/// violation found (scan counterexample or field implication failure).
int run(const std::vector<std::string>& args, std::ostream& out,
        std::ostream& err);

int run(int argc, const char* const* argv, std::ostream& out,
        std::ostream& err);

}  // namespace slag::cli
