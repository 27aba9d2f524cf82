#pragma once

#include <iosfwd>
#include <string>
#include <vector>

namespace bnfstab::cli {

enum ExitCode : int {
  kOk = 0,
  kUsage = 1,
  kParse = 2,
  kResonance = 3,
  kDomain = 4,
};

/// Run one command. args excludes the program name.
int run(const std::vector<std::string>& args, std::ostream& out, std::ostream& err);

}  // namespace bnfstab::cli
