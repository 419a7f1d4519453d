#pragma once

#include <iosfwd>
#include <string>
#include <vector>

namespace hapstep::cli {

enum ExitCode {
    kOk = 0,
    kUsage = 2,
    kFormat = 3,
    kDegenerate = 4,
    kIo = 5,
};

/// Runs one subcommand. `args` excludes the program name. Standard streams
/// are injectable so tests can run the tool in-process.
int run(const std::vector<std::string>& args, std::istream& in, std::ostream& out, std::ostream& err);

int main(int argc, char** argv);

} // namespace hapstep::cli
