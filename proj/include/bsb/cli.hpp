#pragma once

#include <iosfwd>
#include <span>
#include <string>

namespace bsb {

enum ExitCode : int {
    kExitOk = 0,        // success / accept
    kExitReject = 1,    // verification rejected, recall did not converge
    kExitUsage = 2,     // bad arguments, refused analysis
    kExitIoFormat = 3,  // file I/O or file format problem
};

// args[0] is the program name. Never throws.
int cli_main(std::span<const std::string> args, std::ostream& out, std::ostream& err);

}  // namespace bsb
