#include <string>
#include <vector>
#include <iostream>

#include "bsb/cli.hpp"

int main(int argc, char** argv) {
    std::vector<std::string> args(argv, argv + argc);
    return bsb::cli_main(args, std::cout, std::cerr);
}
