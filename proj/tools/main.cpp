#include <iostream>
#include <string>
#include <vector>

#include "fgmatch/cli.hpp"

int main(int argc, char** argv) {
    std::vector<std::string> args(argv, argv + argc);
    return fgmatch::cli::run(args, std::cout, std::cerr);
}
