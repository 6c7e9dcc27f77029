#include <iostream>

#include "tnnloop/cli.hpp"

int main(int argc, char** argv) {
    std::vector<std::string> args(argv + 1, argv + argc);
    return tnnloop::cli::run(args, std::cin, std::cout, std::cerr);
}
