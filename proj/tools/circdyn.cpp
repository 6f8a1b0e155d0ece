#include <iostream>

#include "cli/run.hpp"

int main(int argc, char** argv) {
    std::vector<std::string> args(argv + 1, argv + argc);
    return circdyn::cli::run_cli(args, std::cout, std::cerr);
}
