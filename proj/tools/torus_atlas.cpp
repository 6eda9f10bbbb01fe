#include "torus_atlas/cli.hpp"

#include <iostream>

int main(int argc, char** argv) {
    std::vector<std::string> args(argv + 1, argv + argc);
    return torus_atlas::cli::run(args, std::cout, std::cerr);
}
