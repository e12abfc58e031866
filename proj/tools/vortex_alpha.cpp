#include <iostream>
#include <string>
#include <vector>

#include "vortex/cli.hpp"

int main(int argc, char** argv) {
    const std::vector<std::string> args(argv + 1, argv + argc);
    return vortex::cli::dispatch(args, std::cout, std::cerr);
}
