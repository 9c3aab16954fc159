#include <iostream>
#include <string>
#include <vector>

#include "d2k/cli.hpp"

int main(int argc, char** argv) {
    std::vector<std::string> args(argv + 1, argv + argc);
    return d2k::run_cli(args, std::cout, std::cerr);
}
