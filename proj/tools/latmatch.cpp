#include <iostream>
#include <string>
#include <vector>

#include "latmatch/cli.hpp"

int main(int argc, char** argv) {
    std::vector<std::string> args(argv + 1, argv + argc);
    return latmatch::run_cli(args, std::cout, std::cerr);
}
