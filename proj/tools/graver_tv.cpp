#include <iostream>
#include <string>
#include <vector>

#include "graver_tv/cli.hpp"

int main(int argc, char** argv) {
    std::vector<std::string> args(argv + 1, argv + argc);
    return gtv::run_cli(args, std::cout, std::cerr);
}
