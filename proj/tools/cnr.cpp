#include <iostream>
#include <string>
#include <vector>

#include "cnr/cli.hpp"

int main(int argc, char** argv) {
    std::vector<std::string> args(argv + 1, argv + argc);
    return cnr::cli_main(args, std::cout, std::cerr);
}
