#include <iostream>
#include <string>
#include <vector>

#include "qkemp/cli.hpp"

int main(int argc, char** argv) {
    std::vector<std::string> args(argv + 1, argv + argc);
    return qkemp::cli::run(args, std::cout, std::cerr);
}
