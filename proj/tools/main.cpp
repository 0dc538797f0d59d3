#include <iostream>
#include <string>
#include <vector>

#include "biphoton/cli.hpp"

int main(int argc, char** argv) {
    return biphoton::cli::run_command(std::vector<std::string>(argv + 1, argv + argc), std::cout, std::cerr);
}
