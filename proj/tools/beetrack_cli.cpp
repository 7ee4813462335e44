#include "beetrack/cli.hpp"

#include <iostream>

int main(int argc, char** argv) {
    return beetrack::run_cli(argc, argv, std::cout, std::cerr);
}
