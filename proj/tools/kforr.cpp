#include <iostream>

#include "kforr/cli.hpp"

int main(int argc, char** argv) {
    return kforr::cli::run_cli(argc, argv, std::cout, std::cerr);
}
