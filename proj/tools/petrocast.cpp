#include <iostream>

#include "petrocast/cli.hpp"

int main(int argc, char** argv) {
    return petrocast::cli_main(argc, argv, std::cout, std::cerr);
}
