#include <iostream>

#include "dlt/commands.hpp"

int main(int argc, char **argv) {
    return dlt::run_cli(argc, argv, std::cin, std::cout, std::cerr);
}
