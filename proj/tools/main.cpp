#include <iostream>
#include <string>
#include <vector>

#include "sacfem_cli/cli.hpp"

int main(int argc, char** argv) {
    return sacfem::cli::run(std::vector<std::string>(argv, argv + argc), std::cout, std::cerr);
}
