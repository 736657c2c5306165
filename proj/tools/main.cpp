#include <unistd.h>

#include <cstdlib>
#include <iostream>
#include <string>
#include <vector>

#include "drmine/cli.hpp"

int main(int argc, char** argv) {
    std::vector<std::string> args(argv, argv + argc);
    const bool color = ::isatty(STDERR_FILENO) && std::getenv("NO_COLOR") == nullptr;
    return drmine::cli::dispatch(args, std::cout, std::cerr, color);
}
