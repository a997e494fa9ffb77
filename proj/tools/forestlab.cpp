#include <string>
#include <vector>

#include "forestlab/cli.hpp"

int main(int argc, char** argv) {
    std::vector<std::string> args(argv + 1, argv + argc);
    return forestlab::run_cli(args);
}
