#include <string>
#include <vector>

#include "sar/cli.hpp"

int main(int argc, char** argv) {
    std::vector<std::string> args(argv + 1, argv + argc);
    return sar::run_cli(args);
}
