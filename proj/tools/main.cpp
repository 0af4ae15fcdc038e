#include <vector>

#include "handpose/cli.hpp"

int main(int argc, char** argv) {
    std::vector<std::string> args(argv + 1, argv + argc);
    return handpose::run_cli(args);
}
