#include <string>
#include <vector>

#include "bridgewalk/cli.hpp"

int main(int argc, char** argv) {
    std::vector<std::string> args(argv + 1, argv + argc);
    return bridgewalk::run_command(args);
}
