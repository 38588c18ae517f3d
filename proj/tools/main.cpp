#include <string>
#include <vector>

#include "cli.hpp"

int main(int argc, char** argv) {
    return o3cp1::cli::run_cli(std::vector<std::string>(argv, argv + argc));
}
