#include <vector>

#include "kfv/runner.hpp"

int main(int argc, char** argv) {
    return kfv::cli_main(std::vector<std::string>(argv + 1, argv + argc));
}
