#include <iostream>
#include <string>
#include <vector>

#include "social_learning/cli.hpp"

int main(int argc, char** argv) {
    return social_learning::run_cli(std::vector<std::string>(argv + 1, argv + argc), std::cout, std::cerr);
}
