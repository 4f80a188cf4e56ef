#include <string>
#include <vector>

#include "ultraperc/runner.hpp"

int main(int argc, char** argv) {
    return ultraperc::cli::run(std::vector<std::string>(argv + 1, argv + argc));
}
