#include <iostream>

#include "bnfstab/cli.hpp"

int main(int argc, char** argv) {
  return bnfstab::cli::run({argv + 1, argv + argc}, std::cout, std::cerr);
}
