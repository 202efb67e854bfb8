#include <iostream>

#include "labner/cli.h"

int main(int argc, char **argv) {
  return labner::Run(argc, argv, std::cout, std::cerr);
}
