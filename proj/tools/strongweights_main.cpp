#include "commands.hpp"

#include <iostream>

int main(int argc, char **argv)
{
  return sw::cli::run_cli(argc, argv, std::cout, std::cerr);
}
