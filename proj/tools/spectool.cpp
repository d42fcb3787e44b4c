#include <iostream>
#include <string>
#include <vector>

#include <spectool/cli.hpp>

int main(int argc, char** argv) {
  std::vector<std::string> args(argv + 1, argv + argc);
  try {
    return spectool::cli::main_entry(args, std::cout, std::cerr);
  } catch (const std::exception& e) {
    std::cerr << "spectool: " << e.what() << "\n";
    return spectool::cli::exit_io;
  }
}
