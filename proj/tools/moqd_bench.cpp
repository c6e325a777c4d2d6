#include <iostream>
#include <string>
#include <vector>

#include "moqd/cli.hpp"

int main(int argc, char** argv) {
  std::vector<std::string> args(argv + 1, argv + argc);
  moqd::cli::CliInvocation invocation;
  try {
    invocation = moqd::cli::parse_config(args);
  } catch (const moqd::cli::HelpRequested& help) {
    std::cout << help.what();
    return 0;
  } catch (const moqd::ConfigError& e) {
    std::cerr << "usage error: " << e.what() << "\nrun with --help for the list of flags\n";
    return 2;
  }
  return moqd::cli::run_and_export(invocation.config, invocation.out_dir, std::cerr);
}
