#include <iostream>
#include <string>
#include <vector>

#include "cpt/cli.hpp"
#include "cpt/config.hpp"

int main(int argc, char** argv) {
  std::vector<std::string> args(argv + 1, argv + argc);
  cpt::RunConfig cfg;
  try {
    cfg = cpt::parse_config(args);
  } catch (const cpt::HelpRequested& help) {
    std::cout << help.text;
    return cpt::exit_ok;
  } catch (const cpt::ConfigError& e) {
    std::cerr << cpt::error_json("config", e.what(), cpt::exit_config) << '\n';
    return cpt::exit_config;
  }
  return cpt::execute(cfg, std::cerr);
}
