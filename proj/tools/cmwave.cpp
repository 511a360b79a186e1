// cmwave: simulate and verify continuously measured Gaussian wave packets.
//
//   cmwave simulate <config>    write the requested outputs
//   cmwave verify <config>      run the residual and oracle checks (exit 3 on failure)
//   cmwave print-defaults       print a config document with every default
//
// CMWAVE_OUTPUT_DIR overrides output_dir from the config.

#include <cstdlib>
#include <fstream>
#include <iostream>
#include <sstream>

#include "CLI11.hpp"
#include "cmwave/runner.hpp"

namespace {

bool read_document(const std::string& path, std::string& text) {
  if (path == "-") {
    std::ostringstream s;
    s << std::cin.rdbuf();
    text = s.str();
    return true;
  }
  std::ifstream f(path, std::ios::binary);
  if (!f) return false;
  std::ostringstream s;
  s << f.rdbuf();
  text = s.str();
  return true;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Continuous-measurement Gaussian wave packet simulator"};
  app.require_subcommand(1);

  std::string sim_path, verify_path, out_dir;
  auto* simulate = app.add_subcommand("simulate", "Run a configuration and write its outputs");
  simulate->add_option("config", sim_path, "Config file ('-' for stdin)")->required();
  simulate->add_option("-o,--output-dir", out_dir, "Output directory (overrides config and env)");
  auto* verify = app.add_subcommand("verify", "Run the verification suite for a configuration");
  verify->add_option("config", verify_path, "Config file ('-' for stdin)")->required();
  verify->add_option("-o,--output-dir", out_dir, "Output directory (overrides config and env)");
  auto* defaults = app.add_subcommand("print-defaults", "Print the default configuration");

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e);
    return code == 0 ? 0 : 2;
  }

  if (defaults->parsed()) {
    std::cout << cmwave::default_config_text();
    return 0;
  }

  const bool verifying = verify->parsed();
  const std::string& path = verifying ? verify_path : sim_path;
  std::string text;
  if (!read_document(path, text)) {
    std::cerr << "error: cannot read config '" << path << "'\n";
    return 2;
  }
  if (out_dir.empty()) {
    if (const char* env = std::getenv("CMWAVE_OUTPUT_DIR"); env && *env) out_dir = env;
  }
  return cmwave::run_document(text, verifying ? cmwave::RunMode::Verify : cmwave::RunMode::Simulate,
                              out_dir, std::cout, std::cerr);
}
