// Batch driver: property-suite runner, eccentricity sweeps, chain experiments
// and mollifier moment dumps, all reading a JSON config and writing CSV.
//
// Exit codes: 0 pass, 1 property failure, 2 config error, 3 I/O error.

#include <fstream>
#include <iostream>

#include <CLI11.hpp>

#include "starforms/driver.hpp"

namespace {

starforms::json load_config(const std::string& path) {
  std::ifstream is(path);
  if (!is) throw starforms::ConfigError("cannot open config file '" + path + "'");
  starforms::json cfg;
  try {
    is >> cfg;
  } catch (const std::exception& e) {
    throw starforms::ConfigError(std::string("config parse error: ") + e.what());
  }
  return cfg;
}

void write_text(const std::string& path, const std::string& text) {
  std::ofstream os(path, std::ios::binary);
  if (!os) throw starforms::CsvIoError("cannot open '" + path + "' for writing");
  os << text;
  if (!os) throw starforms::CsvIoError("write to '" + path + "' failed");
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"homotopy operators on star-shaped domains: verification and sweeps"};
  app.require_subcommand(1);

  std::string config_path, out_path;
  for (const char* name : {"verify", "sweep", "chain", "moments"}) {
    CLI::App* sub = app.add_subcommand(name);
    sub->add_option("--config", config_path, "JSON configuration file")->required();
    sub->add_option("--out", out_path, "output file (report or CSV)")->required();
  }

  CLI11_PARSE(app, argc, argv);
  std::string command = app.get_subcommands().front()->get_name();

  try {
    starforms::json cfg = load_config(config_path);
    if (command == "verify") {
      starforms::VerifyOutcome outcome = starforms::run_verify(cfg);
      write_text(out_path, outcome.report());
      for (const auto& line : outcome.lines)
        if (!line.pass)
          std::cerr << "FAIL " << line.name << ": residual " << line.residual << " > tolerance "
                    << line.tolerance << "\n";
      return outcome.all_pass ? 0 : 1;
    }
    starforms::CsvTable table;
    if (command == "sweep")
      table = starforms::run_sweep(cfg);
    else if (command == "chain")
      table = starforms::run_chain(cfg);
    else
      table = starforms::run_moments(cfg);
    starforms::emit_csv(table, out_path);
    return 0;
  } catch (const starforms::ConfigError& e) {
    std::cerr << "config error: " << e.what() << "\n";
    return 2;
  } catch (const starforms::CsvIoError& e) {
    std::cerr << "i/o error: " << e.what() << "\n";
    return 3;
  } catch (const std::invalid_argument& e) {
    std::cerr << "config error: " << e.what() << "\n";
    return 2;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 1;
  }
}
