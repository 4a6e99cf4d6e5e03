#include <CLI11.hpp>
#include <fstream>
#include <iostream>
#include <map>

#include "thermo/cli.hpp"
#include "thermo/error.hpp"

namespace {

void write_file(const std::string& path, const std::string& content) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw thermo::ConfigError("cannot write '" + path + "'");
  out << content;
}

const std::map<std::string, std::string> kHelp = {
    {"pressure", "pressure of phi with a certified bracket"},
    {"dimension", "metric dimension of the shift under psi"},
    {"tau", "tau(z, alpha) at one point"},
    {"spectrum", "D(alpha) on a grid, with witnesses"},
    {"count", "counting estimates of the spectrum"},
    {"localized", "dimension of a localized level set"},
    {"fixed-points", "fixed-point average dimension of an IFS"},
    {"attractor", "point cloud of an IFS attractor"},
    {"gibbs-spectrum", "local dimension spectrum of a Gibbs measure"},
    {"check", "invariant checks on the configured system"},
};

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Multifractal spectra of Birkhoff averages on subshifts of finite type", "thermospec"};
  app.set_version_flag("--version", thermo::cli::kVersion);
  app.require_subcommand(1);

  std::string config_path, out_path, plot_path;
  thermo::cli::Overrides overrides;
  int threads = 0;
  std::uint64_t seed = 0;
  double tol = 0.0;
  for (const std::string& name : thermo::cli::commands()) {
    CLI::App* sub = app.add_subcommand(name, kHelp.count(name) ? kHelp.at(name) : "");
    sub->add_option("--config", config_path, "INI run description")->required();
    sub->add_option("--out", out_path, "CSV destination (stdout when omitted)");
    sub->add_option("--plot", plot_path, "SVG destination");
    sub->add_option("--threads", threads, "worker threads");
    sub->add_option("--seed", seed, "random seed");
    sub->add_option("--tol", tol, "root-finding tolerance");
  }

  try {
    app.parse(argc, argv);
  } catch (const CLI::Success& e) {
    return app.exit(e);
  } catch (const CLI::ParseError& e) {
    app.exit(e);
    return static_cast<int>(thermo::ErrorKind::config);
  }

  CLI::App* sub = app.get_subcommands().front();
  if (sub->count("--threads")) overrides.threads = threads;
  if (sub->count("--seed")) overrides.seed = seed;
  if (sub->count("--tol")) overrides.tol = tol;

  try {
    const auto config = thermo::cli::RunConfig::load(config_path, overrides);
    const auto art = thermo::cli::run(sub->get_name(), config);
    if (out_path.empty())
      std::cout << art.csv;
    else
      write_file(out_path, art.csv);
    if (!plot_path.empty() && !art.svg.empty()) {
      try {
        write_file(plot_path, art.svg);
      } catch (const std::exception& e) {
        std::cerr << "plot skipped: " << e.what() << '\n';
      }
    }
    return art.ok ? 0 : 1;
  } catch (const std::exception& e) {
    return thermo::cli::report_error(e, std::cerr);
  }
}
