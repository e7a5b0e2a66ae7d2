// graphconc: run seeded random-matrix experiments from a JSON config.
//   graphconc run <config> [--seed N] [--trials N] [--out PATH] [--emit-plot-data]
//   graphconc validate <config> [--seed N] [--trials N]
// Exit codes: 0 success, 2 config error, 3 I/O error, 1 anything else.

#include <CLI11.hpp>

#include <cstdint>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <optional>
#include <string>

#include "graphconc/cli/config.hpp"
#include "graphconc/cli/experiments.hpp"

namespace {

namespace cli = graphconc::cli;
namespace fs = std::filesystem;

constexpr int kOk = 0;
constexpr int kFailure = 1;
constexpr int kConfigError = 2;
constexpr int kIoError = 3;

struct Overrides {
  std::optional<std::uint64_t> seed;
  std::optional<std::size_t> trials;
};

int exit_code_for(const graphconc::Error& e) {
  switch (e.code()) {
    case graphconc::Errc::IoError: return kIoError;
    case graphconc::Errc::ConfigError:
    case graphconc::Errc::InvalidParameter: return kConfigError;
    default: return kFailure;
  }
}

// Loads, overrides and checks a config; prints diagnostics to stderr.
int load(const std::string& path, const Overrides& ov, cli::ParseResult& out) {
  cli::json doc;
  try {
    doc = cli::read_config_file(path);
  } catch (const graphconc::Error& e) {
    std::cerr << "graphconc: " << e.what() << '\n';
    return exit_code_for(e);
  }
  if (doc.is_object()) {
    if (ov.seed) doc["master_seed"] = *ov.seed;
    if (ov.trials) doc["trials"] = *ov.trials;
  }
  out = cli::parse_config(doc, fs::path(path).parent_path());
  bool io = false;
  for (const auto& d : out.diagnostics) {
    std::cerr << d.str() << '\n';
    io = io || (d.io && d.severity == cli::Diagnostic::Severity::Error);
  }
  if (!out.config) return io ? kIoError : kConfigError;
  return kOk;
}

int cmd_validate(const std::string& path, const Overrides& ov) {
  cli::ParseResult parsed;
  const int rc = load(path, ov, parsed);
  if (rc == kOk) std::cout << "ok\n";
  return rc;
}

int cmd_run(const std::string& path, const Overrides& ov, const std::optional<std::string>& out_flag,
            bool plot_data) {
  cli::ParseResult parsed;
  if (const int rc = load(path, ov, parsed); rc != kOk) return rc;
  const auto& config = *parsed.config;
  const auto out_path = out_flag ? out_flag : config.output_path;
  if (plot_data && !out_path) {
    std::cerr << "graphconc: --emit-plot-data needs an output path (--out or output_path)\n";
    return kConfigError;
  }

  cli::CsvReport report = cli::empty_report(config.experiment);
  try {
    report = cli::run(config);
  } catch (const graphconc::Error& e) {
    std::cerr << "graphconc: " << e.what() << '\n';
    return exit_code_for(e);
  }

  if (out_path) {
    std::ofstream f(*out_path, std::ios::binary);
    if (f) report.write(f);
    if (!f) {
      std::cerr << "graphconc: cannot write " << *out_path << '\n';
      return kIoError;
    }
    if (plot_data) {
      const std::string plot_path = fs::path(*out_path).replace_extension(".plot.csv").string();
      std::ofstream pf(plot_path, std::ios::binary);
      if (pf) report.write_long(pf, cli::experiment_name(config.experiment));
      if (!pf) {
        std::cerr << "graphconc: cannot write " << plot_path << '\n';
        return kIoError;
      }
    }
  } else {
    report.write(std::cout);
  }

  std::ostream& human = out_path ? std::cout : std::cerr;
  human << cli::experiment_name(config.experiment) << ": " << report.rows().size() << " rows";
  if (out_path) human << " -> " << *out_path;
  human << '\n';
  for (const auto& [metric, value] : report.summary()) human << "  " << metric << " = " << value << '\n';
  return kOk;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Seeded experiments on random graphs, matrix martingales and kernel operators."};
  app.require_subcommand(1);
  app.footer(cli::schema_help());

  std::string config_path;
  Overrides ov;
  std::optional<std::string> out;
  bool plot_data = false;

  auto add_overrides = [&](CLI::App* sub) {
    sub->add_option("config", config_path, "experiment config (JSON)")->required();
    sub->add_option("--seed", ov.seed, "override master_seed");
    sub->add_option("--trials", ov.trials, "override trials")->check(CLI::PositiveNumber);
  };
  auto* run = app.add_subcommand("run", "run the experiment and write its CSV report");
  add_overrides(run);
  run->add_option("--out", out, "CSV output path (default: output_path, else stdout)");
  run->add_flag("--emit-plot-data", plot_data, "also write tidy long-format <out>.plot.csv");
  auto* validate = app.add_subcommand("validate", "check a config and print diagnostics");
  add_overrides(validate);

  try {
    app.parse(argc, argv);
  } catch (const CLI::CallForHelp& e) {
    return app.exit(e);
  } catch (const CLI::ParseError& e) {
    app.exit(e);
    return kConfigError;
  }

  try {
    if (*run) return cmd_run(config_path, ov, out, plot_data);
    return cmd_validate(config_path, ov);
  } catch (const std::exception& e) {
    std::cerr << "graphconc: " << e.what() << '\n';
    return kFailure;
  }
}
