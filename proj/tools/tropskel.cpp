#include "tropskel/config.hpp"
#include "tropskel/errors.hpp"
#include "tropskel/pipeline.hpp"

#include <CLI11.hpp>

#include <iomanip>
#include <iostream>
#include <optional>

namespace {

constexpr int kExitPass = 0;
constexpr int kExitFail = 1;
constexpr int kExitInput = 2;

bool is_input_error(tropskel::ErrorKind kind) {
  using tropskel::ErrorKind;
  switch (kind) {
    case ErrorKind::ParseError:
    case ErrorKind::SchemaError:
    case ErrorKind::InvalidArgument:
    case ErrorKind::NonGenericHeights:
    case ErrorKind::NotStar:
    case ErrorKind::DegenerateQ:
    case ErrorKind::OriginNotInterior:
      return true;
    default:
      return false;
  }
}

void print_summary(const tropskel::RunReport& report, const std::string& out_dir) {
  std::cout << report.command << " on " << report.instance << "\n";
  for (const auto& c : report.checks) {
    std::cout << (c.pass ? "  PASS  " : "  FAIL  ") << c.name << ": " << std::setprecision(6) << c.measured << " "
              << c.relation << " " << c.threshold;
    if (!c.detail.empty()) std::cout << "  [" << c.detail << "]";
    std::cout << "\n";
  }
  std::cout << (report.pass() ? "verdict: PASS" : "verdict: FAIL") << "  (report in " << out_dir << ")\n";
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Lagrangian skeleta of tropically localized hypersurfaces"};
  std::string command;
  std::string config_path;
  std::optional<std::string> out_dir;
  std::optional<double> beta;
  std::optional<std::uint64_t> seed;
  app.add_option("subcommand", command, "one of: triangulate, amoeba, potential-check, critical, skeleton, verify")
      ->required()
      ->check(CLI::IsMember(tropskel::subcommands()));
  app.add_option("config", config_path, "JSON run configuration")->required();
  app.add_option("--out", out_dir, "output directory (overrides output.directory)");
  app.add_option("--beta", beta, "localization parameter (overrides instance.beta)")->check(CLI::PositiveNumber);
  app.add_option("--seed", seed, "random seed (overrides seed)");

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e);
    return code == 0 ? kExitPass : kExitInput;
  }

  try {
    tropskel::RunConfig config = tropskel::load_config(config_path);
    if (beta) config.instance.beta = *beta;
    if (seed) config.seed = *seed;
    const std::string dir = out_dir.value_or(config.output.directory);
    const auto report = tropskel::run_command(command, config, dir);
    print_summary(report, dir);
    return report.pass() ? kExitPass : kExitFail;
  } catch (const tropskel::Error& e) {
    std::cerr << "error: " << e.what() << "\n";
    return is_input_error(e.kind()) ? kExitInput : kExitFail;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << "\n";
    return kExitFail;
  }
}
