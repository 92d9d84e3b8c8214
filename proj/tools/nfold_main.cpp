#include <fstream>
#include <iostream>
#include <string>

#include <CLI11.hpp>

#include "nfold/commands.hpp"

namespace {

bool write_file(const std::string& path, const std::string& text) {
  if (path == "-") {
    std::cout << text;
    return true;
  }
  std::ofstream out(path);
  if (!out) {
    std::cerr << "nfold: cannot write '" << path << "'\n";
    return false;
  }
  out << text;
  return static_cast<bool>(out);
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"N-fold supersymmetry toolkit: verify intertwining models, compute quasi-solvable spectra, "
               "certify coupling structure, and count kernel states"};
  app.require_subcommand(1);

  nfold::CommandOptions opt;
  std::string model_path;
  std::string json_path;
  std::string csv_path;
  std::string plot_path;
  std::optional<double> tol;
  std::optional<int> levels;
  std::optional<int> grid;

  auto common = [&](CLI::App* sub) {
    sub->add_option("model", model_path, "Model file")->required();
    sub->add_option("--tol", tol, "Main tolerance of the command");
    sub->add_option("--seed", opt.seed, "Sampling seed (recorded in the report)");
    sub->add_option("--json", json_path, "Write the JSON report to PATH ('-' for stdout)");
    sub->add_option("--csv", csv_path, "Write the CSV table to PATH");
    sub->add_option("--plot-data", plot_path, "Write gnuplot-ready data blocks to PATH");
  };
  auto* verify = app.add_subcommand("verify", "Check the type A condition and the intertwining relations");
  common(verify);
  auto* spectrum = app.add_subcommand("spectrum", "Algebraic roots versus the finite-difference spectrum");
  common(spectrum);
  spectrum->add_option("--branch", opt.branch, "minus, plus or both")
      ->check(CLI::IsMember({"minus", "plus", "both"}));
  spectrum->add_option("--levels", levels, "Grid levels per branch")->check(CLI::PositiveNumber);
  spectrum->add_option("--grid", grid, "Grid points")->check(CLI::Range(64, 1 << 22));
  auto* certify = app.add_subcommand("certify-g", "Certify the coupling structure of the S-matrix");
  common(certify);
  auto* index = app.add_subcommand("index", "Kernel-counting index n- - n+");
  common(index);

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e);
    return code == 0 ? 0 : nfold::exit_input;
  }
  opt.tol = tol;
  opt.levels = levels;
  opt.grid = grid;

  const std::string command = app.get_subcommands().front()->get_name();
  const nfold::CommandResult res = nfold::run_command(command, model_path, opt);

  const bool json_to_stdout = json_path == "-";
  if (res.exit_code == nfold::exit_input) {
    std::cerr << "nfold " << res.summary;
  } else if (!json_to_stdout) {
    std::cout << res.summary;
  }
  bool ok = true;
  if (!json_path.empty()) ok = write_file(json_path, res.report.dump(2) + "\n") && ok;
  if (!csv_path.empty() && !res.csv.empty()) ok = write_file(csv_path, res.csv) && ok;
  if (!plot_path.empty() && !res.plot.empty()) ok = write_file(plot_path, res.plot) && ok;
  if (!ok) return nfold::exit_input;
  return res.exit_code;
}
