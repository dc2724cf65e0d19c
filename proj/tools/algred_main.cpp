#include <iostream>
#include <optional>
#include <string>

#include "CLI11.hpp"
#include "algred/pipeline.hpp"

namespace {

void add_common(CLI::App* cmd, algred::RunOptions& opt, std::optional<std::string>& json) {
  cmd->add_option("--samples", opt.samples, "Number of sample points (center plus Halton points)");
  cmd->add_option("--seed", opt.seed, "Halton index offset");
  cmd->add_option("--box", opt.box, "Sampling box: lo:hi for all coordinates or x=lo:hi,y=lo:hi");
  cmd->add_option("--tol", opt.tol, "Residual tolerance");
  cmd->add_option("--rank-tol", opt.rank_tol, "Relative singular-value threshold for ranks");
  cmd->add_option("--json", json, "Write the JSON report to this path");
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Reduction checks for IM forms on Lie algebroids"};
  app.require_subcommand(1);

  algred::RunOptions opt;
  std::optional<std::string> json;
  std::string model_path, out_path;

  auto* check = app.add_subcommand("check", "Run every check on a model file");
  check->add_option("model", model_path, "Model file")->required();
  add_common(check, opt, json);

  auto* reduce = app.add_subcommand("reduce", "Write the quotient model when its prerequisites pass");
  reduce->add_option("model", model_path, "Model file")->required();
  reduce->add_option("--out", out_path, "Output model file")->required();
  add_common(reduce, opt, json);

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int rc = app.exit(e);
    return rc == 0 ? 0 : 2;
  }

  if (check->parsed()) return algred::cmd_check(model_path, opt, json, std::cout, std::cerr);
  return algred::cmd_reduce(model_path, opt, out_path, json, std::cout, std::cerr);
}
