#include <cstdint>
#include <iostream>
#include <stdexcept>
#include <string>

#include <CLI11.hpp>

#include "detsched/errors.hpp"
#include "detsched/experiment.hpp"

namespace {

struct CommonOpts {
  std::string config_path;
  std::optional<std::uint64_t> seed;
  std::optional<int> n_pairs;
  std::optional<double> tau;
  std::optional<double> sigma;
  std::optional<int> realizations;
  std::optional<std::string> out;
};

void add_common(CLI::App* cmd, CommonOpts& o) {
  cmd->add_option("--config", o.config_path, "experiment config JSON");
  cmd->add_option("--seed", o.seed, "override config seed");
  cmd->add_option("--n-pairs", o.n_pairs, "override number of pairs");
  cmd->add_option("--tau", o.tau, "override SINR threshold");
  cmd->add_option("--sigma", o.sigma, "override Gaussian kernel scale");
  cmd->add_option("--realizations", o.realizations,
                  "override realization count");
  cmd->add_option("--out", o.out, "override output directory");
}

detsched::ExperimentConfig resolve(const CommonOpts& o) {
  detsched::ExperimentConfig cfg;
  if (!o.config_path.empty())
    cfg = detsched::ExperimentConfig::from_file(o.config_path);
  if (o.seed) cfg.seed = *o.seed;
  if (o.n_pairs) cfg.n_pairs = *o.n_pairs;
  if (o.tau) cfg.tau = *o.tau;
  if (o.sigma) cfg.sigma = *o.sigma;
  if (o.realizations) cfg.realizations = *o.realizations;
  if (o.out) cfg.output_dir = *o.out;
  return cfg;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Determinantal MAC scheduling for bi-pole SINR networks"};
  app.require_subcommand(1);

  CommonOpts gen_o, cmp_o, ver_o, smp_o;
  auto* gen = app.add_subcommand("gen", "generate a seeded network JSON");
  add_common(gen, gen_o);
  auto* cmp = app.add_subcommand(
      "compare", "optimize all schedulers over seeded realizations");
  add_common(cmp, cmp_o);
  auto* ver = app.add_subcommand(
      "verify", "cross-check determinant formulas against oracles");
  add_common(ver, ver_o);
  bool tamper_h = false;
  ver->add_flag("--tamper-h", tamper_h, "negative-control hook")
      ->group("");  // hidden
  auto* smp = app.add_subcommand("sample", "draw scheduler subsets");
  add_common(smp, smp_o);
  std::string kernel_path;
  long count = 100;
  smp->add_option("--kernel", kernel_path, "kernel dump CSV to sample from");
  smp->add_option("--count", count, "number of subsets to draw");

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    int rc = app.exit(e);
    return rc == 0 ? 0 : 2;
  }

  try {
    if (gen->parsed()) return detsched::cmd_gen(resolve(gen_o));
    if (cmp->parsed()) return detsched::cmd_compare(resolve(cmp_o));
    if (ver->parsed()) return detsched::cmd_verify(resolve(ver_o), tamper_h);
    if (smp->parsed()) {
      auto cfg = resolve(smp_o);
      return detsched::cmd_sample(cfg, kernel_path, count,
                                  smp_o.seed.value_or(cfg.seed));
    }
  } catch (const std::invalid_argument& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 2;
  } catch (const detsched::SizeLimit& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 2;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 1;
  }
  return 2;
}
