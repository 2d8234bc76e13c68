#ifndef DETSCHED_EXPERIMENT_HPP
#define DETSCHED_EXPERIMENT_HPP

#include <cstdint>
#include <string>
#include <vector>

#include "detsched/fairness.hpp"
#include "detsched/geometry.hpp"

namespace detsched {

/// One self-describing experiment run; defaults reproduce the reference
/// numerical setup (tau=10, beta=4, bounded path loss, r_max=0.1, sigma=10,
/// unit window).
struct ExperimentConfig {
  std::uint64_t seed = 1;
  int n_pairs = 5;
  int realizations = 100;
  double window = 1.0;
  double r_max = 0.1;
  double tau = 10.0;
  double beta = 4.0;
  double kappa = 1.0;  // singular law only
  std::string pathloss_kind = "bounded";
  double noise = 0.0;
  double fading_mean = 1.0;
  double sigma = 10.0;
  double R0 = 1.0;
  OptimizerSettings optimizer;
  std::vector<std::string> schedulers = {"fixed", "adaptive", "determinantal"};
  std::string output_dir = "out";

  void validate() const;
  PathLossModel pathloss() const;
  SinrParams sinr_params() const;

  static ExperimentConfig from_json_text(const std::string& text);
  static ExperimentConfig from_file(const std::string& path);
  std::string to_json_text() const;
};

// Command backends; return process exit codes (0 ok, 1 verification
// failure, 2 invalid config).
int cmd_gen(const ExperimentConfig& cfg);
int cmd_compare(const ExperimentConfig& cfg);
int cmd_verify(const ExperimentConfig& cfg, bool tamper_h = false);
int cmd_sample(const ExperimentConfig& cfg, const std::string& kernel_path,
               long count, std::uint64_t seed);

}  // namespace detsched

#endif
