#ifndef DETSCHED_FAIRNESS_HPP
#define DETSCHED_FAIRNESS_HPP

#include <functional>
#include <optional>
#include <string>
#include <variant>
#include <vector>

#include <Eigen/Dense>

#include "detsched/coverage.hpp"
#include "detsched/geometry.hpp"
#include "detsched/kernel.hpp"

namespace detsched {

struct FixedAloha {
  double p = 0.5;
};

struct AdaptiveAloha {
  Eigen::VectorXd p;
};

struct LEnsembleSpec {
  SymmetricKernel S;
  QualityVector q;
};

/// Every scheduler family lowers to a marginal kernel: diag(p) for the two
/// Aloha variants, marginal_from_L(build_L(S,q)) for the L-ensemble.
using SchedulerSpec = std::variant<FixedAloha, AdaptiveAloha, LEnsembleSpec>;

SymmetricKernel lower_to_marginal(const SchedulerSpec& spec, int n);

struct OptimizerSettings {
  int max_iterations = 2000;
  double gradient_step = 1e-6;   // central finite-difference half-step
  double initial_step = 0.1;
  double utility_tolerance = 1e-9;
  double w_min = -20;
  double w_max = 20;
  std::optional<std::string> trace_path;  // optimizer trace CSV when set
};

/// Proportional-fairness utility U = sum_i log(R0 * P_i(tau)); -inf when
/// any link has zero throughput.
double utility(const SchedulerSpec& spec, const Network& net,
               const SinrParams& p, double R0);

/// Same utility through the eigenvalues of each coverage matrix K_{x_i}(tau):
/// U = n*log R0 + sum_i sum_j log lambda_{i,j}.
double utility_eigen(const SchedulerSpec& spec, const Network& net,
                     const SinrParams& p, double R0);

struct ScalarOptResult {
  double p = 0;
  double utility = 0;
};

struct VectorOptResult {
  Eigen::VectorXd p;
  double utility = 0;
};

struct LEnsembleOptResult {
  QualityVector q;
  double utility = 0;
  std::vector<bool> bound_active;
  int iterations = 0;
};

/// Golden-section search over log p, refined to |delta p| < 1e-9.
ScalarOptResult optimize_fixed_aloha(const Network& net, const SinrParams& p,
                                     double R0,
                                     const OptimizerSettings& settings);

/// optimize_lensemble with S = I, converted back through
/// p_i = q_i^2 / (1 + q_i^2).
VectorOptResult optimize_adaptive_aloha(const Network& net,
                                        const SinrParams& p, double R0,
                                        const OptimizerSettings& settings);

/// Gradient ascent on w = log q (concave objective): central-difference
/// gradient, backtracking line search, box bounds [w_min, w_max].
LEnsembleOptResult optimize_lensemble(const Network& net,
                                      const SymmetricKernel& S,
                                      const SinrParams& p, double R0,
                                      const OptimizerSettings& settings);

struct FeatureModel {
  Eigen::VectorXd theta;
  std::function<Eigen::VectorXd(const Network&, int)> feature_fn;
};

/// Default feature vector (1, min_{j != i} |x_i - y_j|) over receivers;
/// n = 1 substitutes the window diagonal for the empty minimum.
Eigen::VectorXd extract_features(const Network& net, int i);

/// q_i = exp(theta . f(x_i)).
QualityVector quality_from_features(const FeatureModel& model,
                                    const Network& net);

}  // namespace detsched

#endif
