#ifndef DETSCHED_COVERAGE_HPP
#define DETSCHED_COVERAGE_HPP

#include <functional>
#include <string>
#include <vector>

#include <Eigen/Dense>

#include "detsched/geometry.hpp"
#include "detsched/kernel.hpp"

namespace detsched {

struct SinrParams {
  double tau = 10.0;        // SINR threshold
  double noise = 0.0;       // W in the SINR denominator
  double fading_mean = 1.0; // exponential fading mean; rescales noise only
};

/// Per-interferer Rayleigh survival factor 1/(1 + tau*gain(s)/gain(r)).
/// For the singular power law this is exactly u/(u+tau) with u=(s/r)^beta.
/// Nondecreasing in s: a distant interferer is harmless (-> 1), an
/// interferer at the receiver is fatal (-> 0).
double h_func(double s, double r, const SinrParams& p,
              const PathLossModel& model);

/// Noise factor exp(-tau*(W/mu)/gain(r)); exp(-(tau*W)(kappa*r)^beta) for
/// the singular law. Equal to 1 when W = 0.
double w_func(double r, const SinrParams& p, const PathLossModel& model);

/// Precomputes the h/w geometry factors of one network so repeated coverage
/// evaluations (optimizer inner loop) only pay for linear algebra.
class CoverageEvaluator {
 public:
  CoverageEvaluator(const Network& net, const SinrParams& p);

  int size() const { return n_; }
  double noise_factor(int i) const { return w_[i]; }

  /// det(I - K!_{x_i}{h_{x_i}}) * W_{x_i}, the coverage given i scheduled.
  double conditional(const Eigen::MatrixXd& K, int i) const;

  /// [K]_ii * conditional; 0 when [K]_ii <= 1e-12 without Palm reduction.
  double coverage(const Eigen::MatrixXd& K, int i) const;

  /// Full-configuration coverage matrix K_{x_i}(tau); its determinant
  /// equals coverage(K, i).
  Eigen::MatrixXd coverage_matrix(const Eigen::MatrixXd& K, int i) const;

 private:
  int n_;
  Eigen::MatrixXd h_;    // h_(i, j) = h_{x_i}(x_j), interferer j at receiver i
  Eigen::VectorXd w_;    // w_[i] = w(|x_i - y_i|)
};

double conditional_coverage(const SymmetricKernel& K, const Network& net,
                            int i, const SinrParams& p);
double coverage_prob(const SymmetricKernel& K, const Network& net, int i,
                     const SinrParams& p);
Eigen::MatrixXd coverage_matrix(const SymmetricKernel& K, const Network& net,
                                int i, const SinrParams& p);

double throughput_constant(double cov, double R0);

/// Strictly increasing rate map with a known inverse; the default is the
/// Shannon form r(t) = C*log(1+t) with inverse exp(v/C)-1.
struct RateFunction {
  std::function<double(double)> value;
  std::function<double(double)> inverse;
  static RateFunction shannon(double C);
};

/// Integral of P_i(r^{-1}(v)) dv by adaptive quadrature (rel. tol 1e-6);
/// the upper limit doubles until the integrand falls below 1e-10 of its
/// peak, capped at 1e6 (DivergingIntegral past the cap).
double throughput_variable(const SymmetricKernel& K, const Network& net,
                           int i, const SinrParams& p,
                           const RateFunction& rate_fn);

enum class CardinalityCase { Separate, RoundRobin, Opportunistic };

/// peak * g(m): g=1 (separate), 1/m (round robin), (sum 1/k)/m
/// (opportunistic).
double cardinality_rate(double peak, CardinalityCase g_case, int m);

struct LinkRecord {
  int link = 0;
  double inclusion = 0;
  double conditional = 0;
  double coverage = 0;
  double throughput = 0;
};

struct CoverageReport {
  std::vector<LinkRecord> links;
};

CoverageReport coverage_report(const SymmetricKernel& K, const Network& net,
                               const SinrParams& p, double R0);
void write_coverage_csv(const CoverageReport& report, const std::string& path);

}  // namespace detsched

#endif
