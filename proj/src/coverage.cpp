#include "detsched/coverage.hpp"

#include <algorithm>
#include <cmath>
#include <fstream>
#include <stdexcept>

#include <boost/math/quadrature/gauss_kronrod.hpp>

#include "detsched/csv.hpp"
#include "detsched/errors.hpp"

namespace detsched {

namespace {
constexpr double kInclusionFloor = 1e-12;

// det(I - M) for M with spectrum in [0,1]; eigenvalues clamped so the
// result stays in [0,1].
double det_complement(const Eigen::MatrixXd& m) {
  if (m.rows() == 0) return 1.0;
  Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> es(m);
  if (es.info() != Eigen::Success)
    throw NumericFailure("eigendecomposition failed in coverage determinant");
  double det = 1.0;
  for (double lam : es.eigenvalues()) {
    if (lam < -1e-9 || lam > 1 + 1e-9)
      throw NumericFailure("scaled Palm kernel eigenvalue outside [0,1]");
    det *= 1.0 - std::clamp(lam, 0.0, 1.0);
  }
  return det;
}
}  // namespace

double h_func(double s, double r, const SinrParams& p,
              const PathLossModel& model) {
  if (r <= 0) throw std::invalid_argument("h_func: link distance must be > 0");
  if (s < 0) throw std::invalid_argument("h_func: negative distance");
  if (model.kind == PathLossKind::SingularPowerLaw) {
    // u/(u+tau) with u = (s/r)^beta; written to stay finite at s = 0.
    double u = std::pow(s / r, model.beta);
    return u / (u + p.tau);
  }
  return 1.0 / (1.0 + p.tau * model.gain(s) / model.gain(r));
}

double w_func(double r, const SinrParams& p, const PathLossModel& model) {
  if (r <= 0) throw std::invalid_argument("w_func: link distance must be > 0");
  if (p.noise == 0) return 1.0;
  return std::exp(-p.tau * (p.noise / p.fading_mean) / model.gain(r));
}

CoverageEvaluator::CoverageEvaluator(const Network& net, const SinrParams& p)
    : n_(net.size()), h_(net.size(), net.size()), w_(net.size()) {
  for (int i = 0; i < n_; ++i) {
    double r = link_distance(net, i);
    w_[i] = w_func(r, p, net.pathloss());
    h_(i, i) = 0;
    for (int j = 0; j < n_; ++j) {
      if (j == i) continue;
      h_(i, j) = h_func(cross_distance(net, j, i), r, p, net.pathloss());
    }
  }
}

double CoverageEvaluator::conditional(const Eigen::MatrixXd& K, int i) const {
  if (i < 0 || i >= n_) throw std::invalid_argument("link index out of range");
  if (K(i, i) <= kInclusionFloor)
    throw PalmUndefined("conditional coverage of a never-selected point");

  // Palm-reduce at i and scale by sqrt(1-h) in one pass.
  Eigen::MatrixXd m(n_ - 1, n_ - 1);
  for (int j = 0, a = 0; j < n_; ++j) {
    if (j == i) continue;
    double sa = std::sqrt(1.0 - h_(i, j));
    for (int k = 0, b = 0; k < n_; ++k) {
      if (k == i) continue;
      double sb = std::sqrt(1.0 - h_(i, k));
      m(a, b) = sa * sb * (K(j, k) - K(j, i) * K(k, i) / K(i, i));
      ++b;
    }
    ++a;
  }
  return std::clamp(det_complement(m) * w_[i], 0.0, 1.0);
}

double CoverageEvaluator::coverage(const Eigen::MatrixXd& K, int i) const {
  if (i < 0 || i >= n_) throw std::invalid_argument("link index out of range");
  if (K(i, i) <= kInclusionFloor) return 0.0;
  return K(i, i) * conditional(K, i);
}

Eigen::MatrixXd CoverageEvaluator::coverage_matrix(const Eigen::MatrixXd& K,
                                                   int i) const {
  if (i < 0 || i >= n_) throw std::invalid_argument("link index out of range");
  Eigen::MatrixXd out = Eigen::MatrixXd::Zero(n_, n_);
  out(i, i) = w_[i] * K(i, i);
  if (n_ == 1) return out;
  double kii = K(i, i);
  for (int j = 0, a = 0; j < n_; ++j) {
    if (j == i) continue;
    double sa = std::sqrt(1.0 - h_(i, j));
    for (int k = 0, b = 0; k < n_; ++k) {
      if (k == i) continue;
      double palm = kii > kInclusionFloor
                        ? K(j, k) - K(j, i) * K(k, i) / kii
                        : K(j, k);
      out(j, k) = (a == b ? 1.0 : 0.0) - sa * std::sqrt(1.0 - h_(i, k)) * palm;
      ++b;
    }
    ++a;
  }
  return out;
}

double conditional_coverage(const SymmetricKernel& K, const Network& net,
                            int i, const SinrParams& p) {
  return CoverageEvaluator(net, p).conditional(K.matrix(), i);
}

double coverage_prob(const SymmetricKernel& K, const Network& net, int i,
                     const SinrParams& p) {
  return CoverageEvaluator(net, p).coverage(K.matrix(), i);
}

Eigen::MatrixXd coverage_matrix(const SymmetricKernel& K, const Network& net,
                                int i, const SinrParams& p) {
  return CoverageEvaluator(net, p).coverage_matrix(K.matrix(), i);
}

double throughput_constant(double cov, double R0) {
  if (R0 <= 0) throw std::invalid_argument("R0 must be > 0");
  if (cov < 0 || cov > 1)
    throw std::invalid_argument("coverage must lie in [0,1]");
  return R0 * cov;
}

RateFunction RateFunction::shannon(double C) {
  if (C <= 0) throw std::invalid_argument("Shannon rate constant must be > 0");
  return {[C](double t) { return C * std::log1p(t); },
          [C](double v) { return std::expm1(v / C); }};
}

double throughput_variable(const SymmetricKernel& K, const Network& net,
                           int i, const SinrParams& p,
                           const RateFunction& rate_fn) {
  if (!rate_fn.value || !rate_fn.inverse)
    throw std::invalid_argument("rate function must provide value and inverse");
  auto integrand = [&](double v) {
    SinrParams pv = p;
    pv.tau = rate_fn.inverse(v);
    if (pv.tau <= 0) pv.tau = 1e-300;
    return CoverageEvaluator(net, pv).coverage(K.matrix(), i);
  };

  double peak = integrand(1e-8);
  if (peak <= 0) return 0.0;

  // Grow the window until the tail is negligible; past the cap the variable
  // rate integral is treated as divergent.
  constexpr double kCap = 1e6;
  double v_max = 1.0;
  while (integrand(v_max) > 1e-10 * peak) {
    v_max *= 2;
    if (v_max > kCap)
      throw DivergingIntegral("variable-rate integral does not decay");
  }
  return boost::math::quadrature::gauss_kronrod<double, 15>::integrate(
      integrand, 0.0, v_max, 15, 1e-6);
}

double cardinality_rate(double peak, CardinalityCase g_case, int m) {
  if (peak <= 0) throw std::invalid_argument("peak rate must be > 0");
  if (m < 1) throw std::invalid_argument("cardinality must be >= 1");
  switch (g_case) {
    case CardinalityCase::Separate:
      return peak;
    case CardinalityCase::RoundRobin:
      return peak / m;
    case CardinalityCase::Opportunistic: {
      double harmonic = 0;
      for (int k = 1; k <= m; ++k) harmonic += 1.0 / k;
      return peak * harmonic / m;
    }
  }
  throw std::logic_error("unknown cardinality case");
}

CoverageReport coverage_report(const SymmetricKernel& K, const Network& net,
                               const SinrParams& p, double R0) {
  CoverageEvaluator eval(net, p);
  CoverageReport report;
  for (int i = 0; i < net.size(); ++i) {
    LinkRecord rec;
    rec.link = i;
    rec.inclusion = K(i, i);
    rec.conditional =
        K(i, i) > kInclusionFloor ? eval.conditional(K.matrix(), i) : 0.0;
    rec.coverage = K(i, i) > kInclusionFloor ? rec.inclusion * rec.conditional
                                             : 0.0;
    rec.throughput = throughput_constant(rec.coverage, R0);
    report.links.push_back(rec);
  }
  return report;
}

void write_coverage_csv(const CoverageReport& report,
                        const std::string& path) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw std::runtime_error("cannot write " + path);
  out << "link,inclusion,conditional,coverage,throughput\n";
  for (const auto& r : report.links) {
    out << r.link << "," << format_sig(r.inclusion, 12) << ","
        << format_sig(r.conditional, 12) << "," << format_sig(r.coverage, 12)
        << "," << format_sig(r.throughput, 12) << "\n";
  }
}

}  // namespace detsched
