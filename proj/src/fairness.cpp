#include "detsched/fairness.hpp"

#include <algorithm>
#include <cmath>
#include <fstream>
#include <limits>
#include <numbers>
#include <stdexcept>

#include "detsched/csv.hpp"
#include "detsched/errors.hpp"

namespace detsched {

namespace {

constexpr double kNegInf = -std::numeric_limits<double>::infinity();

Eigen::MatrixXd diag_kernel(const Eigen::VectorXd& p) {
  for (double v : p) {
    if (v < 0 || v > 1)
      throw std::invalid_argument("Aloha probabilities must lie in [0,1]");
  }
  return Eigen::MatrixXd(p.asDiagonal());
}

// Utility evaluation reused thousands of times by the optimizers: the
// geometry factors are precomputed once, each call costs one
// eigendecomposition of L plus n coverage determinants.
class UtilityObjective {
 public:
  UtilityObjective(const Network& net, const Eigen::MatrixXd& similarity,
                   const SinrParams& p, double R0)
      : eval_(net, p), s_(similarity), log_r0_(std::log(R0)) {
    if (R0 <= 0) throw std::invalid_argument("R0 must be > 0");
  }

  double at_quality(const Eigen::VectorXd& q) const {
    Eigen::MatrixXd l = q.asDiagonal() * s_ * q.asDiagonal();
    Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> es(l);
    if (es.info() != Eigen::Success)
      throw NumericFailure("eigendecomposition failed in utility evaluation");
    Eigen::VectorXd lam = es.eigenvalues();
    for (int i = 0; i < lam.size(); ++i) {
      double v = std::max(0.0, lam[i]);
      lam[i] = v / (1.0 + v);
    }
    Eigen::MatrixXd k =
        es.eigenvectors() * lam.asDiagonal() * es.eigenvectors().transpose();
    return at_kernel(k);
  }

  double at_log_quality(const Eigen::VectorXd& w) const {
    return at_quality(w.array().exp());
  }

  double at_kernel(const Eigen::MatrixXd& k) const {
    double u = 0;
    for (int i = 0; i < eval_.size(); ++i) {
      double cov = eval_.coverage(k, i);
      if (cov <= 0) return kNegInf;
      u += log_r0_ + std::log(cov);
    }
    return u;
  }

 private:
  CoverageEvaluator eval_;
  Eigen::MatrixXd s_;
  double log_r0_;
};

}  // namespace

SymmetricKernel lower_to_marginal(const SchedulerSpec& spec, int n) {
  if (const auto* fixed = std::get_if<FixedAloha>(&spec)) {
    return SymmetricKernel(
        diag_kernel(Eigen::VectorXd::Constant(n, fixed->p)),
        KernelRole::MarginalK);
  }
  if (const auto* adaptive = std::get_if<AdaptiveAloha>(&spec)) {
    if (adaptive->p.size() != n)
      throw std::invalid_argument("adaptive Aloha dimension mismatch");
    return SymmetricKernel(diag_kernel(adaptive->p), KernelRole::MarginalK);
  }
  const auto& le = std::get<LEnsembleSpec>(spec);
  if (le.S.size() != n)
    throw std::invalid_argument("similarity kernel dimension mismatch");
  return marginal_from_L(build_L(le.S, le.q));
}

double utility(const SchedulerSpec& spec, const Network& net,
               const SinrParams& p, double R0) {
  if (R0 <= 0) throw std::invalid_argument("R0 must be > 0");
  SymmetricKernel k = lower_to_marginal(spec, net.size());
  CoverageEvaluator eval(net, p);
  double u = 0;
  for (int i = 0; i < net.size(); ++i) {
    double cov = eval.coverage(k.matrix(), i);
    if (cov <= 0) return kNegInf;
    u += std::log(R0 * cov);
  }
  return u;
}

double utility_eigen(const SchedulerSpec& spec, const Network& net,
                     const SinrParams& p, double R0) {
  if (R0 <= 0) throw std::invalid_argument("R0 must be > 0");
  SymmetricKernel k = lower_to_marginal(spec, net.size());
  CoverageEvaluator eval(net, p);
  const int n = net.size();
  double u = n * std::log(R0);
  for (int i = 0; i < n; ++i) {
    Eigen::MatrixXd cm = eval.coverage_matrix(k.matrix(), i);
    Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> es(cm);
    if (es.info() != Eigen::Success)
      throw NumericFailure("eigendecomposition failed in utility_eigen");
    for (double lam : es.eigenvalues()) {
      if (lam <= 0) return kNegInf;
      u += std::log(lam);
    }
  }
  return u;
}

ScalarOptResult optimize_fixed_aloha(const Network& net, const SinrParams& p,
                                     double R0,
                                     const OptimizerSettings& settings) {
  UtilityObjective obj(net, Eigen::MatrixXd::Identity(net.size(), net.size()),
                       p, R0);
  auto value = [&](double t) {
    return obj.at_kernel(Eigen::MatrixXd(
        Eigen::VectorXd::Constant(net.size(), std::exp(t)).asDiagonal()));
  };

  // Coarse scan first (concavity in w is only guaranteed for w >= 0, so
  // unimodality over the whole range is not), then golden section on
  // t = log p inside the winning cell.
  const double t_lo = 2 * settings.w_min, t_hi = 0.0;
  const int cells = 200;
  int best_cell = 0;
  double best_val = kNegInf;
  for (int g = 0; g <= cells; ++g) {
    double v = value(t_lo + (t_hi - t_lo) * g / cells);
    if (v > best_val) {
      best_val = v;
      best_cell = g;
    }
  }
  double lo = t_lo + (t_hi - t_lo) * std::max(0, best_cell - 1) / cells;
  double hi = t_lo + (t_hi - t_lo) * std::min(cells, best_cell + 1) / cells;
  const double phi = (std::sqrt(5.0) - 1) / 2;
  double a = hi - phi * (hi - lo), b = lo + phi * (hi - lo);
  double fa = value(a), fb = value(b);
  while (hi - lo > 1e-9) {
    if (fa < fb) {
      lo = a;
      a = b;
      fa = fb;
      b = lo + phi * (hi - lo);
      fb = value(b);
    } else {
      hi = b;
      b = a;
      fb = fa;
      a = hi - phi * (hi - lo);
      fa = value(a);
    }
  }
  double t = (lo + hi) / 2;
  return {std::exp(t), value(t)};
}

LEnsembleOptResult optimize_lensemble(const Network& net,
                                      const SymmetricKernel& S,
                                      const SinrParams& p, double R0,
                                      const OptimizerSettings& settings) {
  if (S.role() != KernelRole::SimilarityS)
    throw std::invalid_argument("optimize_lensemble expects a similarity kernel");
  if (S.size() != net.size())
    throw std::invalid_argument("similarity kernel dimension mismatch");
  if (settings.w_min >= settings.w_max)
    throw std::invalid_argument("optimizer box must satisfy w_min < w_max");

  const int n = net.size();
  UtilityObjective obj(net, S.matrix(), p, R0);

  Eigen::VectorXd w = Eigen::VectorXd::Zero(n);
  double u = obj.at_log_quality(w);
  if (u == kNegInf)
    throw InfeasibleStart("utility is -inf at q = 1; no feasible start");

  std::ofstream trace;
  if (settings.trace_path) {
    trace.open(*settings.trace_path, std::ios::binary);
    trace << "iteration,utility,step_size,grad_norm,active_bounds\n";
  }

  Eigen::VectorXd best_w = w;
  double best_u = u;
  const double h = settings.gradient_step;
  int iter = 0;
  for (; iter < settings.max_iterations; ++iter) {
    Eigen::VectorXd grad(n);
    for (int k = 0; k < n; ++k) {
      Eigen::VectorXd wp = w, wm = w;
      wp[k] += h;
      wm[k] -= h;
      grad[k] = (obj.at_log_quality(wp) - obj.at_log_quality(wm)) / (2 * h);
    }

    double interior_grad = 0;
    int active = 0;
    for (int k = 0; k < n; ++k) {
      bool at_hi = w[k] >= settings.w_max - 1e-9 && grad[k] > 0;
      bool at_lo = w[k] <= settings.w_min + 1e-9 && grad[k] < 0;
      if (at_hi || at_lo) {
        ++active;
      } else {
        interior_grad = std::max(interior_grad, std::abs(grad[k]));
      }
    }

    // Backtracking line search: first ascent step wins.
    auto clamp = [&](const Eigen::VectorXd& v) {
      return Eigen::VectorXd(
          v.cwiseMax(settings.w_min).cwiseMin(settings.w_max));
    };
    double step = settings.initial_step;
    Eigen::VectorXd w_next;
    double u_next = kNegInf;
    bool ascended = false;
    while (step >= 1e-12) {
      w_next = clamp(w + step * grad);
      u_next = obj.at_log_quality(w_next);
      if (u_next > u) {
        ascended = true;
        break;
      }
      step /= 2;
    }
    // If the full initial step already ascends, expand it while that keeps
    // helping; flat gradients (e.g. a lone link pushing to the bound) would
    // otherwise crawl.
    if (ascended && step == settings.initial_step) {
      while (step < 1e6) {
        Eigen::VectorXd w_try = clamp(w + 2 * step * grad);
        double u_try = obj.at_log_quality(w_try);
        if (u_try <= u_next) break;
        step *= 2;
        w_next = w_try;
        u_next = u_try;
      }
    }
    if (trace.is_open()) {
      trace << iter << "," << format_sig(u, 12) << ","
            << format_sig(ascended ? step : 0.0, 6) << ","
            << format_sig(grad.norm(), 6) << "," << active << "\n";
    }
    if (!ascended) break;

    double du = u_next - u;
    w = w_next;
    u = u_next;
    if (u > best_u) {
      best_u = u;
      best_w = w;
    }
    if (du < settings.utility_tolerance && interior_grad < 1e-5) break;
  }

  LEnsembleOptResult res;
  res.q = QualityVector::from_log(best_w);
  res.utility = best_u;
  res.iterations = iter;
  res.bound_active.resize(n);
  for (int k = 0; k < n; ++k) {
    res.bound_active[k] = best_w[k] >= settings.w_max - 1e-9 ||
                          best_w[k] <= settings.w_min + 1e-9;
  }
  return res;
}

VectorOptResult optimize_adaptive_aloha(const Network& net,
                                        const SinrParams& p, double R0,
                                        const OptimizerSettings& settings) {
  SymmetricKernel identity(
      Eigen::MatrixXd::Identity(net.size(), net.size()),
      KernelRole::SimilarityS);
  LEnsembleOptResult le = optimize_lensemble(net, identity, p, R0, settings);
  VectorOptResult res;
  res.p.resize(net.size());
  for (int i = 0; i < net.size(); ++i) {
    double q2 = le.q.q[i] * le.q.q[i];
    res.p[i] = q2 / (1.0 + q2);
  }
  res.utility = le.utility;
  return res;
}

Eigen::VectorXd extract_features(const Network& net, int i) {
  if (i < 0 || i >= net.size())
    throw std::invalid_argument("feature index out of range");
  Eigen::VectorXd f(2);
  f[0] = 1.0;
  if (net.size() == 1) {
    // No other receiver to measure against; use the window diagonal.
    f[1] = net.window() * std::numbers::sqrt2;
    return f;
  }
  double dmin = std::numeric_limits<double>::infinity();
  for (int j = 0; j < net.size(); ++j) {
    if (j == i) continue;
    dmin = std::min(dmin, distance(net.transmitter(i), net.receiver(j)));
  }
  f[1] = dmin;
  return f;
}

QualityVector quality_from_features(const FeatureModel& model,
                                    const Network& net) {
  std::function<Eigen::VectorXd(const Network&, int)> features =
      model.feature_fn;
  if (!features) {
    features = [](const Network& n, int i) { return extract_features(n, i); };
  }
  Eigen::VectorXd q(net.size());
  for (int i = 0; i < net.size(); ++i) {
    Eigen::VectorXd f = features(net, i);
    if (f.size() != model.theta.size())
      throw std::invalid_argument("feature/theta dimension mismatch");
    q[i] = std::exp(model.theta.dot(f));
  }
  return QualityVector::from_values(std::move(q));
}

}  // namespace detsched
