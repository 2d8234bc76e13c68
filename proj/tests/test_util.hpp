#ifndef DETSCHED_TEST_UTIL_HPP
#define DETSCHED_TEST_UTIL_HPP

#include <Eigen/Dense>

#include "detsched/kernel.hpp"
#include "detsched/rng.hpp"

namespace detsched::test {

inline Eigen::MatrixXd random_matrix(int n, Rng& rng, double lo = -1,
                                     double hi = 1) {
  Eigen::MatrixXd m(n, n);
  for (int i = 0; i < n; ++i)
    for (int j = 0; j < n; ++j) m(i, j) = uniform(rng, lo, hi);
  return m;
}

inline Eigen::MatrixXd random_psd(int n, Rng& rng, double scale = 1.0) {
  Eigen::MatrixXd g = random_matrix(n, rng);
  return scale * (g * g.transpose()) / n;
}

// Marginal kernel with eigenvalues uniform in [lo, hi].
inline Eigen::MatrixXd random_marginal(int n, Rng& rng, double lo = 0.05,
                                       double hi = 0.95) {
  Eigen::HouseholderQR<Eigen::MatrixXd> qr(random_matrix(n, rng));
  Eigen::MatrixXd q = qr.householderQ();
  Eigen::VectorXd lam(n);
  for (int i = 0; i < n; ++i) lam[i] = uniform(rng, lo, hi);
  Eigen::MatrixXd k = q * lam.asDiagonal() * q.transpose();
  return (k + k.transpose()) / 2;
}

inline std::vector<Subset> all_subsets(int n) {
  std::vector<Subset> out;
  for (std::uint32_t mask = 0; mask < (1u << n); ++mask) {
    Subset psi;
    for (int b = 0; b < n; ++b)
      if (mask & (1u << b)) psi.push_back(b);
    out.push_back(psi);
  }
  return out;
}

}  // namespace detsched::test

#endif
