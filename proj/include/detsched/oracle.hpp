#ifndef DETSCHED_ORACLE_HPP
#define DETSCHED_ORACLE_HPP

#include <cstdint>
#include <functional>

#include "detsched/coverage.hpp"
#include "detsched/fairness.hpp"
#include "detsched/geometry.hpp"
#include "detsched/kernel.hpp"

namespace detsched {

struct McEstimate {
  double mean = 0;
  double std_error = 0;
  long samples = 0;
  std::uint64_t seed = 0;
};

/// Optional transform applied to every h factor inside the enumeration
/// oracle. Identity in normal use; the verify command injects a deliberate
/// corruption through it as a negative control.
using HTransform = std::function<double(double)>;

/// Closed-form conditional coverage for a fixed active set: under Rayleigh
/// fading, P(SINR_i > tau | Psi = psi) = w(r_i) * prod_{j in psi, j != i}
/// h(|x_j - y_i|, r_i).
double conditional_coverage_given_subset(const Network& net, int i,
                                         const Subset& psi,
                                         const SinrParams& p,
                                         const HTransform& h_hook = {});

/// Ground-truth P_i(tau) by summing P(Psi = psi) * conditional over all
/// 2^n subsets containing i. Limited to n <= 12.
double enumerate_coverage(const SymmetricKernel& L, const Network& net, int i,
                          const SinrParams& p, const HTransform& h_hook = {});

/// Direct simulation: sample Psi, draw i.i.d. exponential fades per active
/// transmitter, test {i in Psi and SINR > tau}.
McEstimate mc_coverage(const SchedulerSpec& spec, const Network& net, int i,
                       const SinrParams& p, long samples, std::uint64_t seed);

/// Empirical inclusion frequencies from repeated sampling.
std::vector<McEstimate> mc_inclusion(const SymmetricKernel& K, long samples,
                                     std::uint64_t seed);

}  // namespace detsched

#endif
