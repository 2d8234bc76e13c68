#include "detsched/oracle.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>

#include "detsched/errors.hpp"

namespace detsched {

double conditional_coverage_given_subset(const Network& net, int i,
                                         const Subset& psi,
                                         const SinrParams& p,
                                         const HTransform& h_hook) {
  validate_subset(psi, net.size());
  if (!std::binary_search(psi.begin(), psi.end(), i))
    throw std::invalid_argument("subset must contain the covered link");
  double r = link_distance(net, i);
  double prob = w_func(r, p, net.pathloss());
  for (int j : psi) {
    if (j == i) continue;
    double h = h_func(cross_distance(net, j, i), r, p, net.pathloss());
    if (h_hook) h = h_hook(h);
    prob *= h;
  }
  return prob;
}

double enumerate_coverage(const SymmetricKernel& L, const Network& net, int i,
                          const SinrParams& p, const HTransform& h_hook) {
  const int n = net.size();
  if (L.size() != n)
    throw std::invalid_argument("kernel/network dimension mismatch");
  if (n > 12) throw SizeLimit("enumeration oracle limited to n <= 12");
  if (i < 0 || i >= n) throw std::invalid_argument("link index out of range");

  double total = 0;
  for (std::uint32_t mask = 0; mask < (1u << n); ++mask) {
    if (!(mask & (1u << i))) continue;
    Subset psi;
    for (int b = 0; b < n; ++b) {
      if (mask & (1u << b)) psi.push_back(b);
    }
    total += subset_prob_exact(L, psi) *
             conditional_coverage_given_subset(net, i, psi, p, h_hook);
  }
  return total;
}

McEstimate mc_coverage(const SchedulerSpec& spec, const Network& net, int i,
                       const SinrParams& p, long samples, std::uint64_t seed) {
  if (samples < 100) throw std::invalid_argument("need at least 100 samples");
  if (i < 0 || i >= net.size())
    throw std::invalid_argument("link index out of range");

  SymmetricKernel k = lower_to_marginal(spec, net.size());
  DppSampler sampler(k);
  Rng rng = make_rng(seed);
  const double r = link_distance(net, i);
  const double signal_gain = net.pathloss().gain(r);

  long hits = 0;
  for (long s = 0; s < samples; ++s) {
    Subset psi = sampler.draw(rng);
    if (!std::binary_search(psi.begin(), psi.end(), i)) continue;
    double signal = exponential(rng, p.fading_mean) * signal_gain;
    double interference = 0;
    for (int j : psi) {
      if (j == i) continue;
      interference += exponential(rng, p.fading_mean) *
                      net.pathloss().gain(cross_distance(net, j, i));
    }
    if (signal > p.tau * (p.noise + interference)) ++hits;
  }
  McEstimate est;
  est.samples = samples;
  est.seed = seed;
  est.mean = static_cast<double>(hits) / samples;
  est.std_error = std::sqrt(est.mean * (1.0 - est.mean) / samples);
  return est;
}

std::vector<McEstimate> mc_inclusion(const SymmetricKernel& K, long samples,
                                     std::uint64_t seed) {
  if (samples < 100) throw std::invalid_argument("need at least 100 samples");
  DppSampler sampler(K);
  Rng rng = make_rng(seed);
  std::vector<long> hits(K.size(), 0);
  for (long s = 0; s < samples; ++s) {
    for (int j : sampler.draw(rng)) ++hits[j];
  }
  std::vector<McEstimate> out(K.size());
  for (int j = 0; j < K.size(); ++j) {
    out[j].samples = samples;
    out[j].seed = seed;
    out[j].mean = static_cast<double>(hits[j]) / samples;
    out[j].std_error =
        std::sqrt(out[j].mean * (1.0 - out[j].mean) / samples);
  }
  return out;
}

}  // namespace detsched
