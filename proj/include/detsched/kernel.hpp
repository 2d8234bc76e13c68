#ifndef DETSCHED_KERNEL_HPP
#define DETSCHED_KERNEL_HPP

#include <optional>
#include <string>
#include <vector>

#include <Eigen/Dense>

#include "detsched/geometry.hpp"
#include "detsched/rng.hpp"

namespace detsched {

enum class KernelRole { MarginalK, EnsembleL, SimilarityS };

/// Sorted list of distinct transmitter indices.
using Subset = std::vector<int>;

void validate_subset(const Subset& psi, int n);

/// Square symmetric matrix over transmitter indices with a role tag.
/// Construction symmetrizes (tolerance 1e-10) and checks the spectrum:
/// MarginalK eigenvalues must lie in [-1e-9, 1+1e-9] and are clamped to
/// [0,1]; EnsembleL and SimilarityS must be PSD to within -1e-9. Larger
/// violations throw KernelError.
class SymmetricKernel {
 public:
  SymmetricKernel(Eigen::MatrixXd entries, KernelRole role);

  const Eigen::MatrixXd& matrix() const { return m_; }
  KernelRole role() const { return role_; }
  int size() const { return static_cast<int>(m_.rows()); }
  double operator()(int i, int j) const { return m_(i, j); }

 private:
  Eigen::MatrixXd m_;
  KernelRole role_;
};

struct QualityVector {
  Eigen::VectorXd q;
  std::optional<Eigen::VectorXd> w;  // q = exp(w) elementwise when present

  static QualityVector from_values(Eigen::VectorXd q);
  static QualityVector from_log(const Eigen::VectorXd& w);
};

/// [S]_ij = exp(-|x_i - x_j|^2 / sigma^2); unit diagonal, PSD.
SymmetricKernel gaussian_similarity(const Network& net, double sigma);

/// [L]_ij = q_i S_ij q_j.
SymmetricKernel build_L(const SymmetricKernel& S, const QualityVector& q);

/// K = L(L+I)^(-1), computed spectrally: same eigenvectors, eigenvalues
/// lambda/(1+lambda).
SymmetricKernel marginal_from_L(const SymmetricKernel& L);

/// P(Psi contains psi) = det(K_psi).
double subset_prob_inclusion(const SymmetricKernel& K, const Subset& psi);

/// P(Psi = psi) = det(L_psi) / det(L+I).
double subset_prob_exact(const SymmetricKernel& L, const Subset& psi);

/// Quality-diversity form: prod_{i in psi} q_i^2 * det(S_psi) / det(L+I).
double factorized_prob(const SymmetricKernel& S, const QualityVector& q,
                       const Subset& psi);

/// Reduced Palm kernel given z in Psi, over the remaining n-1 indices:
/// [K_z!]_ij = K_ij - K_iz K_jz / K_zz. Throws PalmUndefined when
/// K_zz <= 1e-12.
SymmetricKernel palm_reduce(const SymmetricKernel& K, int z);

/// [K{f}]_ij = sqrt(1-f_i) K_ij sqrt(1-f_j), with all f_i in [0,1].
SymmetricKernel scale_kernel(const SymmetricKernel& K,
                             const Eigen::VectorXd& f);

/// Exact spectral DPP sampler. The eigendecomposition is done once at
/// construction so repeated draws are cheap.
class DppSampler {
 public:
  explicit DppSampler(const SymmetricKernel& K);

  Subset draw(Rng& rng) const;

 private:
  Eigen::MatrixXd eigvecs_;
  Eigen::VectorXd eigvals_;  // clamped to [0,1]
};

Subset sample(const SymmetricKernel& K, Rng& rng);

/// Debug dump: "# role=<K|L|S> n=<n>" then row-major CSV, 17 sig digits.
void dump_kernel_csv(const SymmetricKernel& K, const std::string& path);
SymmetricKernel load_kernel_csv(const std::string& path);

}  // namespace detsched

#endif
