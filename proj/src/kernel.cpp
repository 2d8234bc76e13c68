#include "detsched/kernel.hpp"

#include <algorithm>
#include <cmath>
#include <fstream>
#include <sstream>
#include <stdexcept>
#include <utility>

#include "detsched/csv.hpp"
#include "detsched/errors.hpp"

namespace detsched {

namespace {

constexpr double kSymTol = 1e-10;
constexpr double kEigTol = 1e-9;
constexpr double kProbClamp = 1e-12;

Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> decompose(
    const Eigen::MatrixXd& m) {
  Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> es(m);
  if (es.info() != Eigen::Success)
    throw NumericFailure("symmetric eigendecomposition failed");
  return es;
}

// det of a PSD restriction, eigenvalue product with tiny negatives zeroed.
double det_psd(const Eigen::MatrixXd& m) {
  if (m.rows() == 0) return 1.0;
  auto es = decompose(m);
  double det = 1.0;
  for (double lam : es.eigenvalues()) {
    if (lam < 0 && lam > -kEigTol) lam = 0;
    det *= lam;
  }
  return det;
}

double clamp_probability(double p) {
  if (p < 0 && p > -kProbClamp) return 0;
  if (p > 1 && p < 1 + kProbClamp) return 1;
  return p;
}

Eigen::MatrixXd restrict_to(const Eigen::MatrixXd& m, const Subset& psi) {
  const int k = static_cast<int>(psi.size());
  Eigen::MatrixXd r(k, k);
  for (int a = 0; a < k; ++a)
    for (int b = 0; b < k; ++b) r(a, b) = m(psi[a], psi[b]);
  return r;
}

}  // namespace

void validate_subset(const Subset& psi, int n) {
  for (std::size_t a = 0; a < psi.size(); ++a) {
    if (psi[a] < 0 || psi[a] >= n)
      throw std::invalid_argument("subset index out of range");
    if (a > 0 && psi[a] <= psi[a - 1])
      throw std::invalid_argument("subset indices must be strictly increasing");
  }
}

SymmetricKernel::SymmetricKernel(Eigen::MatrixXd entries, KernelRole role)
    : m_(std::move(entries)), role_(role) {
  if (m_.rows() != m_.cols())
    throw std::invalid_argument("kernel matrix must be square");
  double asym = (m_ - m_.transpose()).cwiseAbs().maxCoeff();
  if (asym > kSymTol)
    throw std::invalid_argument("kernel asymmetry exceeds tolerance");
  if (asym > 0) m_ = ((m_ + m_.transpose()) / 2).eval();

  auto es = decompose(m_);
  const auto& lam = es.eigenvalues();
  bool needs_clamp = false;
  for (double l : lam) {
    if (role_ == KernelRole::MarginalK) {
      if (l < -kEigTol || l > 1 + kEigTol)
        throw KernelError("marginal kernel eigenvalue outside [0,1]: " +
                          std::to_string(l));
      if (l < 0 || l > 1) needs_clamp = true;
    } else {
      if (l < -kEigTol)
        throw KernelError("kernel is not positive semi-definite: eigenvalue " +
                          std::to_string(l));
      if (l < 0) needs_clamp = true;
    }
  }
  if (needs_clamp) {
    Eigen::VectorXd clamped = lam;
    for (int i = 0; i < clamped.size(); ++i) {
      clamped[i] = std::max(0.0, clamped[i]);
      if (role_ == KernelRole::MarginalK) clamped[i] = std::min(1.0, clamped[i]);
    }
    m_ = es.eigenvectors() * clamped.asDiagonal() *
         es.eigenvectors().transpose();
    m_ = ((m_ + m_.transpose()) / 2).eval();
  }
}

QualityVector QualityVector::from_values(Eigen::VectorXd q) {
  for (double v : q) {
    if (!(v >= 0) || !std::isfinite(v))
      throw std::invalid_argument("quality entries must be finite and >= 0");
  }
  return {std::move(q), std::nullopt};
}

QualityVector QualityVector::from_log(const Eigen::VectorXd& w) {
  QualityVector qv;
  qv.w = w;
  qv.q = w.array().exp();
  return qv;
}

SymmetricKernel gaussian_similarity(const Network& net, double sigma) {
  if (sigma <= 0) throw std::invalid_argument("sigma must be > 0");
  const int n = net.size();
  Eigen::MatrixXd s(n, n);
  for (int i = 0; i < n; ++i) {
    s(i, i) = 1.0;
    for (int j = i + 1; j < n; ++j) {
      double d = distance(net.transmitter(i), net.transmitter(j));
      s(i, j) = s(j, i) = std::exp(-d * d / (sigma * sigma));
    }
  }
  return SymmetricKernel(std::move(s), KernelRole::SimilarityS);
}

SymmetricKernel build_L(const SymmetricKernel& S, const QualityVector& q) {
  if (S.role() != KernelRole::SimilarityS)
    throw std::invalid_argument("build_L expects a similarity kernel");
  if (q.q.size() != S.size())
    throw std::invalid_argument("quality/similarity dimension mismatch");
  for (double v : q.q) {
    if (v < 0) throw std::invalid_argument("negative quality entry");
  }
  Eigen::MatrixXd l =
      q.q.asDiagonal() * S.matrix() * q.q.asDiagonal();
  return SymmetricKernel(std::move(l), KernelRole::EnsembleL);
}

SymmetricKernel marginal_from_L(const SymmetricKernel& L) {
  if (L.role() != KernelRole::EnsembleL)
    throw std::invalid_argument("marginal_from_L expects an L-ensemble kernel");
  auto es = decompose(L.matrix());
  Eigen::VectorXd lam = es.eigenvalues();
  for (int i = 0; i < lam.size(); ++i) {
    double l = std::max(0.0, lam[i]);
    lam[i] = l / (1.0 + l);
  }
  Eigen::MatrixXd k =
      es.eigenvectors() * lam.asDiagonal() * es.eigenvectors().transpose();
  k = ((k + k.transpose()) / 2).eval();
  return SymmetricKernel(std::move(k), KernelRole::MarginalK);
}

double subset_prob_inclusion(const SymmetricKernel& K, const Subset& psi) {
  if (K.role() != KernelRole::MarginalK)
    throw std::invalid_argument("subset_prob_inclusion expects a marginal kernel");
  validate_subset(psi, K.size());
  return clamp_probability(det_psd(restrict_to(K.matrix(), psi)));
}

double subset_prob_exact(const SymmetricKernel& L, const Subset& psi) {
  if (L.role() != KernelRole::EnsembleL)
    throw std::invalid_argument("subset_prob_exact expects an L-ensemble kernel");
  validate_subset(psi, L.size());
  auto es = decompose(L.matrix());
  double norm = 1.0;
  for (double lam : es.eigenvalues()) norm *= 1.0 + std::max(0.0, lam);
  return clamp_probability(det_psd(restrict_to(L.matrix(), psi)) / norm);
}

double factorized_prob(const SymmetricKernel& S, const QualityVector& q,
                       const Subset& psi) {
  SymmetricKernel L = build_L(S, q);
  validate_subset(psi, S.size());
  auto es = decompose(L.matrix());
  double norm = 1.0;
  for (double lam : es.eigenvalues()) norm *= 1.0 + std::max(0.0, lam);
  double qsq = 1.0;
  for (int i : psi) qsq *= q.q[i] * q.q[i];
  return clamp_probability(qsq * det_psd(restrict_to(S.matrix(), psi)) / norm);
}

SymmetricKernel palm_reduce(const SymmetricKernel& K, int z) {
  if (K.role() != KernelRole::MarginalK)
    throw std::invalid_argument("palm_reduce expects a marginal kernel");
  const int n = K.size();
  if (z < 0 || z >= n) throw std::invalid_argument("palm index out of range");
  if (K(z, z) <= 1e-12)
    throw PalmUndefined("Palm conditioning on a never-selected point");

  Eigen::MatrixXd r(n - 1, n - 1);
  for (int i = 0, a = 0; i < n; ++i) {
    if (i == z) continue;
    for (int j = 0, b = 0; j < n; ++j) {
      if (j == z) continue;
      r(a, b) = K(i, j) - K(i, z) * K(j, z) / K(z, z);
      ++b;
    }
    ++a;
  }
  return SymmetricKernel(std::move(r), KernelRole::MarginalK);
}

SymmetricKernel scale_kernel(const SymmetricKernel& K,
                             const Eigen::VectorXd& f) {
  if (f.size() != K.size())
    throw std::invalid_argument("scale vector dimension mismatch");
  Eigen::VectorXd root(f.size());
  for (int i = 0; i < f.size(); ++i) {
    double fi = f[i];
    if (fi < -1e-12 || fi > 1 + 1e-12)
      throw std::invalid_argument("scale entries must lie in [0,1]");
    fi = std::clamp(fi, 0.0, 1.0);
    root[i] = std::sqrt(1.0 - fi);
  }
  Eigen::MatrixXd m = root.asDiagonal() * K.matrix() * root.asDiagonal();
  return SymmetricKernel(std::move(m), K.role());
}

DppSampler::DppSampler(const SymmetricKernel& K) {
  if (K.role() != KernelRole::MarginalK)
    throw std::invalid_argument("DppSampler expects a marginal kernel");
  auto es = decompose(K.matrix());
  eigvecs_ = es.eigenvectors();
  eigvals_ = es.eigenvalues();
  for (int i = 0; i < eigvals_.size(); ++i)
    eigvals_[i] = std::clamp(eigvals_[i], 0.0, 1.0);
}

Subset DppSampler::draw(Rng& rng) const {
  const int n = static_cast<int>(eigvals_.size());

  // Phase 1: pick eigenvectors independently with probability lambda_j.
  std::vector<int> cols;
  for (int j = 0; j < n; ++j) {
    if (bernoulli(rng, eigvals_[j])) cols.push_back(j);
  }
  int k = static_cast<int>(cols.size());
  Eigen::MatrixXd v(n, k);
  for (int c = 0; c < k; ++c) v.col(c) = eigvecs_.col(cols[c]);

  // Phase 2: sample points from the projection kernel VV^T, deflating the
  // span after each draw.
  Subset psi;
  while (k > 0) {
    Eigen::VectorXd weights = v.leftCols(k).rowwise().squaredNorm();
    if (weights.maxCoeff() < 1e-14)
      throw NumericFailure("projection sampling weights numerically exhausted");
    double u = uniform01(rng) * weights.sum();
    int pick = 0;
    double acc = 0;
    for (int i = 0; i < n; ++i) {
      acc += weights[i];
      if (u < acc) {
        pick = i;
        break;
      }
      pick = i;  // fall through to the last index on rounding
    }
    psi.push_back(pick);

    // Eliminate the picked coordinate: pivot on the column with the largest
    // component in row `pick`, subtract it from the others, then
    // re-orthonormalize with modified Gram-Schmidt.
    int pivot = 0;
    double best = -1;
    for (int c = 0; c < k; ++c) {
      if (std::abs(v(pick, c)) > best) {
        best = std::abs(v(pick, c));
        pivot = c;
      }
    }
    Eigen::VectorXd pv = v.col(pivot);
    for (int c = 0; c < k; ++c) {
      if (c == pivot) continue;
      v.col(c) -= (v(pick, c) / pv[pick]) * pv;
    }
    if (pivot != k - 1) v.col(pivot) = v.col(k - 1);
    --k;
    for (int c = 0; c < k; ++c) {
      for (int d = 0; d < c; ++d) v.col(c) -= v.col(d).dot(v.col(c)) * v.col(d);
      double nrm = v.col(c).norm();
      if (nrm < 1e-14)
        throw NumericFailure("projection basis collapsed during deflation");
      v.col(c) /= nrm;
    }
  }
  std::sort(psi.begin(), psi.end());
  return psi;
}

Subset sample(const SymmetricKernel& K, Rng& rng) {
  return DppSampler(K).draw(rng);
}

void dump_kernel_csv(const SymmetricKernel& K, const std::string& path) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw std::runtime_error("cannot write " + path);
  char role = 'K';
  if (K.role() == KernelRole::EnsembleL) role = 'L';
  if (K.role() == KernelRole::SimilarityS) role = 'S';
  out << "# role=" << role << " n=" << K.size() << "\n";
  for (int i = 0; i < K.size(); ++i) {
    for (int j = 0; j < K.size(); ++j) {
      if (j) out << ",";
      out << format_sig(K(i, j), 17);
    }
    out << "\n";
  }
}

SymmetricKernel load_kernel_csv(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw std::runtime_error("cannot read " + path);
  std::string header;
  std::getline(in, header);
  KernelRole role;
  int n = 0;
  char role_ch = 0;
  if (std::sscanf(header.c_str(), "# role=%c n=%d", &role_ch, &n) != 2 || n < 1)
    throw std::invalid_argument("bad kernel dump header: " + header);
  switch (role_ch) {
    case 'K': role = KernelRole::MarginalK; break;
    case 'L': role = KernelRole::EnsembleL; break;
    case 'S': role = KernelRole::SimilarityS; break;
    default: throw std::invalid_argument("bad kernel role in dump header");
  }
  Eigen::MatrixXd m(n, n);
  for (int i = 0; i < n; ++i) {
    std::string line;
    if (!std::getline(in, line))
      throw std::invalid_argument("kernel dump truncated");
    std::istringstream ss(line);
    std::string cell;
    for (int j = 0; j < n; ++j) {
      if (!std::getline(ss, cell, ','))
        throw std::invalid_argument("kernel dump row too short");
      m(i, j) = std::stod(cell);
    }
  }
  return SymmetricKernel(std::move(m), role);
}

}  // namespace detsched
