#include "dfrc/numerics.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>

namespace dfrc {

double hermitian_deviation(const CMatrix& m) {
  if (m.rows() != m.cols()) return std::numeric_limits<double>::infinity();
  double dev = 0.0;
  for (Eigen::Index j = 0; j < m.cols(); ++j)
    for (Eigen::Index i = j; i < m.rows(); ++i)
      dev = std::max(dev, std::abs(m(i, j) - std::conj(m(j, i))));
  return dev;
}

bool is_hermitian(const CMatrix& m, double rel_tol) {
  return hermitian_deviation(m) <= rel_tol * std::max(1.0, m.norm());
}

CMatrix hermitian_part(const CMatrix& m) { return 0.5 * (m + m.adjoint()); }

namespace {

void fix_phase(CMatrix& v) {
  for (Eigen::Index j = 0; j < v.cols(); ++j) {
    Eigen::Index best = 0;
    double mag = -1.0;
    // strict comparison keeps the first index on ties
    for (Eigen::Index i = 0; i < v.rows(); ++i) {
      double a = std::abs(v(i, j));
      if (a > mag * (1.0 + 1e-12)) {
        mag = a;
        best = i;
      }
    }
    if (mag > 0.0) v.col(j) *= std::conj(v(best, j)) / mag;
  }
}

}  // namespace

EigDecomposition herm_eig(const CMatrix& m) {
  if (m.rows() != m.cols())
    throw Error(ErrorCode::DimensionMismatch, "herm_eig needs a square matrix");
  if (!is_hermitian(m))
    throw Error(ErrorCode::NonHermitian, "herm_eig input is not Hermitian");
  Eigen::SelfAdjointEigenSolver<CMatrix> es(hermitian_part(m));
  if (es.info() != Eigen::Success)
    throw Error(ErrorCode::SolverFailure, "eigensolver did not converge");
  EigDecomposition out{es.eigenvalues(), es.eigenvectors()};
  fix_phase(out.vectors);
  return out;
}

RVector herm_eigenvalues(const CMatrix& m) {
  Eigen::SelfAdjointEigenSolver<CMatrix> es(hermitian_part(m), Eigen::EigenvaluesOnly);
  return es.eigenvalues();
}

CMatrix psd_sqrt(const CMatrix& m) {
  EigDecomposition e = herm_eig(m);
  const Eigen::Index n = m.rows();
  if (n == 0) return m;
  double lmax = std::max(0.0, e.values(n - 1));
  if (e.values(0) < -1e-6 * lmax || (lmax == 0.0 && e.values(0) < 0.0))
    throw Error(ErrorCode::NotPsd, "psd_sqrt input has a significantly negative eigenvalue");
  RVector s = e.values.cwiseMax(0.0).cwiseSqrt();
  return e.vectors * s.asDiagonal() * e.vectors.adjoint();
}

int numeric_rank(const CMatrix& m, double rel_tol) {
  if (!(rel_tol > 0.0 && rel_tol < 1.0))
    throw Error(ErrorCode::InvalidArgument, "numeric_rank tolerance must lie in (0,1)");
  if (m.size() == 0) return 0;
  Eigen::JacobiSVD<CMatrix> svd(m);
  const RVector& s = svd.singularValues();
  if (s.size() == 0 || s(0) == 0.0) return 0;
  int r = 0;
  for (Eigen::Index i = 0; i < s.size(); ++i)
    if (s(i) > rel_tol * s(0)) ++r;
  return r;
}

double second_eigen_ratio(const CMatrix& m) {
  if (m.rows() < 2) return 0.0;
  RVector v = herm_eigenvalues(m);
  const Eigen::Index n = v.size();
  if (v(n - 1) <= 0.0) return 0.0;
  return std::max(0.0, v(n - 2)) / v(n - 1);
}

CMatrix complex_gaussian(Eigen::Index rows, Eigen::Index cols, double variance, Rng& rng) {
  std::normal_distribution<double> nd(0.0, std::sqrt(variance / 2.0));
  CMatrix out(rows, cols);
  // column-major fill order is part of the reproducibility contract
  for (Eigen::Index j = 0; j < cols; ++j)
    for (Eigen::Index i = 0; i < rows; ++i) {
      double re = nd(rng);
      double im = nd(rng);
      out(i, j) = Complex(re, im);
    }
  return out;
}

CMatrix random_unitary(Eigen::Index n, Rng& rng) {
  CMatrix g = complex_gaussian(n, n, 1.0, rng);
  Eigen::HouseholderQR<CMatrix> qr(g);
  CMatrix q = qr.householderQ() * CMatrix::Identity(n, n);
  CMatrix r = qr.matrixQR().triangularView<Eigen::Upper>();
  for (Eigen::Index i = 0; i < n; ++i) {
    double a = std::abs(r(i, i));
    if (a > 0.0) q.col(i) *= r(i, i) / a;
  }
  return q;
}

namespace {

std::uint64_t splitmix64(std::uint64_t x) {
  x += 0x9E3779B97F4A7C15ULL;
  x = (x ^ (x >> 30)) * 0xBF58476D1CE4E5B9ULL;
  x = (x ^ (x >> 27)) * 0x94D049BB133111EBULL;
  return x ^ (x >> 31);
}

}  // namespace

std::uint64_t derive_seed(std::uint64_t seed, std::uint64_t a, std::uint64_t b) {
  return splitmix64(splitmix64(splitmix64(seed) ^ a) ^ (b * 0xD1B54A32D192ED03ULL));
}

}  // namespace dfrc
