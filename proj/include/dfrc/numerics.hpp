#pragma once

#include <complex>
#include <cstdint>
#include <random>

#include <Eigen/Dense>

#include "dfrc/errors.hpp"

namespace dfrc {

using Complex = std::complex<double>;
using CMatrix = Eigen::MatrixXcd;
using CVector = Eigen::VectorXcd;
using RMatrix = Eigen::MatrixXd;
using RVector = Eigen::VectorXd;
using Rng = std::mt19937_64;

inline constexpr double kPi = 3.14159265358979323846;
inline constexpr Complex kJ{0.0, 1.0};

/// Eigen-decomposition of a Hermitian matrix. Values ascend; column i of
/// `vectors` pairs with `values[i]` and has its largest-magnitude entry made
/// real-positive.
struct EigDecomposition {
  RVector values;
  CMatrix vectors;
};

/// Largest entrywise deviation from Hermitian symmetry, max |M_ij - conj(M_ji)|.
double hermitian_deviation(const CMatrix& m);

/// True when hermitian_deviation(m) <= rel_tol * max(1, ||m||_F).
bool is_hermitian(const CMatrix& m, double rel_tol = 1e-12);

/// (M + M^H) / 2.
CMatrix hermitian_part(const CMatrix& m);

/// Throws NonHermitian if `m` fails the 1e-12 symmetry tolerance.
EigDecomposition herm_eig(const CMatrix& m);

/// Eigenvalues only, ascending. Input is symmetrised without checking.
RVector herm_eigenvalues(const CMatrix& m);

/// Canonical square root V * sqrt(max(lambda, 0)) * V^H of a PSD matrix.
/// Throws NotPsd if the smallest eigenvalue is below -1e-6 * lambda_max.
CMatrix psd_sqrt(const CMatrix& m);

/// Number of singular values strictly above rel_tol * sigma_max (0 for a zero matrix).
int numeric_rank(const CMatrix& m, double rel_tol);

/// Ratio lambda_2 / lambda_1 of the two largest eigenvalues of a PSD matrix
/// (0 when the matrix is zero or 1x1).
double second_eigen_ratio(const CMatrix& m);

/// Circularly-symmetric complex Gaussian matrix with per-entry variance `variance`.
CMatrix complex_gaussian(Eigen::Index rows, Eigen::Index cols, double variance, Rng& rng);

/// Haar-distributed unitary of size n.
CMatrix random_unitary(Eigen::Index n, Rng& rng);

/// Deterministic stream splitting: hash of (seed, a, b) via SplitMix64.
std::uint64_t derive_seed(std::uint64_t seed, std::uint64_t a, std::uint64_t b = 0);

inline double db_to_linear(double db) { return std::pow(10.0, db / 10.0); }
inline double linear_to_db(double x) { return 10.0 * std::log10(x); }
inline double dbm_to_mw(double dbm) { return db_to_linear(dbm); }
inline double deg_to_rad(double deg) { return deg * kPi / 180.0; }
inline double rad_to_deg(double rad) { return rad * 180.0 / kPi; }

}  // namespace dfrc
