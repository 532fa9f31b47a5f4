#pragma once

#include <string>
#include <utility>
#include <vector>

#include "dfrc/designs.hpp"

namespace dfrc {

struct SchurCheck {
  double t_lmi = 0.0;     // largest t with the 2x2 information matrix PSD, by bisection
  double t_closed = 0.0;  // tr(Adot^H Adot R) - |tr(Adot^H A R)|^2 / tr(A^H A R)
  double relative_difference() const;
};

SchurCheck check_schur(const CMatrix& R, double theta, const ArrayGeometry& g);

/// Residuals of the first-order conditions of the point-target relaxation.
/// All entries are normalized so that 1e-6 is a meaningful pass level.
struct KktReport {
  double stationarity = 0.0;               // solver Z_k versus the reconstruction from (mu, mu_T, Z_P)
  std::vector<double> complementarity;     // K SINR rows, power row, tr(Z_k W_k) for each k, tr(Z_P P)
  std::vector<double> dual_feasibility;    // normalized lambda_min of reconstructed Z_1..Z_K, then Z_P
  std::vector<int> active_set;             // users with mu_k > 1e-8 max(1, mu_T)
  double phi_residual = 0.0;               // |phi - 1|
  double gamma_residual = 0.0;             // |gamma - |beta|^2|, relative
  double min_multiplier = 0.0;             // smallest of mu_k and mu_T
  std::vector<std::string> notes;

  double max_residual() const;
  bool ok(double tol = 1e-6) const;
};

/// Checks a point-target relaxed solution (relaxed_blocks) against its
/// multipliers. Uses the blocks, not the extracted beamformers.
KktReport check_kkt_point(const DesignSolution& sol, const PointDuals& duals, const Scenario& s);

/// F = [a, adot] M [a, adot]^H with phi = 1 and gamma = |beta|^2.
CMatrix f_matrix(Complex beta, const ArrayGeometry& g, double theta = 0.0);

/// Closed-form nonzero eigenvalues (lambda_1 >= lambda_2) of f_matrix.
std::pair<double, double> eig_F(Complex beta, const ArrayGeometry& g, double theta = 0.0);

struct RankReport {
  bool full_column_rank = false;
  int rank = 0;
  RVector singular_values;
};

/// D = H [a, adot] with H holding h_k^H as rows.
RankReport check_theorem2_condition(const CMatrix& H, double theta, const ArrayGeometry& g);

/// First-order conditions of the eigenvalue form of the single-user
/// extended-target problem, evaluated on a covariance.
struct ExtendedKktReport {
  double lambda_h = 0.0;
  std::vector<double> lambda_perp;
  double mu = 0.0;
  double omega = 0.0;
  double stationarity = 0.0;     // spread of lambda_ii^{-2}, i >= 2, relative to mu
  double power_residual = 0.0;   // |sum lambda - P_T| / P_T
  double complementarity = 0.0;  // |omega (lambda_h - Gamma sigma^2 / ||h||^2)| / (mu P_T)
  double dual_sign = 0.0;        // max(0, -omega) / mu
  double primal_sinr = 0.0;      // max(0, Gamma sigma^2/||h||^2 - lambda_h) / P_T

  double max_residual() const;
};

ExtendedKktReport check_kkt_extended_single(const CMatrix& R, const CVector& h1, double gamma1, double power,
                                            double noise_comm);

/// Structured text record for CLI output.
std::string format_report(const KktReport& r);

}  // namespace dfrc
