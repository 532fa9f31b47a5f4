#pragma once

#include <limits>
#include <optional>
#include <string>
#include <vector>

#include "dfrc/array_model.hpp"

namespace dfrc {

/// Everything a designer or evaluator needs about one operating point.
/// Powers are linear (mW); thresholds are linear ratios.
struct Scenario {
  ArrayGeometry geometry;
  CMatrix channels;  // K x N_t, row k holds h_k^H
  std::vector<double> sinr_thresholds;
  double power_budget = 1000.0;
  double noise_comm = 1.0;
  double noise_radar = 1.0;
  int frame_len = 30;
  PointTarget point;
  std::optional<CMatrix> extended_response;

  int users() const { return static_cast<int>(channels.rows()); }
  CVector channel(int k) const { return channels.row(k).adjoint(); }
  CMatrix channel_gram(int k) const;  // Q_k = h_k h_k^H

  /// Structural checks (dimensions, positivity). The K < N_t < N_r and
  /// L > N_t orderings are only enforced when `strict` is set.
  void validate(bool strict = false) const;
};

enum class DesignStatus { Optimal, RankExcess };

struct Diagnostics {
  DesignStatus status = DesignStatus::Optimal;
  std::string solver_status = "closed-form";
  int iterations = 0;
  double primal_residual = 0.0;
  double dual_residual = 0.0;
  double gap = 0.0;
  std::vector<int> ranks;
  std::vector<double> rank_ratios;  // lambda_2 / lambda_1 per relaxed block
  std::vector<std::string> notes;
};

/// Multipliers of the point-target SDR problem in Lagrangian convention:
/// mu >= 0 for SINR rows, mu_T >= 0 for the power row, Z_P and Z_k PSD.
struct PointDuals {
  std::vector<double> mu;
  double mu_T = 0.0;
  double phi = 0.0;    // multiplier of the t-row, equals 1 at optimum
  Complex beta{0.0, 0.0};
  double gamma = 0.0;
  CMatrix Z_P;
  std::vector<CMatrix> Z;
};

struct DesignSolution {
  CMatrix comm_beamformers;                // N_t x K, column k is w_k
  std::optional<CMatrix> aux_beamformer;   // W_A, N_t x N_t
  CMatrix covariance;                      // R_X
  std::vector<double> achieved_sinrs;
  double objective = std::numeric_limits<double>::quiet_NaN();
  double surrogate = std::numeric_limits<double>::quiet_NaN();
  Diagnostics diagnostics;
  std::vector<CMatrix> relaxed_blocks;     // W_k as returned by the relaxation
  std::optional<PointDuals> duals;
};

/// Traces tr(A^H A R), tr(Adot^H A R), tr(Adot^H Adot R) for A = b a^H.
struct PointTraces {
  double taa = 0.0;
  Complex tda{0.0, 0.0};
  double tdd = 0.0;
};

PointTraces point_traces(const CMatrix& R, double theta, const ArrayGeometry& g);

/// Schur term tr(Adot^H Adot R) - |tr(Adot^H A R)|^2 / tr(A^H A R).
double schur_term(const PointTraces& tr);

double crb_point_theta(const CMatrix& R, double theta, Complex alpha, const Scenario& s);
double crb_point_alpha(const CMatrix& R, double theta, Complex alpha, const Scenario& s);

CMatrix fim_extended(const CMatrix& R, const Scenario& s);
double crb_extended(const CMatrix& R, const Scenario& s);

/// tr(R^{-1}); throws SingularCovariance when lambda_min <= 1e-10 lambda_max.
double trace_inverse(const CMatrix& R);

double sinr_point(const DesignSolution& sol, int k, const Scenario& s);
double sinr_extended(const DesignSolution& sol, int k, const Scenario& s);

/// SINR of user k when the useful covariance is W_k and everything else in R
/// acts as interference: h^H W_k h / (h^H (R - W_k) h + sigma_C^2).
double sinr_covariance(const CMatrix& W_k, const CMatrix& R, int k, const Scenario& s);

/// Fills achieved_sinrs using the aux beamformer when present.
std::vector<double> achieved_sinrs(const DesignSolution& sol, const Scenario& s);

RVector beampattern(const CMatrix& R, const std::vector<double>& theta_grid, const ArrayGeometry& g);

}  // namespace dfrc
