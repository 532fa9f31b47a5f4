#pragma once

#include <vector>

#include "dfrc/metrics.hpp"
#include "dfrc/sdp.hpp"

namespace dfrc {

/// Closed-form single-user point-target beamformer (maximizes |a^H w|^2
/// under the SINR and power constraints). Objective is left NaN; the
/// surrogate holds |a^H w|^2.
DesignSolution design_point_single(const CVector& h1, double theta, double gamma1, double power,
                                   double noise_comm, const ArrayGeometry& g);
/// Same, with CRB(theta) of the design stored in `objective`.
DesignSolution design_point_single(const Scenario& s);

/// Closed-form single-user extended-target design. Surrogate is tr(R^{-1}).
DesignSolution design_extended_single(const CVector& h1, double gamma1, double power, double noise_comm,
                                      const ArrayGeometry& g);
DesignSolution design_extended_single(const Scenario& s);

/// Eigenvalues lambda_11 (along h1) and lambda_ii (i >= 2) of the closed-form
/// extended single-user covariance.
struct ExtendedSingleSpectrum {
  double lambda_h = 0.0;
  double lambda_perp = 0.0;
  bool constrained = false;  // SINR constraint active
};
ExtendedSingleSpectrum extended_single_spectrum(double h_norm2, double gamma1, double power, double noise_comm,
                                                int n_tx);

/// Semidefinite relaxation for K users and a point target. Variables are
/// scaled internally so the solver sees O(1) data.
DesignSolution design_point_multi(const Scenario& s, const sdp::SolverOptions& opts = {});

/// Epigraph relaxation for K users and an extended target, followed by
/// rank-one extraction.
DesignSolution design_extended_multi(const Scenario& s, const sdp::SolverOptions& opts = {});

struct RankOneExtraction {
  std::vector<CMatrix> W_tilde;  // rank-one W_k
  CMatrix beamformers;           // N_t x K
  CMatrix aux_covariance;        // R_bar - sum W_tilde
  CMatrix aux_beamformer;        // psd_sqrt of aux_covariance
};

RankOneExtraction extract_rank_one(const CMatrix& R_bar, const std::vector<CMatrix>& W_bar,
                                   const std::vector<CMatrix>& Q);

/// Baseline: each relaxed W_k replaced by its dominant eigencomponent, the
/// relaxed auxiliary covariance kept, total power capped at P_T. SINR is not
/// re-enforced. `relaxed` must come from design_extended_multi.
DesignSolution eig_truncation_baseline(const DesignSolution& relaxed, const Scenario& s);

// Building blocks exposed for verification.

/// Point-target relaxation in scaled variables W' = W/P_T, P' = P/kappa, t' = t/kappa.
struct PointSdpLayout {
  std::vector<int> w_blocks;
  int p_block = -1;
  int t_free = -1;
  int first_sinr_row = -1;
  int power_row = -1;
  double kappa = 1.0;  // P_T * c
  double c = 1.0;
};
sdp::SdpProblem build_point_sdp(const Scenario& s, PointSdpLayout& layout);

/// Recovers Lagrangian multipliers of the unscaled problem from a solver answer.
PointDuals point_duals_from_solution(const sdp::SdpSolution& sol, const PointSdpLayout& layout, int users);

}  // namespace dfrc
