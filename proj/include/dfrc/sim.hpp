#pragma once

#include <cstdint>
#include <functional>
#include <vector>

#include "dfrc/metrics.hpp"

namespace dfrc {

/// n_streams x L matrix with (1/L) S S^H = I, from seeded Gaussian rows made
/// orthonormal and scaled by sqrt(L).
CMatrix gen_streams(int n_streams, int frame_len, std::uint64_t seed);

/// X = W S.
CMatrix synth_tx(const CMatrix& W, const CMatrix& S);

/// Y = G X + Z with Z i.i.d. CN(0, sigma_R2).
CMatrix radar_echo(const CMatrix& X, const CMatrix& G, double noise_radar, std::uint64_t seed);
CMatrix radar_echo(const CMatrix& X, const PointTarget& t, const ArrayGeometry& g, double noise_radar,
                   std::uint64_t seed);

/// Search window centred on the predicted direction.
struct GridSpec {
  double center = 0.0;
  double half_width = 10.0 * kPi / 180.0;
  double step = 0.05 * kPi / 180.0;
};

struct PointEstimate {
  double theta = 0.0;
  Complex alpha{0.0, 0.0};
};

/// Grid search of the concentrated likelihood followed by iterated
/// three-point parabolic refinement.
PointEstimate mle_point(const CMatrix& Y, const CMatrix& X, const GridSpec& grid, const ArrayGeometry& g);

/// Least squares Y X^H (X X^H)^{-1}.
CMatrix mle_extended(const CMatrix& Y, const CMatrix& X);

/// Runs fn(i) for i in [0, n) across worker threads. Each index is handled
/// exactly once, so results written per index are independent of scheduling.
void parallel_for(std::size_t n, const std::function<void(std::size_t)>& fn, unsigned threads = 0);

struct McConfig {
  int trials = 1000;
  std::uint64_t seed = 1;
  unsigned threads = 0;  // 0: hardware concurrency
};

struct McRow {
  double parameter = 0.0;  // swept value (e.g. SNR in dB)
  double empirical = 0.0;  // RMSE(theta) in rad, or MSE(G)
  double bound = 0.0;      // sqrt(CRB(theta)) in rad, or CRB(G)
  int trials = 0;
  std::uint64_t seed = 0;
  double ratio() const { return empirical / bound; }
};

/// Reflection coefficient magnitude giving SNR_radar = |alpha|^2 L P_T / sigma_R^2.
double alpha_for_snr(double snr_db, const Scenario& s);

/// Point target: for each SNR, the MLE RMSE of theta against sqrt(CRB).
/// W holds the transmit beamformers (N_t x streams).
std::vector<McRow> monte_carlo_point(const Scenario& s, const CMatrix& W, const std::vector<double>& snr_db,
                                     const GridSpec& grid, const McConfig& cfg);

/// Extended target: MSE of the least-squares estimate against CRB(G), with
/// W = [W_C, W_A] (N_t x (K + N_t)) and G drawn once from the seed.
McRow monte_carlo_extended(const Scenario& s, const CMatrix& W, const McConfig& cfg, std::uint64_t sweep_index = 0);

}  // namespace dfrc
