#include "dfrc/metrics.hpp"

#include <cmath>

namespace dfrc {

CMatrix Scenario::channel_gram(int k) const {
  CVector h = channel(k);
  return h * h.adjoint();
}

void Scenario::validate(bool strict) const {
  const int nt = geometry.n_tx;
  const int nr = geometry.n_rx;
  if (nt < 2 || nr < 2) throw Error(ErrorCode::InvalidArgument, "arrays need at least two elements");
  if (channels.rows() > 0 && channels.cols() != nt)
    throw Error(ErrorCode::DimensionMismatch, "channel matrix must have N_t columns");
  if (static_cast<int>(sinr_thresholds.size()) != users())
    throw Error(ErrorCode::DimensionMismatch, "one SINR threshold per user required");
  for (double g : sinr_thresholds)
    if (!(g > 0.0)) throw Error(ErrorCode::InvalidArgument, "SINR thresholds must be positive");
  if (!(power_budget > 0.0) || !(noise_comm > 0.0) || !(noise_radar > 0.0))
    throw Error(ErrorCode::InvalidArgument, "powers must be strictly positive");
  if (frame_len < 1) throw Error(ErrorCode::InvalidArgument, "frame length must be positive");
  if (!(std::abs(point.theta) < kPi / 2))
    throw Error(ErrorCode::InvalidArgument, "target angle must lie in (-pi/2, pi/2)");
  if (extended_response && (extended_response->rows() != nr || extended_response->cols() != nt))
    throw Error(ErrorCode::DimensionMismatch, "extended response must be N_r x N_t");
  if (strict) {
    if (!(users() < nt && nt < nr))
      throw Error(ErrorCode::InvalidArgument, "expected K < N_t < N_r");
    if (!(frame_len > nt)) throw Error(ErrorCode::InvalidArgument, "expected L > N_t");
  }
}

PointTraces point_traces(const CMatrix& R, double theta, const ArrayGeometry& g) {
  if (R.rows() != g.n_tx || R.cols() != g.n_tx)
    throw Error(ErrorCode::DimensionMismatch, "covariance must be N_t x N_t");
  CVector a = steering(theta, g.n_tx);
  CVector ad = steering_deriv(theta, g.n_tx);
  double nb = g.n_rx;
  double nbd = steering_deriv_norm2(theta, g.n_rx);
  CVector Ra = R * a;
  PointTraces t;
  t.taa = nb * a.dot(Ra).real();
  t.tda = nb * Ra.dot(ad);  // a^H R adot
  t.tdd = nbd * a.dot(Ra).real() + nb * ad.dot(R * ad).real();
  return t;
}

double schur_term(const PointTraces& tr) {
  return tr.tdd - std::norm(tr.tda) / tr.taa;
}

namespace {

double fisher_det(const PointTraces& t) {
  double lead = t.tdd * t.taa;
  double d = lead - std::norm(t.tda);
  if (!(lead > 0.0) || d <= 1e-12 * lead)
    throw Error(ErrorCode::SingularFim, "point-target information is singular for this covariance");
  return d;
}

}  // namespace

double crb_point_theta(const CMatrix& R, double theta, Complex alpha, const Scenario& s) {
  PointTraces t = point_traces(R, theta, s.geometry);
  double d = fisher_det(t);
  return s.noise_radar * t.taa / (2.0 * std::norm(alpha) * s.frame_len * d);
}

double crb_point_alpha(const CMatrix& R, double theta, Complex alpha, const Scenario& s) {
  (void)alpha;
  PointTraces t = point_traces(R, theta, s.geometry);
  double d = fisher_det(t);
  return s.noise_radar * t.tdd / (s.frame_len * d);
}

CMatrix fim_extended(const CMatrix& R, const Scenario& s) {
  return (s.frame_len / (s.noise_radar * s.geometry.n_rx)) * R;
}

double trace_inverse(const CMatrix& R) {
  RVector ev = herm_eigenvalues(R);
  const Eigen::Index n = ev.size();
  if (n == 0) throw Error(ErrorCode::DimensionMismatch, "empty covariance");
  if (!(ev(0) > 1e-10 * ev(n - 1)) || !(ev(n - 1) > 0.0))
    throw Error(ErrorCode::SingularCovariance, "covariance is rank deficient");
  return ev.cwiseInverse().sum();
}

double crb_extended(const CMatrix& R, const Scenario& s) {
  if (R.rows() != s.geometry.n_tx || R.cols() != s.geometry.n_tx)
    throw Error(ErrorCode::DimensionMismatch, "covariance must be N_t x N_t");
  return s.noise_radar * s.geometry.n_rx / s.frame_len * trace_inverse(R);
}

namespace {

double sinr_impl(const DesignSolution& sol, int k, const Scenario& s, bool with_aux) {
  const CMatrix& W = sol.comm_beamformers;
  if (k < 0 || k >= s.users() || k >= W.cols())
    throw Error(ErrorCode::InvalidArgument, "user index out of range");
  if (W.rows() != s.geometry.n_tx)
    throw Error(ErrorCode::DimensionMismatch, "beamformers must have N_t rows");
  Eigen::RowVectorXcd hW = s.channels.row(k) * W;  // entries h_k^H w_i
  double useful = std::norm(hW(k));
  double interf = hW.squaredNorm() - useful;
  if (with_aux) {
    if (!sol.aux_beamformer) throw Error(ErrorCode::InvalidArgument, "solution has no aux beamformer");
    interf += (s.channels.row(k) * *sol.aux_beamformer).squaredNorm();
  }
  return useful / (interf + s.noise_comm);
}

}  // namespace

double sinr_point(const DesignSolution& sol, int k, const Scenario& s) {
  return sinr_impl(sol, k, s, false);
}

double sinr_extended(const DesignSolution& sol, int k, const Scenario& s) {
  return sinr_impl(sol, k, s, true);
}

double sinr_covariance(const CMatrix& W_k, const CMatrix& R, int k, const Scenario& s) {
  CVector h = s.channel(k);
  double useful = h.dot(W_k * h).real();
  double total = h.dot(R * h).real();
  return useful / (total - useful + s.noise_comm);
}

std::vector<double> achieved_sinrs(const DesignSolution& sol, const Scenario& s) {
  std::vector<double> out;
  for (int k = 0; k < s.users(); ++k)
    out.push_back(sol.aux_beamformer ? sinr_extended(sol, k, s) : sinr_point(sol, k, s));
  return out;
}

RVector beampattern(const CMatrix& R, const std::vector<double>& theta_grid, const ArrayGeometry& g) {
  if (R.rows() != g.n_tx || R.cols() != g.n_tx)
    throw Error(ErrorCode::DimensionMismatch, "covariance must be N_t x N_t");
  RVector out(static_cast<Eigen::Index>(theta_grid.size()));
  for (std::size_t i = 0; i < theta_grid.size(); ++i) {
    CVector a = steering(theta_grid[i], g.n_tx);
    out(static_cast<Eigen::Index>(i)) = std::max(0.0, a.dot(R * a).real());
  }
  return out;
}

}  // namespace dfrc
