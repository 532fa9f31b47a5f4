#include "dfrc/verify.hpp"

#include <algorithm>
#include <cmath>
#include <sstream>

namespace dfrc {

double SchurCheck::relative_difference() const {
  return std::abs(t_lmi - t_closed) / std::max({std::abs(t_lmi), std::abs(t_closed), 1e-300});
}

namespace {

// smallest eigenvalue of the Hermitian 2x2 [[p11, p12], [conj(p12), p22]]
double min_eig_2x2(double p11, Complex p12, double p22) {
  CMatrix P(2, 2);
  P << p11, p12, std::conj(p12), p22;
  return herm_eigenvalues(P)(0);
}

}  // namespace

SchurCheck check_schur(const CMatrix& R, double theta, const ArrayGeometry& g) {
  // traces assembled from the full response matrices, not the factored forms
  const CMatrix A = steering(theta, g.n_rx) * steering(theta, g.n_tx).adjoint();
  const CMatrix Ad = steering_deriv(theta, g.n_rx) * steering(theta, g.n_tx).adjoint() +
                     steering(theta, g.n_rx) * steering_deriv(theta, g.n_tx).adjoint();
  const double taa = (A.adjoint() * A * R).trace().real();
  const Complex tda = (Ad.adjoint() * A * R).trace();
  const double tdd = (Ad.adjoint() * Ad * R).trace().real();
  if (!(taa > 1e-14 * std::max(1.0, std::abs(tdd))))
    throw Error(ErrorCode::DegenerateDenominator, "tr(A^H A R) vanishes");

  SchurCheck out;
  out.t_closed = tdd - std::norm(tda) / taa;

  // bisection on the largest t keeping [[tdd - t, tda], [conj, taa]] PSD
  double lo = -std::abs(tdd) - 1.0, hi = tdd;
  // the (1,1) entry must stay nonnegative, so t <= tdd; lo is feasible since
  // large (1,1) entries dominate the fixed off-diagonal term
  while (min_eig_2x2(tdd - lo, tda, taa) < 0.0) lo = tdd - 2.0 * (tdd - lo);
  for (int it = 0; it < 200; ++it) {
    double mid = 0.5 * (lo + hi);
    if (min_eig_2x2(tdd - mid, tda, taa) >= 0.0)
      lo = mid;
    else
      hi = mid;
    if (hi - lo <= 1e-15 * std::max(1.0, std::abs(hi))) break;
  }
  out.t_lmi = lo;
  return out;
}

double KktReport::max_residual() const {
  double m = std::max({stationarity, phi_residual, gamma_residual, std::max(0.0, -min_multiplier)});
  for (double v : complementarity) m = std::max(m, v);
  for (double v : dual_feasibility) m = std::max(m, std::max(0.0, -v));
  return m;
}

bool KktReport::ok(double tol) const { return std::isfinite(max_residual()) && max_residual() <= tol; }

CMatrix f_matrix(Complex beta, const ArrayGeometry& g, double theta) {
  const CVector a = steering(theta, g.n_tx);
  const CVector ad = steering_deriv(theta, g.n_tx);
  const double nb2 = steering(theta, g.n_rx).squaredNorm();
  const double nbd2 = steering_deriv(theta, g.n_rx).squaredNorm();
  CMatrix Abar(g.n_tx, 2);
  Abar.col(0) = a;
  Abar.col(1) = ad;
  CMatrix M(2, 2);
  M << nbd2 + std::norm(beta) * nb2, beta * nb2, std::conj(beta) * nb2, nb2;
  return Abar * M * Abar.adjoint();
}

std::pair<double, double> eig_F(Complex beta, const ArrayGeometry& g, double theta) {
  const double nt = g.n_tx, nr = g.n_rx;
  const double c2 = std::cos(theta) * std::cos(theta);
  const double bd2 = kPi * kPi * c2 * nr * (nr * nr - 1.0) / 12.0;
  const double ad2 = kPi * kPi * c2 * nt * (nt * nt - 1.0) / 12.0;
  const double b2 = std::norm(beta);
  const double x = nt * (bd2 + b2 * nr);
  const double y = nr * ad2;
  const double root = std::sqrt((x - y) * (x - y) + 4.0 * b2 * nt * nr * nr * ad2);
  const double l1 = 0.5 * (x + y + root);
  // lambda1 * lambda2 = N_t N_r |bdot|^2 |adot|^2 for every beta; the difference form cancels for large |beta|
  if (l1 == 0.0) return {0.0, 0.0};
  return {l1, nt * nr * bd2 * ad2 / l1};
}

KktReport check_kkt_point(const DesignSolution& sol, const PointDuals& d, const Scenario& s) {
  const int K = s.users();
  const int nt = s.geometry.n_tx;
  if (static_cast<int>(sol.relaxed_blocks.size()) < K || static_cast<int>(d.mu.size()) != K ||
      static_cast<int>(d.Z.size()) != K)
    throw Error(ErrorCode::DimensionMismatch, "KKT check needs K relaxed blocks and K multipliers");
  KktReport rep;
  const double theta = s.point.theta;
  const CVector a = steering(theta, nt);
  const CVector ad = steering_deriv(theta, nt);
  const double nb2 = s.geometry.n_rx;
  const double nbd2 = steering_deriv_norm2(theta, s.geometry.n_rx);

  CMatrix R = CMatrix::Zero(nt, nt);
  for (int k = 0; k < K; ++k) R += sol.relaxed_blocks[k];
  std::vector<CMatrix> Q;
  for (int k = 0; k < K; ++k) Q.push_back(s.channel_gram(k));

  // F from the literal Z_P entries (phi, beta, gamma)
  CMatrix Abar(nt, 2);
  Abar.col(0) = a;
  Abar.col(1) = ad;
  CMatrix M(2, 2);
  M << d.phi * nbd2 + d.gamma * nb2, d.beta * nb2, std::conj(d.beta) * nb2, d.phi * nb2;
  const CMatrix F = Abar * M * Abar.adjoint();

  CMatrix Fbar = F;
  for (int i = 0; i < K; ++i) Fbar -= d.mu[i] * s.sinr_thresholds[i] * Q[i];
  const double scale = std::max({1.0, std::abs(d.mu_T), F.norm()});

  double stat = 0.0;
  rep.dual_feasibility.clear();
  for (int k = 0; k < K; ++k) {
    CMatrix Zk = d.mu_T * CMatrix::Identity(nt, nt) - Fbar - d.mu[k] * (1.0 + s.sinr_thresholds[k]) * Q[k];
    Zk = hermitian_part(Zk);
    stat = std::max(stat, (Zk - d.Z[k]).norm() / scale);
    rep.dual_feasibility.push_back(herm_eigenvalues(Zk)(0) / scale);
  }
  rep.stationarity = stat;
  rep.dual_feasibility.push_back(herm_eigenvalues(d.Z_P)(0) / std::max(1.0, d.Z_P.norm()));

  const double mu_max = std::max(1.0, *std::max_element(d.mu.begin(), d.mu.end()));
  for (int k = 0; k < K; ++k) {
    const double g = s.sinr_thresholds[k];
    double useful = (Q[k] * sol.relaxed_blocks[k]).trace().real();
    double interf = (Q[k] * R).trace().real() - useful;
    double slack = useful - g * interf - g * s.noise_comm;
    double ref = useful + g * interf + g * s.noise_comm;
    rep.complementarity.push_back(std::abs(d.mu[k] * slack) / (std::max(mu_max, std::abs(d.mu_T)) * ref));
  }
  {
    double slack = R.trace().real() - s.power_budget;
    rep.complementarity.push_back(std::abs(d.mu_T * slack) / (std::max(1.0, std::abs(d.mu_T)) * s.power_budget));
  }
  for (int k = 0; k < K; ++k) {
    double denom = std::max(1e-300, d.Z[k].norm() * sol.relaxed_blocks[k].norm());
    rep.complementarity.push_back(std::abs((d.Z[k] * sol.relaxed_blocks[k]).trace().real()) / denom);
  }
  {
    // P at the optimal t: the Schur complement vanishes
    PointTraces tr = point_traces(R, theta, s.geometry);
    const double t = schur_term(tr);
    CMatrix P(2, 2);
    P << tr.tdd - t, tr.tda, std::conj(tr.tda), tr.taa;
    double denom = std::max(1e-300, d.Z_P.norm() * P.norm());
    rep.complementarity.push_back(std::abs((d.Z_P * P).trace().real()) / denom);
  }

  rep.phi_residual = std::abs(d.phi - 1.0);
  rep.gamma_residual = std::abs(d.gamma - std::norm(d.beta)) / std::max({1.0, d.gamma, std::norm(d.beta)});
  rep.min_multiplier = std::min(d.mu_T, *std::min_element(d.mu.begin(), d.mu.end())) / std::max(mu_max, std::abs(d.mu_T));

  const double thr = 1e-8 * std::max(1.0, d.mu_T);
  for (int k = 0; k < K; ++k)
    if (d.mu[k] > thr) rep.active_set.push_back(k);
  std::ostringstream note;
  note << "active SINR multipliers: " << rep.active_set.size() << " of " << K;
  rep.notes.push_back(note.str());
  return rep;
}

RankReport check_theorem2_condition(const CMatrix& H, double theta, const ArrayGeometry& g) {
  if (H.cols() != g.n_tx) throw Error(ErrorCode::DimensionMismatch, "channel matrix must have N_t columns");
  CMatrix Abar(g.n_tx, 2);
  Abar.col(0) = steering(theta, g.n_tx);
  Abar.col(1) = steering_deriv(theta, g.n_tx);
  const CMatrix D = H * Abar;
  RankReport r;
  r.singular_values = Eigen::JacobiSVD<CMatrix>(D).singularValues();
  // tolerance scaled by the factors, so a D that is zero up to rounding has rank 0
  const double tol = 1e-8 * H.norm() * Abar.norm();
  for (Eigen::Index i = 0; i < r.singular_values.size(); ++i) r.rank += r.singular_values(i) > tol;
  r.full_column_rank = r.rank == 2;
  return r;
}

double ExtendedKktReport::max_residual() const {
  return std::max({stationarity, power_residual, complementarity, dual_sign, primal_sinr});
}

ExtendedKktReport check_kkt_extended_single(const CMatrix& R, const CVector& h1, double gamma1, double power,
                                            double noise_comm) {
  const Eigen::Index n = R.rows();
  if (h1.size() != n || R.cols() != n) throw Error(ErrorCode::DimensionMismatch, "size mismatch");
  ExtendedKktReport rep;
  const double hn2 = h1.squaredNorm();
  const CVector u1 = h1 / std::sqrt(hn2);
  rep.lambda_h = u1.dot(R * u1).real();
  const CMatrix Pp = CMatrix::Identity(n, n) - u1 * u1.adjoint();
  RVector ev = herm_eigenvalues(Pp * R * Pp);
  // the projected matrix has one structural zero; keep the top n - 1
  for (Eigen::Index i = 1; i < n; ++i) rep.lambda_perp.push_back(ev(i));

  double mu = 0.0;
  for (double l : rep.lambda_perp) mu += 1.0 / (l * l);
  mu /= static_cast<double>(rep.lambda_perp.size());
  rep.mu = mu;
  double spread = 0.0;
  for (double l : rep.lambda_perp) spread = std::max(spread, std::abs(1.0 / (l * l) - mu));
  rep.stationarity = spread / mu;
  rep.omega = mu - 1.0 / (rep.lambda_h * rep.lambda_h);
  double total = rep.lambda_h;
  for (double l : rep.lambda_perp) total += l;
  rep.power_residual = std::abs(total - power) / power;
  const double floor = gamma1 * noise_comm / hn2;
  rep.complementarity = std::abs(rep.omega * (rep.lambda_h - floor)) / (mu * power);
  rep.dual_sign = std::max(0.0, -rep.omega) / mu;
  rep.primal_sinr = std::max(0.0, floor - rep.lambda_h) / power;
  return rep;
}

std::string format_report(const KktReport& r) {
  std::ostringstream os;
  os.precision(6);
  os << std::scientific;
  os << "stationarity " << r.stationarity << "\n";
  os << "phi_residual " << r.phi_residual << "\n";
  os << "gamma_residual " << r.gamma_residual << "\n";
  os << "min_multiplier " << r.min_multiplier << "\n";
  for (std::size_t i = 0; i < r.complementarity.size(); ++i) os << "complementarity[" << i << "] " << r.complementarity[i] << "\n";
  for (std::size_t i = 0; i < r.dual_feasibility.size(); ++i) os << "dual_min_eig[" << i << "] " << r.dual_feasibility[i] << "\n";
  os << "active_set";
  for (int k : r.active_set) os << " " << k + 1;
  os << "\n";
  for (const auto& n : r.notes) os << "note " << n << "\n";
  os << "max_residual " << r.max_residual() << "\n";
  os << "status " << (r.ok() ? "PASS" : "FAIL") << "\n";
  return os.str();
}

}  // namespace dfrc
