#include "dfrc/designs.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <string>

namespace dfrc {

namespace {

constexpr double kRankTol = 1e-6;

Complex unit_phase(Complex z) {
  double m = std::abs(z);
  return m > 0.0 ? z / m : Complex(1.0, 0.0);
}

void require_feasible_single(double h_norm2, double gamma1, double power, double noise_comm) {
  if (!(gamma1 >= 0.0) || !(power > 0.0) || !(noise_comm > 0.0))
    throw Error(ErrorCode::InvalidArgument, "threshold, power and noise must be positive");
  if (!(h_norm2 > 0.0)) throw Error(ErrorCode::InvalidArgument, "channel must be nonzero");
  if (gamma1 * noise_comm > power * h_norm2)
    throw Error(ErrorCode::Infeasible, "SINR threshold exceeds what the power budget can deliver");
}

Scenario single_user_view(const CVector& h1, double gamma1, double power, double noise_comm,
                          const ArrayGeometry& g) {
  Scenario s;
  s.geometry = g;
  s.channels = h1.adjoint();
  s.sinr_thresholds = {gamma1};
  s.power_budget = power;
  s.noise_comm = noise_comm;
  return s;
}

std::vector<CMatrix> channel_grams(const Scenario& s) {
  std::vector<CMatrix> Q;
  for (int k = 0; k < s.users(); ++k) Q.push_back(s.channel_gram(k));
  return Q;
}

void record_ranks(DesignSolution& sol, const std::vector<CMatrix>& blocks) {
  sol.diagnostics.ranks.clear();
  sol.diagnostics.rank_ratios.clear();
  for (const auto& W : blocks) {
    sol.diagnostics.ranks.push_back(numeric_rank(W, kRankTol));
    sol.diagnostics.rank_ratios.push_back(second_eigen_ratio(W));
  }
}

void copy_solver_diagnostics(DesignSolution& sol, const sdp::SdpSolution& r) {
  sol.diagnostics.solver_status = sdp::to_string(r.status);
  sol.diagnostics.iterations = r.iterations;
  sol.diagnostics.primal_residual = r.residuals.primal;
  sol.diagnostics.dual_residual = r.residuals.dual;
  sol.diagnostics.gap = r.residuals.gap;
}

std::string sci(double v) {
  char buf[32];
  std::snprintf(buf, sizeof buf, "%.2e", v);
  return buf;
}

void throw_on_status(const sdp::SdpSolution& r) {
  if (r.status == sdp::Status::Infeasible)
    throw Error(ErrorCode::Infeasible, "SINR constraints cannot be met within the power budget (dual ray found, margin " +
                                           sci(r.certificate_margin) + ")");
  if (r.status != sdp::Status::Optimal)
    throw Error(ErrorCode::SolverFailure, std::string("SDP solver stopped with status ") + sdp::to_string(r.status) +
                                              " (max residual " + sci(r.residuals.max()) + ")");
}

// Real/imaginary part selectors of entry (r, c) with r < c as Hermitian coefficients.
sdp::HermCoef re_entry(int r, int c, double s = 1.0) { return sdp::HermCoef::entry(r, c, Complex(0.5 * s, 0.0)); }
sdp::HermCoef im_entry(int r, int c, double s = 1.0) { return sdp::HermCoef::entry(r, c, Complex(0.0, 0.5 * s)); }

}  // namespace

// ---------------------------------------------------------------- single user, point

DesignSolution design_point_single(const CVector& h1, double theta, double gamma1, double power, double noise_comm,
                                   const ArrayGeometry& g) {
  if (h1.size() != g.n_tx) throw Error(ErrorCode::DimensionMismatch, "channel length must equal N_t");
  const double hn2 = h1.squaredNorm();
  require_feasible_single(hn2, gamma1, power, noise_comm);
  const CVector a = steering(theta, g.n_tx);
  const double nt = g.n_tx;

  DesignSolution sol;
  CVector w;
  if (power * std::norm(h1.dot(a)) > nt * gamma1 * noise_comm) {
    w = std::sqrt(power) * a / a.norm();
    sol.diagnostics.notes.push_back("branch: steer towards target");
  } else {
    const CVector u1 = h1 / std::sqrt(hn2);
    const CVector resid = a - u1.dot(a) * u1;
    if (resid.norm() <= 1e-10 * a.norm()) {
      // h1 parallel to a: the span collapses, and feasibility (checked above)
      // means steering at the target meets the threshold, with equality here
      w = std::sqrt(power) * a / a.norm();
      sol.diagnostics.notes.push_back("branch: channel parallel to target, steer towards target");
    } else {
      const CVector au = resid / resid.norm();
      const double p1 = gamma1 * noise_comm / hn2;
      w = std::sqrt(p1) * unit_phase(u1.dot(a)) * u1 + std::sqrt(std::max(0.0, power - p1)) * unit_phase(au.dot(a)) * au;
      sol.diagnostics.notes.push_back("branch: SINR constraint active");
    }
  }
  sol.comm_beamformers = w;
  sol.covariance = w * w.adjoint();
  sol.surrogate = std::norm(a.dot(w));
  Scenario view = single_user_view(h1, gamma1, power, noise_comm, g);
  sol.achieved_sinrs = {sinr_point(sol, 0, view)};
  sol.diagnostics.ranks = {1};
  sol.diagnostics.rank_ratios = {0.0};
  return sol;
}

DesignSolution design_point_single(const Scenario& s) {
  s.validate();
  if (s.users() != 1) throw Error(ErrorCode::InvalidArgument, "single-user design needs K = 1");
  DesignSolution sol =
      design_point_single(s.channel(0), s.point.theta, s.sinr_thresholds[0], s.power_budget, s.noise_comm, s.geometry);
  sol.objective = crb_point_theta(sol.covariance, s.point.theta, s.point.alpha, s);
  return sol;
}

// ---------------------------------------------------------------- single user, extended

ExtendedSingleSpectrum extended_single_spectrum(double h_norm2, double gamma1, double power, double noise_comm,
                                                int n_tx) {
  require_feasible_single(h_norm2, gamma1, power, noise_comm);
  ExtendedSingleSpectrum sp;
  if (gamma1 < power * h_norm2 / (n_tx * noise_comm)) {
    sp.lambda_h = sp.lambda_perp = power / n_tx;
  } else {
    sp.constrained = true;
    sp.lambda_h = gamma1 * noise_comm / h_norm2;
    sp.lambda_perp = (power * h_norm2 - gamma1 * noise_comm) / (h_norm2 * (n_tx - 1));
  }
  return sp;
}

DesignSolution design_extended_single(const CVector& h1, double gamma1, double power, double noise_comm,
                                      const ArrayGeometry& g) {
  if (h1.size() != g.n_tx) throw Error(ErrorCode::DimensionMismatch, "channel length must equal N_t");
  const double hn2 = h1.squaredNorm();
  ExtendedSingleSpectrum sp = extended_single_spectrum(hn2, gamma1, power, noise_comm, g.n_tx);
  const int nt = g.n_tx;
  const CVector u1 = h1 / std::sqrt(hn2);
  const CMatrix P = u1 * u1.adjoint();
  const CMatrix I = CMatrix::Identity(nt, nt);

  DesignSolution sol;
  sol.covariance = sp.lambda_h * P + sp.lambda_perp * (I - P);
  const CVector w = std::sqrt(sp.lambda_h) * u1;
  sol.comm_beamformers = w;
  // R - W_1 = lambda_perp * (I - P), whose canonical square root is exact
  sol.aux_beamformer = std::sqrt(sp.lambda_perp) * (I - P);
  sol.surrogate = sp.lambda_h > 0.0 ? 1.0 / sp.lambda_h + (nt - 1) / sp.lambda_perp
                                    : std::numeric_limits<double>::infinity();
  Scenario view = single_user_view(h1, gamma1, power, noise_comm, g);
  sol.achieved_sinrs = {sinr_extended(sol, 0, view)};
  sol.diagnostics.ranks = {1};
  sol.diagnostics.rank_ratios = {0.0};
  sol.diagnostics.notes.push_back(sp.constrained ? "branch: SINR constraint active" : "branch: isotropic");
  return sol;
}

DesignSolution design_extended_single(const Scenario& s) {
  s.validate();
  if (s.users() != 1) throw Error(ErrorCode::InvalidArgument, "single-user design needs K = 1");
  DesignSolution sol = design_extended_single(s.channel(0), s.sinr_thresholds[0], s.power_budget, s.noise_comm, s.geometry);
  sol.objective = crb_extended(sol.covariance, s);
  return sol;
}

// ---------------------------------------------------------------- multi user, point

sdp::SdpProblem build_point_sdp(const Scenario& s, PointSdpLayout& layout) {
  s.validate();
  const int K = s.users();
  const int nt = s.geometry.n_tx;
  const double theta = s.point.theta;
  const CVector a = steering(theta, nt);
  const CVector ad = steering_deriv(theta, nt);
  const double nb2 = s.geometry.n_rx;
  const double nbd2 = steering_deriv_norm2(theta, s.geometry.n_rx);

  layout = PointSdpLayout{};
  layout.c = nbd2 * nt + nb2 * ad.squaredNorm();
  layout.kappa = s.power_budget * layout.c;
  const double c = layout.c;

  sdp::SdpProblem p;
  for (int k = 0; k < K; ++k) layout.w_blocks.push_back(p.add_block("W" + std::to_string(k + 1), nt));
  layout.p_block = p.add_block("P", 2);
  layout.t_free = p.add_free("t");

  const CMatrix F1 = (nbd2 * a * a.adjoint() + nb2 * ad * ad.adjoint()) / c;
  const CMatrix F2 = (nb2 * a * a.adjoint()) / c;
  const CMatrix M = ad * a.adjoint();  // tr(M R) = a^H R adot
  const CMatrix F3 = nb2 * 0.5 * (M + M.adjoint()) / c;
  const CMatrix F4 = nb2 * (M - M.adjoint()) / (2.0 * kJ) / c;

  auto lmi_row = [&](const sdp::HermCoef& pc, const CMatrix& F, bool with_t) {
    auto& row = p.add_constraint(sdp::Relation::Eq, 0.0);
    row.add(layout.p_block, pc);
    sdp::HermCoef neg = sdp::HermCoef::from_dense(-F);
    for (int blk : layout.w_blocks) row.add(blk, neg);
    if (with_t) row.add_free(layout.t_free, 1.0);
  };
  lmi_row(sdp::HermCoef::entry(0, 0, 1.0), F1, true);
  lmi_row(sdp::HermCoef::entry(1, 1, 1.0), F2, false);
  lmi_row(re_entry(0, 1), F3, false);
  lmi_row(im_entry(0, 1), F4, false);

  layout.first_sinr_row = static_cast<int>(p.constraints.size());
  for (int k = 0; k < K; ++k) {
    const CMatrix Q = s.channel_gram(k);
    const double g = s.sinr_thresholds[k];
    auto& row = p.add_constraint(sdp::Relation::Ge, g * s.noise_comm / s.power_budget, "sinr" + std::to_string(k + 1));
    for (int i = 0; i < K; ++i)
      row.add(layout.w_blocks[i], sdp::HermCoef::from_dense(i == k ? Q : CMatrix(-g * Q)));
  }
  layout.power_row = static_cast<int>(p.constraints.size());
  auto& pw = p.add_constraint(sdp::Relation::Le, 1.0, "power");
  for (int blk : layout.w_blocks) pw.add(blk, sdp::HermCoef::identity(nt));

  p.objective_free.push_back({layout.t_free, -1.0});
  return p;
}

PointDuals point_duals_from_solution(const sdp::SdpSolution& sol, const PointSdpLayout& layout, int users) {
  PointDuals d;
  const double c = layout.c;
  for (int k = 0; k < users; ++k) {
    d.mu.push_back(c * sol.dual_multipliers[layout.first_sinr_row + k]);
    d.Z.push_back(c * sol.dual_slacks[layout.w_blocks[k]]);
  }
  d.mu_T = -c * sol.dual_multipliers[layout.power_row];
  d.Z_P = sol.dual_slacks[layout.p_block];
  d.phi = d.Z_P(0, 0).real();
  d.beta = d.Z_P(0, 1);
  d.gamma = d.Z_P(1, 1).real();
  return d;
}

namespace {

CMatrix f_matrix_expanded(const PointDuals& d, double theta, const ArrayGeometry& g) {
  const CVector a = steering(theta, g.n_tx);
  const CVector ad = steering_deriv(theta, g.n_tx);
  const double nb2 = g.n_rx;
  const double nbd2 = steering_deriv_norm2(theta, g.n_rx);
  CMatrix F = (d.phi * nbd2 + d.gamma * nb2) * a * a.adjoint() + d.phi * nb2 * ad * ad.adjoint();
  F += nb2 * (d.beta * a * ad.adjoint() + std::conj(d.beta) * ad * a.adjoint());
  return F;
}

bool sinrs_hold(const std::vector<CMatrix>& W, const Scenario& s, double rel) {
  CMatrix R = CMatrix::Zero(s.geometry.n_tx, s.geometry.n_tx);
  for (const auto& w : W) R += w;
  for (int k = 0; k < s.users(); ++k)
    if (sinr_covariance(W[k], R, k, s) < s.sinr_thresholds[k] * (1.0 - rel)) return false;
  return true;
}

// Single active SINR multiplier: move the component of W_{k*} outside h_{k*}
// to another user. Returns false when the structure is not as expected.
bool consolidate_single_active(std::vector<CMatrix>& W, const PointDuals& d, const Scenario& s,
                               std::vector<std::string>& notes) {
  const int K = s.users();
  const double thr = 1e-8 * std::max(1.0, d.mu_T);
  std::vector<int> active;
  for (int k = 0; k < K; ++k)
    if (d.mu[k] > thr) active.push_back(k);
  if (active.size() != 1 || K < 2) return false;
  const int ks = active[0];
  const CVector h = s.channel(ks);
  const double hn2 = h.squaredNorm();
  const double a1 = h.dot(W[ks] * h).real() / (hn2 * hn2);
  CMatrix Wk = a1 * h * h.adjoint();
  CMatrix D = W[ks] - Wk;
  const int j = ks == 0 ? 1 : 0;
  std::vector<CMatrix> trial = W;
  trial[ks] = Wk;
  trial[j] = hermitian_part(W[j] + D);
  for (const auto& w : trial) {
    if (second_eigen_ratio(w) > kRankTol) return false;
    RVector ev = herm_eigenvalues(w);
    if (ev(0) < -1e-9 * std::max(1.0, ev(ev.size() - 1))) return false;
  }
  if (!sinrs_hold(trial, s, 1e-6)) return false;
  // sanity: the moved part should align with the dominant eigenvector of F
  EigDecomposition fe_dec = herm_eig(hermitian_part(f_matrix_expanded(d, s.point.theta, s.geometry)));
  const CVector f = fe_dec.vectors.col(fe_dec.vectors.cols() - 1);
  const double b1 = f.dot(D * f).real();
  notes.push_back("single active SINR multiplier (user " + std::to_string(ks + 1) + "): moved power " +
                  std::to_string(b1) + " along the dominant F direction to user " + std::to_string(j + 1));
  W = trial;
  return true;
}

}  // namespace

DesignSolution design_point_multi(const Scenario& s, const sdp::SolverOptions& opts) {
  PointSdpLayout layout;
  sdp::SdpProblem prob = build_point_sdp(s, layout);
  sdp::SdpSolution r = sdp::solve(prob, opts);
  throw_on_status(r);
  const int K = s.users();
  const int nt = s.geometry.n_tx;

  DesignSolution sol;
  copy_solver_diagnostics(sol, r);
  std::vector<CMatrix> W;
  for (int k = 0; k < K; ++k) W.push_back(s.power_budget * r.primal_blocks[layout.w_blocks[k]]);
  sol.relaxed_blocks = W;
  sol.duals = point_duals_from_solution(r, layout, K);
  record_ranks(sol, W);

  bool rank_one = std::all_of(sol.diagnostics.rank_ratios.begin(), sol.diagnostics.rank_ratios.end(),
                              [](double q) { return q <= kRankTol; });
  if (!rank_one) {
    if (consolidate_single_active(W, *sol.duals, s, sol.diagnostics.notes)) {
      rank_one = true;
    } else {
      sol.diagnostics.status = DesignStatus::RankExcess;
      sol.diagnostics.notes.push_back("relaxed solution has rank > 1 and no rank-one repair applies");
    }
  }

  CMatrix R = CMatrix::Zero(nt, nt);
  if (rank_one) {
    sol.comm_beamformers = CMatrix(nt, K);
    for (int k = 0; k < K; ++k) {
      const CVector h = s.channel(k);
      const double useful = h.dot(W[k] * h).real();
      if (!(useful > 0.0)) throw Error(ErrorCode::ZeroUsefulPower, "relaxed beamformer delivers no power to a user");
      sol.comm_beamformers.col(k) = W[k] * h / std::sqrt(useful);
    }
    R = sol.comm_beamformers * sol.comm_beamformers.adjoint();
    sol.achieved_sinrs = achieved_sinrs(sol, s);
  } else {
    sol.comm_beamformers = CMatrix(nt, 0);
    for (const auto& w : W) R += w;
    for (int k = 0; k < K; ++k) sol.achieved_sinrs.push_back(sinr_covariance(W[k], R, k, s));
  }
  sol.covariance = R;
  try {
    sol.surrogate = schur_term(point_traces(R, s.point.theta, s.geometry));
    sol.objective = crb_point_theta(R, s.point.theta, s.point.alpha, s);
  } catch (const Error& e) {
    if (e.code() != ErrorCode::SingularFim) throw;
    // The relaxation can place (numerically) no power on a(theta); its value
    // is then only a limit over covariances that illuminate the target.
    const double t = layout.kappa * r.scalars[layout.t_free];
    sol.surrogate = t;
    sol.objective = s.noise_radar / (2.0 * std::norm(s.point.alpha) * s.frame_len * t);
    sol.diagnostics.notes.push_back("information matrix singular at the relaxed covariance; objective is the relaxation bound");
  }
  return sol;
}

// ---------------------------------------------------------------- multi user, extended

DesignSolution design_extended_multi(const Scenario& s, const sdp::SolverOptions& opts) {
  s.validate();
  const int K = s.users();
  const int nt = s.geometry.n_tx;
  const double P = s.power_budget;

  // epigraph [[T, I], [I, R]] >= 0 with R = sum W_k + W_A, scaled so the
  // budget is 1 (R' = R / P, T' = P T)
  sdp::SdpProblem p;
  const int B = p.add_block("epigraph", 2 * nt);
  std::vector<int> wb;
  for (int k = 0; k < K; ++k) wb.push_back(p.add_block("W" + std::to_string(k + 1), nt));
  const int wa = p.add_block("W_A", nt);

  for (int r = 0; r < nt; ++r)
    for (int c = 0; c < nt; ++c) {
      p.add_constraint(sdp::Relation::Eq, r == c ? 1.0 : 0.0).add(B, re_entry(r, nt + c));
      p.add_constraint(sdp::Relation::Eq, 0.0).add(B, im_entry(r, nt + c));
    }
  for (int r = 0; r < nt; ++r)
    for (int c = r; c < nt; ++c) {
      if (r == c) {
        auto& row = p.add_constraint(sdp::Relation::Eq, 0.0);
        row.add(B, sdp::HermCoef::entry(nt + r, nt + r, 1.0));
        for (int b : wb) row.add(b, sdp::HermCoef::entry(r, r, -1.0));
        row.add(wa, sdp::HermCoef::entry(r, r, -1.0));
      } else {
        auto& re = p.add_constraint(sdp::Relation::Eq, 0.0);
        re.add(B, re_entry(nt + r, nt + c));
        for (int b : wb) re.add(b, re_entry(r, c, -1.0));
        re.add(wa, re_entry(r, c, -1.0));
        auto& im = p.add_constraint(sdp::Relation::Eq, 0.0);
        im.add(B, im_entry(nt + r, nt + c));
        for (int b : wb) im.add(b, im_entry(r, c, -1.0));
        im.add(wa, im_entry(r, c, -1.0));
      }
    }
  const std::vector<CMatrix> Q = channel_grams(s);
  for (int k = 0; k < K; ++k) {
    const double g = s.sinr_thresholds[k];
    auto& row = p.add_constraint(sdp::Relation::Ge, g * s.noise_comm / P, "sinr" + std::to_string(k + 1));
    for (int i = 0; i < K; ++i) row.add(wb[i], sdp::HermCoef::from_dense(i == k ? Q[k] : CMatrix(-g * Q[k])));
    row.add(wa, sdp::HermCoef::from_dense(-g * Q[k]));
  }
  {
    auto& pw = p.add_constraint(sdp::Relation::Le, 1.0, "power");
    sdp::HermCoef tr;
    for (int r = 0; r < nt; ++r) tr.entries.push_back({nt + r, nt + r, Complex(1.0, 0.0)});
    pw.add(B, tr);
  }
  {
    sdp::HermCoef tr;
    for (int r = 0; r < nt; ++r) tr.entries.push_back({r, r, Complex(1.0, 0.0)});
    p.objective_blocks.push_back({B, tr});
  }

  sdp::SdpSolution r = sdp::solve(p, opts);
  throw_on_status(r);

  DesignSolution sol;
  copy_solver_diagnostics(sol, r);
  std::vector<CMatrix> Wbar;
  CMatrix Rbar = P * r.primal_blocks[wa];
  for (int k = 0; k < K; ++k) {
    Wbar.push_back(P * r.primal_blocks[wb[k]]);
    Rbar += Wbar.back();
  }
  Rbar = hermitian_part(Rbar);
  sol.relaxed_blocks = Wbar;
  sol.relaxed_blocks.push_back(P * r.primal_blocks[wa]);
  record_ranks(sol, Wbar);

  RankOneExtraction ex = extract_rank_one(Rbar, Wbar, Q);
  sol.comm_beamformers = ex.beamformers;
  sol.aux_beamformer = ex.aux_beamformer;
  sol.covariance = Rbar;
  sol.achieved_sinrs = achieved_sinrs(sol, s);
  sol.surrogate = trace_inverse(Rbar);
  sol.objective = crb_extended(Rbar, s);
  return sol;
}

RankOneExtraction extract_rank_one(const CMatrix& R_bar, const std::vector<CMatrix>& W_bar, const std::vector<CMatrix>& Q) {
  if (W_bar.size() != Q.size()) throw Error(ErrorCode::DimensionMismatch, "one channel Gram per relaxed block");
  const Eigen::Index n = R_bar.rows();
  if (R_bar.cols() != n) throw Error(ErrorCode::DimensionMismatch, "covariance must be square");
  CMatrix sumW = CMatrix::Zero(n, n);
  for (const auto& W : W_bar) {
    if (W.rows() != n || W.cols() != n) throw Error(ErrorCode::DimensionMismatch, "relaxed block size mismatch");
    sumW += W;
  }
  {
    RVector ev = herm_eigenvalues(R_bar - sumW);
    double scale = std::max(1e-300, herm_eigenvalues(R_bar)(n - 1));
    if (ev(0) < -1e-6 * scale)
      throw Error(ErrorCode::InvalidArgument, "covariance does not dominate the sum of relaxed blocks");
  }

  RankOneExtraction out;
  out.beamformers = CMatrix(n, static_cast<Eigen::Index>(W_bar.size()));
  CMatrix sumWt = CMatrix::Zero(n, n);
  for (std::size_t k = 0; k < W_bar.size(); ++k) {
    const CMatrix& W = W_bar[k];
    const double useful = (Q[k] * W).trace().real();
    if (!(useful > 1e-12 * W.trace().real()) || !(useful > 0.0))
      throw Error(ErrorCode::ZeroUsefulPower, "relaxed block " + std::to_string(k + 1) + " carries no useful power");
    CMatrix Wt = hermitian_part(W * Q[k] * W.adjoint() / useful);
    out.W_tilde.push_back(Wt);
    // Q_k = h h^H, so W Q W^H / tr(Q W) = w w^H with w = W h / sqrt(h^H W h);
    // recover h from Q through its dominant eigenvector
    EigDecomposition qe = herm_eig(Q[k]);
    CVector h = qe.vectors.col(n - 1) * std::sqrt(std::max(0.0, qe.values(n - 1)));
    out.beamformers.col(static_cast<Eigen::Index>(k)) = W * h / std::sqrt(h.dot(W * h).real());
    sumWt += Wt;
  }
  out.aux_covariance = hermitian_part(R_bar - sumWt);
  {
    RVector ev = herm_eigenvalues(out.aux_covariance);
    if (ev(0) < -1e-6 * std::max(1e-300, ev(n - 1)))
      throw Error(ErrorCode::ResidualNotPsd, "residual covariance is indefinite");
  }
  out.aux_beamformer = psd_sqrt(out.aux_covariance);
  return out;
}

DesignSolution eig_truncation_baseline(const DesignSolution& relaxed, const Scenario& s) {
  const int K = s.users();
  if (static_cast<int>(relaxed.relaxed_blocks.size()) != K + 1)
    throw Error(ErrorCode::InvalidArgument, "baseline needs the relaxed user blocks and the auxiliary block");
  const int nt = s.geometry.n_tx;
  DesignSolution out;
  out.comm_beamformers = CMatrix(nt, K);
  CMatrix R = CMatrix::Zero(nt, nt);
  for (int k = 0; k < K; ++k) {
    EigDecomposition e = herm_eig(hermitian_part(relaxed.relaxed_blocks[k]));
    out.comm_beamformers.col(k) = std::sqrt(std::max(0.0, e.values(nt - 1))) * e.vectors.col(nt - 1);
  }
  const CMatrix WA_cov = hermitian_part(relaxed.relaxed_blocks[K]);
  CMatrix WA = psd_sqrt(WA_cov);
  R = out.comm_beamformers * out.comm_beamformers.adjoint() + WA_cov;
  const double tr = R.trace().real();
  const double scale = std::min(1.0, s.power_budget / tr);
  out.comm_beamformers *= std::sqrt(scale);
  WA *= std::sqrt(scale);
  R *= scale;
  out.aux_beamformer = WA;
  out.covariance = R;
  out.achieved_sinrs = achieved_sinrs(out, s);
  out.surrogate = trace_inverse(R);
  out.objective = crb_extended(R, s);
  out.diagnostics.solver_status = "baseline";
  out.diagnostics.notes.push_back("dominant-eigencomponent truncation; SINR not re-enforced");
  return out;
}

}  // namespace dfrc
