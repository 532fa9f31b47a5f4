#include "dfrc/sdp.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <limits>
#include <ostream>

namespace dfrc::sdp {

// ---------------------------------------------------------------- HermCoef

HermCoef HermCoef::from_dense(const CMatrix& m) {
  if (m.rows() != m.cols()) throw Error(ErrorCode::DimensionMismatch, "coefficient must be square");
  if (!is_hermitian(m, 1e-10)) throw Error(ErrorCode::NonHermitian, "coefficient must be Hermitian");
  HermCoef c;
  c.is_dense = true;
  c.dense = hermitian_part(m);
  return c;
}

HermCoef HermCoef::entry(int r, int c, Complex v) {
  HermCoef h;
  if (r > c) {
    std::swap(r, c);
    v = std::conj(v);
  }
  h.entries.push_back({r, c, v});
  return h;
}

HermCoef HermCoef::identity(int n, double scale) {
  HermCoef h;
  for (int i = 0; i < n; ++i) h.entries.push_back({i, i, Complex(scale, 0.0)});
  return h;
}

Complex HermCoef::trace_with(const CMatrix& G) const {
  if (is_dense) return (dense.transpose().cwiseProduct(G)).sum();
  Complex t{0.0, 0.0};
  for (const auto& e : entries) {
    if (e.row == e.col)
      t += e.value.real() * G(e.row, e.row);
    else
      t += e.value * G(e.col, e.row) + std::conj(e.value) * G(e.row, e.col);
  }
  return t;
}

void HermCoef::add_to(CMatrix& S, double s) const {
  if (is_dense) {
    S += s * dense;
    return;
  }
  for (const auto& e : entries) {
    if (e.row == e.col) {
      S(e.row, e.row) += s * e.value.real();
    } else {
      S(e.row, e.col) += s * e.value;
      S(e.col, e.row) += s * std::conj(e.value);
    }
  }
}

CMatrix HermCoef::to_dense(int n) const {
  CMatrix m = CMatrix::Zero(n, n);
  add_to(m, 1.0);
  return m;
}

HermCoef HermCoef::scaled(double s) const {
  HermCoef h = *this;
  if (is_dense) h.dense *= s;
  for (auto& e : h.entries) e.value *= s;
  return h;
}

double HermCoef::frob_norm2() const {
  if (is_dense) return dense.squaredNorm();
  double t = 0.0;
  for (const auto& e : entries) t += (e.row == e.col ? 1.0 : 2.0) * std::norm(e.row == e.col ? e.value.real() : e.value);
  return t;
}

int HermCoef::nnz() const {
  return is_dense ? static_cast<int>(dense.size()) : static_cast<int>(entries.size());
}

// ---------------------------------------------------------------- problem

int SdpProblem::add_block(std::string name, int dim) {
  if (dim < 1) throw Error(ErrorCode::InvalidArgument, "block dimension must be positive");
  blocks.push_back({std::move(name), dim});
  return static_cast<int>(blocks.size()) - 1;
}

int SdpProblem::add_free(std::string name) {
  free_scalars.push_back(std::move(name));
  return static_cast<int>(free_scalars.size()) - 1;
}

Constraint& SdpProblem::add_constraint(Relation rel, double rhs, std::string name) {
  constraints.emplace_back();
  constraints.back().rel = rel;
  constraints.back().rhs = rhs;
  constraints.back().name = std::move(name);
  return constraints.back();
}

namespace {

void check_term(const SdpProblem& p, int block, const HermCoef& c) {
  if (block < 0 || block >= static_cast<int>(p.blocks.size()))
    throw Error(ErrorCode::DimensionMismatch, "term references unknown block");
  const int n = p.blocks[block].dim;
  if (c.is_dense) {
    if (c.dense.rows() != n || c.dense.cols() != n)
      throw Error(ErrorCode::DimensionMismatch, "coefficient size differs from block '" + p.blocks[block].name + "'");
  } else {
    for (const auto& e : c.entries)
      if (e.row < 0 || e.col < 0 || e.row >= n || e.col >= n || e.row > e.col)
        throw Error(ErrorCode::DimensionMismatch, "sparse entry outside block '" + p.blocks[block].name + "'");
  }
}

}  // namespace

void SdpProblem::validate() const {
  for (const auto& [b, c] : objective_blocks) check_term(*this, b, c);
  for (const auto& [f, v] : objective_free) {
    (void)v;
    if (f < 0 || f >= static_cast<int>(free_scalars.size()))
      throw Error(ErrorCode::DimensionMismatch, "objective references unknown scalar");
  }
  for (const auto& con : constraints) {
    for (const auto& [b, c] : con.block_terms) check_term(*this, b, c);
    for (const auto& [f, v] : con.free_terms) {
      (void)v;
      if (f < 0 || f >= static_cast<int>(free_scalars.size()))
        throw Error(ErrorCode::DimensionMismatch, "constraint references unknown scalar");
    }
    if (!std::isfinite(con.rhs)) throw Error(ErrorCode::InvalidArgument, "non-finite right-hand side");
  }
}

const char* to_string(Status s) noexcept {
  switch (s) {
    case Status::Optimal: return "Optimal";
    case Status::Infeasible: return "Infeasible";
    case Status::Unbounded: return "Unbounded";
    case Status::MaxIter: return "MaxIter";
  }
  return "Unknown";
}

// ---------------------------------------------------------------- internal model

namespace {

struct Term {
  int row;
  HermCoef coef;
  CMatrix dense_cache;  // filled when the sparse form is not worth it
  bool use_dense = false;
};

struct PsdBlock {
  int user_block;
  int n;
  std::vector<Term> terms;  // sorted by row, one per row
  CMatrix C;
};

struct Model {
  int m = 0;
  std::vector<PsdBlock> psd;
  std::vector<std::vector<std::pair<int, double>>> lp_cols;
  RVector c_lp;
  RMatrix G;  // m x n_free
  RVector c_free;
  RVector b;
  std::vector<int> psd_of_block, lp_of_block;
  std::vector<int> slack_of_row;
  std::vector<double> rho;
  double gamma_c = 1.0;
  double beta_b = 1.0;
  double c_norm = 0.0;
  int nu = 0;  // barrier parameter (total cone order)
};

void merge_into(HermCoef& acc, const HermCoef& add, int n) {
  if (acc.is_dense || add.is_dense) {
    CMatrix d = acc.to_dense(n);
    add.add_to(d, 1.0);
    acc = HermCoef{};
    acc.is_dense = true;
    acc.dense = d;
  } else {
    acc.entries.insert(acc.entries.end(), add.entries.begin(), add.entries.end());
  }
}

double real_value(const HermCoef& c) {
  if (c.is_dense) return c.dense(0, 0).real();
  double v = 0.0;
  for (const auto& e : c.entries) v += e.value.real();
  return v;
}

Model build_model(const SdpProblem& p) {
  Model md;
  md.m = static_cast<int>(p.constraints.size());
  const int nb = static_cast<int>(p.blocks.size());
  md.psd_of_block.assign(nb, -1);
  md.lp_of_block.assign(nb, -1);
  int n_lp = 0;
  for (int b = 0; b < nb; ++b) {
    if (p.blocks[b].dim == 1) {
      md.lp_of_block[b] = n_lp++;
    } else {
      md.psd_of_block[b] = static_cast<int>(md.psd.size());
      PsdBlock blk;
      blk.user_block = b;
      blk.n = p.blocks[b].dim;
      blk.C = CMatrix::Zero(blk.n, blk.n);
      md.psd.push_back(std::move(blk));
    }
  }
  md.slack_of_row.assign(md.m, -1);
  for (int i = 0; i < md.m; ++i)
    if (p.constraints[i].rel != Relation::Eq) md.slack_of_row[i] = n_lp++;
  md.lp_cols.assign(n_lp, {});
  md.c_lp = RVector::Zero(n_lp);
  const int nf = static_cast<int>(p.free_scalars.size());
  md.G = RMatrix::Zero(md.m, nf);
  md.c_free = RVector::Zero(nf);
  md.b = RVector::Zero(md.m);
  md.rho.assign(md.m, 1.0);

  // row scaling
  for (int i = 0; i < md.m; ++i) {
    const auto& con = p.constraints[i];
    double nrm2 = 0.0;
    for (const auto& [b, c] : con.block_terms) nrm2 += c.frob_norm2();
    for (const auto& [f, v] : con.free_terms) nrm2 += v * v;
    double nrm = std::sqrt(nrm2);
    // Rows with large coefficients (SINR rows at high thresholds) are scaled
    // down no further than their rhs, floored at one: the certificate
    // measures violations on that scale.
    const double scale = std::min(nrm, std::max(1.0, std::abs(con.rhs)));
    md.rho[i] = scale > 0.0 ? 1.0 / scale : 1.0;
  }

  for (int i = 0; i < md.m; ++i) {
    const auto& con = p.constraints[i];
    const double r = md.rho[i];
    std::vector<HermCoef> acc(md.psd.size());
    std::vector<bool> used(md.psd.size(), false);
    for (const auto& [b, c] : con.block_terms) {
      if (md.lp_of_block[b] >= 0) {
        md.lp_cols[md.lp_of_block[b]].push_back({i, r * real_value(c)});
        continue;
      }
      int pb = md.psd_of_block[b];
      if (!used[pb]) {
        acc[pb] = c.scaled(r);
        used[pb] = true;
      } else {
        merge_into(acc[pb], c.scaled(r), md.psd[pb].n);
      }
    }
    for (std::size_t pb = 0; pb < md.psd.size(); ++pb) {
      if (!used[pb]) continue;
      Term t;
      t.row = i;
      t.coef = std::move(acc[pb]);
      const int n = md.psd[pb].n;
      if (t.coef.is_dense || t.coef.nnz() > 2 * n) {
        t.use_dense = true;
        t.dense_cache = t.coef.to_dense(n);
      }
      md.psd[pb].terms.push_back(std::move(t));
    }
    for (const auto& [f, v] : con.free_terms) md.G(i, f) += r * v;
    if (md.slack_of_row[i] >= 0)
      md.lp_cols[md.slack_of_row[i]].push_back({i, con.rel == Relation::Ge ? -1.0 : 1.0});
    md.b(i) = r * con.rhs;
  }

  // objective, scaled to unit norm
  double cn2 = 0.0;
  for (const auto& [b, c] : p.objective_blocks) {
    if (md.lp_of_block[b] >= 0)
      md.c_lp(md.lp_of_block[b]) += real_value(c);
    else
      c.add_to(md.psd[md.psd_of_block[b]].C, 1.0);
  }
  for (const auto& [f, v] : p.objective_free) md.c_free(f) += v;
  for (const auto& blk : md.psd) cn2 += blk.C.squaredNorm();
  cn2 += md.c_lp.squaredNorm() + md.c_free.squaredNorm();
  md.gamma_c = std::max(1.0, std::sqrt(cn2));
  for (auto& blk : md.psd) blk.C /= md.gamma_c;
  md.c_lp /= md.gamma_c;
  md.c_free /= md.gamma_c;
  md.c_norm = std::sqrt(cn2) / md.gamma_c;

  md.beta_b = std::max(1.0, md.b.lpNorm<Eigen::Infinity>());
  md.b /= md.beta_b;

  md.nu = n_lp;
  for (const auto& blk : md.psd) md.nu += blk.n;
  return md;
}

struct State {
  std::vector<CMatrix> X, S;
  RVector x, s;   // LP primal/dual
  RVector xf;     // free
  RVector y;
};

struct Direction {
  std::vector<CMatrix> dX, dS;
  RVector dx, ds, dxf, dy;
};

RVector apply_A(const Model& md, const std::vector<CMatrix>& X, const RVector& x, const RVector& xf) {
  RVector r = RVector::Zero(md.m);
  for (std::size_t pb = 0; pb < md.psd.size(); ++pb)
    for (const auto& t : md.psd[pb].terms) r(t.row) += t.coef.trace_with(X[pb]).real();
  for (std::size_t l = 0; l < md.lp_cols.size(); ++l)
    for (const auto& [i, v] : md.lp_cols[l]) r(i) += v * x(static_cast<Eigen::Index>(l));
  if (md.G.cols() > 0) r += md.G * xf;
  return r;
}

void apply_At(const Model& md, const RVector& y, std::vector<CMatrix>& Ay, RVector& ay, RVector& gy) {
  Ay.resize(md.psd.size());
  for (std::size_t pb = 0; pb < md.psd.size(); ++pb) {
    const int n = md.psd[pb].n;
    Ay[pb] = CMatrix::Zero(n, n);
    for (const auto& t : md.psd[pb].terms) {
      double v = y(t.row);
      if (v != 0.0) t.coef.add_to(Ay[pb], v);
    }
  }
  ay = RVector::Zero(static_cast<Eigen::Index>(md.lp_cols.size()));
  for (std::size_t l = 0; l < md.lp_cols.size(); ++l)
    for (const auto& [i, v] : md.lp_cols[l]) ay(static_cast<Eigen::Index>(l)) += v * y(i);
  gy = md.G.transpose() * y;
}

double inner(const CMatrix& A, const CMatrix& B) {
  // Re tr(A B) for Hermitian A, B
  return (A.transpose().cwiseProduct(B)).sum().real();
}

double max_step_psd(const CMatrix& X, const CMatrix& dX) {
  Eigen::LLT<CMatrix> llt(X);
  if (llt.info() != Eigen::Success) return 0.0;
  CMatrix T = llt.matrixL().solve(dX);
  T = llt.matrixL().solve(T.adjoint()).adjoint();
  double lmin = herm_eigenvalues(T)(0);
  if (lmin >= 0.0) return std::numeric_limits<double>::infinity();
  return -1.0 / lmin;
}

double max_step_lp(const RVector& x, const RVector& dx) {
  double a = std::numeric_limits<double>::infinity();
  for (Eigen::Index i = 0; i < x.size(); ++i)
    if (dx(i) < 0.0) a = std::min(a, -x(i) / dx(i));
  return a;
}

CMatrix inverse_pd(const CMatrix& S) {
  Eigen::LLT<CMatrix> llt(S);
  if (llt.info() != Eigen::Success) {
    // fall back to an eigen-based inverse with clipped spectrum
    Eigen::SelfAdjointEigenSolver<CMatrix> es(hermitian_part(S));
    RVector v = es.eigenvalues().cwiseMax(1e-300).cwiseInverse();
    return es.eigenvectors() * v.asDiagonal() * es.eigenvectors().adjoint();
  }
  CMatrix I = CMatrix::Identity(S.rows(), S.cols());
  return hermitian_part(llt.solve(I));
}

class SchurSolver {
 public:
  bool factor(RMatrix M, const RMatrix& G) {
    const Eigen::Index m = M.rows();
    double dmax = m > 0 ? M.diagonal().cwiseAbs().maxCoeff() : 1.0;
    if (!(dmax > 0.0)) dmax = 1.0;
    double reg = 0.0;
    for (int attempt = 0; attempt < 12; ++attempt) {
      RMatrix Mr = M;
      if (reg > 0.0) Mr.diagonal().array() += reg;
      llt_.compute(Mr);
      if (llt_.info() == Eigen::Success) break;
      reg = reg == 0.0 ? 1e-14 * dmax : reg * 10.0;
    }
    if (llt_.info() != Eigen::Success) return false;
    nf_ = G.cols();
    if (nf_ > 0) {
      V_ = llt_.solve(G);
      RMatrix K = G.transpose() * V_;
      ldlt_.compute(K);
      G_ = G;
    }
    return true;
  }

  void solve(const RVector& rhs, const RVector& rf, RVector& dy, RVector& dxf) const {
    RVector u = llt_.solve(rhs);
    if (nf_ > 0) {
      dxf = ldlt_.solve(G_.transpose() * u - rf);
      dy = u - V_ * dxf;
    } else {
      dxf = RVector::Zero(0);
      dy = u;
    }
  }

 private:
  Eigen::LLT<RMatrix> llt_;
  Eigen::LDLT<RMatrix> ldlt_;
  RMatrix V_, G_;
  Eigen::Index nf_ = 0;
};

// Re tr(A_i X A_j Z) summed over blocks, plus the LP contribution.
RMatrix schur_matrix(const Model& md, const State& st, const std::vector<CMatrix>& Z) {
  RMatrix M = RMatrix::Zero(md.m, md.m);
  for (std::size_t pb = 0; pb < md.psd.size(); ++pb) {
    const auto& blk = md.psd[pb];
    const CMatrix& X = st.X[pb];
    const CMatrix& Zb = Z[pb];
    const int n = blk.n;
    CMatrix Gj(n, n);
    for (std::size_t j = 0; j < blk.terms.size(); ++j) {
      const Term& tj = blk.terms[j];
      if (tj.use_dense) {
        Gj.noalias() = X * tj.dense_cache * Zb;
      } else {
        Gj.setZero();
        for (const auto& e : tj.coef.entries) {
          if (e.row == e.col) {
            Gj.noalias() += e.value.real() * X.col(e.row) * Zb.row(e.row);
          } else {
            Gj.noalias() += e.value * X.col(e.row) * Zb.row(e.col);
            Gj.noalias() += std::conj(e.value) * X.col(e.col) * Zb.row(e.row);
          }
        }
      }
      for (std::size_t i = 0; i <= j; ++i) {
        const Term& ti = blk.terms[i];
        double v = ti.coef.trace_with(Gj).real();
        M(ti.row, tj.row) += v;
        if (i != j) M(tj.row, ti.row) += v;
      }
    }
  }
  for (std::size_t l = 0; l < md.lp_cols.size(); ++l) {
    const double w = st.x(static_cast<Eigen::Index>(l)) / st.s(static_cast<Eigen::Index>(l));
    const auto& col = md.lp_cols[l];
    for (const auto& [i, vi] : col)
      for (const auto& [j, vj] : col) M(i, j) += w * vi * vj;
  }
  return M;
}

struct Residual {
  RVector rp;
  std::vector<CMatrix> Rd;
  RVector rd_lp, rf;
  double pinf = 0.0, dinf = 0.0, gap = 0.0, pobj = 0.0, dobj = 0.0, mu = 0.0;
};

Residual residual(const Model& md, const State& st) {
  Residual r;
  r.rp = md.b - apply_A(md, st.X, st.x, st.xf);
  std::vector<CMatrix> Ay;
  RVector ay, gy;
  apply_At(md, st.y, Ay, ay, gy);
  r.Rd.resize(md.psd.size());
  double d2 = 0.0, comp = 0.0;
  r.pobj = 0.0;
  for (std::size_t pb = 0; pb < md.psd.size(); ++pb) {
    r.Rd[pb] = md.psd[pb].C - Ay[pb] - st.S[pb];
    d2 += r.Rd[pb].squaredNorm();
    comp += inner(st.X[pb], st.S[pb]);
    r.pobj += inner(md.psd[pb].C, st.X[pb]);
  }
  r.rd_lp = md.c_lp - ay - st.s;
  r.rf = md.c_free - gy;
  d2 += r.rd_lp.squaredNorm() + r.rf.squaredNorm();
  comp += st.x.dot(st.s);
  r.pobj += md.c_lp.dot(st.x) + md.c_free.dot(st.xf);
  r.dobj = md.b.dot(st.y);
  r.pinf = r.rp.norm() / (1.0 + md.b.norm());
  r.dinf = std::sqrt(d2) / (1.0 + md.c_norm);
  r.gap = std::abs(r.pobj - r.dobj) / (1.0 + std::abs(r.pobj) + std::abs(r.dobj));
  r.mu = md.nu > 0 ? comp / md.nu : 0.0;
  return r;
}

// Search direction for target sigma*mu; `corr` adds the second-order term.
bool direction(const Model& md, const State& st, const std::vector<CMatrix>& Z, const SchurSolver& schur,
               const Residual& res, double sigma_mu, const Direction* corr, Direction& d) {
  const std::size_t nb = md.psd.size();
  std::vector<CMatrix> H(nb);
  for (std::size_t pb = 0; pb < nb; ++pb) {
    H[pb] = sigma_mu * Z[pb] - st.X[pb] - st.X[pb] * res.Rd[pb] * Z[pb];
    if (corr) H[pb] -= corr->dX[pb] * corr->dS[pb] * Z[pb];
  }
  RVector h = sigma_mu * st.s.cwiseInverse() - st.x - st.x.cwiseProduct(res.rd_lp).cwiseQuotient(st.s);
  if (corr) h -= corr->dx.cwiseProduct(corr->ds).cwiseQuotient(st.s);

  RVector AH = RVector::Zero(md.m);
  for (std::size_t pb = 0; pb < nb; ++pb)
    for (const auto& t : md.psd[pb].terms) AH(t.row) += t.coef.trace_with(H[pb]).real();
  for (std::size_t l = 0; l < md.lp_cols.size(); ++l)
    for (const auto& [i, v] : md.lp_cols[l]) AH(i) += v * h(static_cast<Eigen::Index>(l));

  RVector rhs = res.rp - AH;
  schur.solve(rhs, res.rf, d.dy, d.dxf);
  if (!d.dy.allFinite() || !d.dxf.allFinite()) return false;

  std::vector<CMatrix> Ady;
  RVector ady, gdy;
  apply_At(md, d.dy, Ady, ady, gdy);
  d.dS.resize(nb);
  d.dX.resize(nb);
  for (std::size_t pb = 0; pb < nb; ++pb) {
    d.dS[pb] = res.Rd[pb] - Ady[pb];
    d.dX[pb] = hermitian_part(H[pb] + st.X[pb] * Ady[pb] * Z[pb]);
  }
  d.ds = res.rd_lp - ady;
  d.dx = h + st.x.cwiseProduct(ady).cwiseQuotient(st.s);
  return true;
}

void step_lengths(const State& st, const Direction& d, double& ap, double& ad) {
  ap = max_step_lp(st.x, d.dx);
  ad = max_step_lp(st.s, d.ds);
  for (std::size_t pb = 0; pb < st.X.size(); ++pb) {
    ap = std::min(ap, max_step_psd(st.X[pb], d.dX[pb]));
    ad = std::min(ad, max_step_psd(st.S[pb], d.dS[pb]));
  }
}

// Dual improving ray: b^T y > 0 and -A^*(y) in the dual cone.
bool primal_infeasible(const Model& md, const State& st, double tol, RVector& ray) {
  const double by = md.b.dot(st.y);
  if (!(by > 0.0)) return false;
  RVector yb = st.y / by;
  std::vector<CMatrix> Ay;
  RVector ay, gy;
  apply_At(md, yb, Ay, ay, gy);
  double viol = 0.0;
  for (const auto& A : Ay) {
    if (A.rows() == 0) continue;
    double lmax = herm_eigenvalues(A)(A.rows() - 1);
    viol = std::max(viol, lmax);
  }
  if (ay.size() > 0) viol = std::max(viol, ay.maxCoeff());
  if (gy.size() > 0) viol = std::max(viol, gy.cwiseAbs().maxCoeff());
  if (viol > tol) return false;
  ray = yb;
  return true;
}

bool dual_infeasible(const Model& md, const State& st, const Residual& res, double tol) {
  if (!(res.pobj < 0.0)) return false;
  const double scale = -res.pobj;
  RVector ax = apply_A(md, st.X, st.x, st.xf) / scale;
  return ax.norm() <= tol;
}

void initial_point(const Model& md, State& st) {
  const std::size_t nb = md.psd.size();
  st.X.resize(nb);
  st.S.resize(nb);
  for (std::size_t pb = 0; pb < nb; ++pb) {
    const int n = md.psd[pb].n;
    double xi = std::max(10.0, std::sqrt(static_cast<double>(n)));
    double eta = std::max({10.0, std::sqrt(static_cast<double>(n)), md.psd[pb].C.norm()});
    for (const auto& t : md.psd[pb].terms) {
      double an = std::sqrt(t.coef.frob_norm2());
      xi = std::max(xi, n * (1.0 + std::abs(md.b(t.row))) / (1.0 + an));
      eta = std::max(eta, an);
    }
    st.X[pb] = xi * CMatrix::Identity(n, n);
    st.S[pb] = eta * CMatrix::Identity(n, n);
  }
  const Eigen::Index nl = static_cast<Eigen::Index>(md.lp_cols.size());
  st.x = RVector::Constant(nl, 10.0);
  st.s = RVector::Constant(nl, 10.0);
  st.xf = RVector::Zero(md.G.cols());
  st.y = RVector::Zero(md.m);
}

}  // namespace

// ---------------------------------------------------------------- solve

SdpSolution solve(const SdpProblem& p, const SolverOptions& opts) {
  p.validate();
  Model md = build_model(p);
  State st;
  initial_point(md, st);

  SdpSolution out;
  Residual res = residual(md, st);
  double best = std::numeric_limits<double>::infinity();
  int since_best = 0;
  State best_state = st;
  double prev_ap = 1.0, prev_ad = 1.0;
  bool certified_infeasible = false, certified_unbounded = false;
  RVector ray;
  int it = 0;

  for (; it < opts.max_iter; ++it) {
    double score = std::max({res.pinf, res.dinf, res.gap});
    if (opts.verbose)
      std::fprintf(stderr, "%3d pinf %.2e dinf %.2e gap %.2e mu %.2e ap %.2f ad %.2f\n", it, res.pinf, res.dinf, res.gap,
                   res.mu, prev_ap, prev_ad);
    if (score < best) {
      best = score;
      best_state = st;
      since_best = 0;
    } else {
      ++since_best;
    }
    if (score <= opts.tol) break;
    if (primal_infeasible(md, st, opts.infeas_tol, ray)) {
      certified_infeasible = true;
      break;
    }
    if (dual_infeasible(md, st, res, opts.infeas_tol)) {
      certified_unbounded = true;
      break;
    }
    if (since_best > 20) break;

    std::vector<CMatrix> Z(md.psd.size());
    for (std::size_t pb = 0; pb < md.psd.size(); ++pb) Z[pb] = inverse_pd(st.S[pb]);
    SchurSolver schur;
    if (!schur.factor(schur_matrix(md, st, Z), md.G)) break;

    Direction pred, corr;
    if (!direction(md, st, Z, schur, res, 0.0, nullptr, pred)) break;
    double ap, ad;
    step_lengths(st, pred, ap, ad);
    ap = std::min(1.0, ap);
    ad = std::min(1.0, ad);
    double comp_aff = 0.0;
    for (std::size_t pb = 0; pb < md.psd.size(); ++pb)
      comp_aff += inner(st.X[pb] + ap * pred.dX[pb], st.S[pb] + ad * pred.dS[pb]);
    comp_aff += (st.x + ap * pred.dx).dot(st.s + ad * pred.ds);
    double mu_aff = md.nu > 0 ? comp_aff / md.nu : 0.0;
    double expo = std::max(1.0, 3.0 * std::min(ap, ad) * std::min(ap, ad));
    double sigma = res.mu > 0.0 ? std::pow(std::max(0.0, mu_aff / res.mu), expo) : 0.0;
    sigma = std::clamp(sigma, 0.0, 1.0);

    if (!direction(md, st, Z, schur, res, sigma * res.mu, &pred, corr)) break;
    step_lengths(st, corr, ap, ad);
    double gamma = 0.9 + 0.09 * std::min(prev_ap, prev_ad);
    ap = std::min(1.0, gamma * ap);
    ad = std::min(1.0, gamma * ad);
    if (ap < 1e-12 && ad < 1e-12) break;
    prev_ap = ap;
    prev_ad = ad;

    for (std::size_t pb = 0; pb < md.psd.size(); ++pb) {
      st.X[pb] = hermitian_part(st.X[pb] + ap * corr.dX[pb]);
      st.S[pb] = hermitian_part(st.S[pb] + ad * corr.dS[pb]);
    }
    st.x += ap * corr.dx;
    st.xf += ap * corr.dxf;
    st.s += ad * corr.ds;
    st.y += ad * corr.dy;
    res = residual(md, st);
  }
  out.iterations = it;

  if (!certified_infeasible && !certified_unbounded) {
    double score = std::max({res.pinf, res.dinf, res.gap});
    if (score > best) st = best_state;
  }

  // map back to the user problem
  const int nb = static_cast<int>(p.blocks.size());
  out.primal_blocks.resize(nb);
  out.dual_slacks.resize(nb);
  for (int b = 0; b < nb; ++b) {
    if (md.lp_of_block[b] >= 0) {
      int l = md.lp_of_block[b];
      out.primal_blocks[b] = CMatrix::Constant(1, 1, Complex(md.beta_b * st.x(l), 0.0));
      out.dual_slacks[b] = CMatrix::Constant(1, 1, Complex(md.gamma_c * st.s(l), 0.0));
    } else {
      int pb = md.psd_of_block[b];
      out.primal_blocks[b] = md.beta_b * st.X[pb];
      out.dual_slacks[b] = md.gamma_c * st.S[pb];
    }
  }
  out.scalars.resize(md.G.cols());
  for (Eigen::Index f = 0; f < md.G.cols(); ++f) out.scalars[f] = md.beta_b * st.xf(f);
  out.dual_multipliers.resize(md.m);
  for (int i = 0; i < md.m; ++i) out.dual_multipliers[i] = md.gamma_c * md.rho[i] * st.y(i);

  out.residuals = check_certificate(p, out);
  if (opts.verbose)
    std::fprintf(stderr, "certificate primal %.2e dual %.2e gap %.2e (pobj %.6e dobj %.6e)\n", out.residuals.primal,
                 out.residuals.dual, out.residuals.gap, out.residuals.primal_objective, out.residuals.dual_objective);
  if (certified_infeasible) {
    out.status = Status::Infeasible;
    out.certificate.resize(md.m);
    double by = 0.0;
    for (int i = 0; i < md.m; ++i) {
      out.certificate[i] = md.rho[i] * ray(i);
      by += p.constraints[i].rhs * out.certificate[i];
    }
    double nrm = 0.0;
    for (double v : out.certificate) nrm += v * v;
    nrm = std::sqrt(nrm);
    out.certificate_margin = nrm > 0.0 ? by / nrm : 0.0;
  } else if (certified_unbounded) {
    out.status = Status::Unbounded;
  } else if (out.residuals.max() <= opts.tol_accept) {
    out.status = Status::Optimal;
  } else {
    out.status = Status::MaxIter;
  }
  return out;
}

// ---------------------------------------------------------------- certificate

Residuals check_certificate(const SdpProblem& p, const SdpSolution& s) {
  Residuals r;
  const int nb = static_cast<int>(p.blocks.size());
  const int m = static_cast<int>(p.constraints.size());
  if (static_cast<int>(s.primal_blocks.size()) != nb || static_cast<int>(s.dual_multipliers.size()) != m ||
      s.scalars.size() != p.free_scalars.size())
    throw Error(ErrorCode::DimensionMismatch, "solution does not match problem shape");

  double bnorm = 1.0;
  for (const auto& c : p.constraints) bnorm = std::max(bnorm, std::abs(c.rhs));
  double cnorm = 0.0;
  std::vector<CMatrix> C(nb);
  for (int b = 0; b < nb; ++b) C[b] = CMatrix::Zero(p.blocks[b].dim, p.blocks[b].dim);
  for (const auto& [b, c] : p.objective_blocks) c.add_to(C[b], 1.0);
  std::vector<double> cf(p.free_scalars.size(), 0.0);
  for (const auto& [f, v] : p.objective_free) cf[f] += v;
  for (int b = 0; b < nb; ++b) cnorm = std::max(cnorm, C[b].norm());
  for (double v : cf) cnorm = std::max(cnorm, std::abs(v));

  // primal
  double pviol = 0.0;
  for (int i = 0; i < m; ++i) {
    const auto& con = p.constraints[i];
    double lhs = 0.0;
    for (const auto& [b, c] : con.block_terms) lhs += c.trace_with(s.primal_blocks[b]).real();
    for (const auto& [f, v] : con.free_terms) lhs += v * s.scalars[f];
    double d = lhs - con.rhs;
    double v = con.rel == Relation::Eq ? std::abs(d) : con.rel == Relation::Ge ? std::max(0.0, -d) : std::max(0.0, d);
    pviol = std::max(pviol, v);
  }

  for (int b = 0; b < nb; ++b)
    pviol = std::max(pviol, std::max(0.0, -herm_eigenvalues(s.primal_blocks[b])(0)));
  r.primal = pviol / bnorm;

  // dual
  double dviol = 0.0;
  std::vector<CMatrix> S = C;
  std::vector<double> fs = cf;
  for (int i = 0; i < m; ++i) {
    const auto& con = p.constraints[i];
    const double y = s.dual_multipliers[i];
    for (const auto& [b, c] : con.block_terms) c.add_to(S[b], -y);
    for (const auto& [f, v] : con.free_terms) fs[f] -= y * v;
    if (con.rel == Relation::Ge) dviol = std::max(dviol, std::max(0.0, -y));
    if (con.rel == Relation::Le) dviol = std::max(dviol, std::max(0.0, y));
  }
  for (int b = 0; b < nb; ++b) dviol = std::max(dviol, std::max(0.0, -herm_eigenvalues(S[b])(0)));
  for (double v : fs) dviol = std::max(dviol, std::abs(v));
  r.dual = dviol / (1.0 + cnorm);

  // gap
  double pobj = 0.0, dobj = 0.0;
  for (int b = 0; b < nb; ++b) pobj += inner(C[b], s.primal_blocks[b]);
  for (std::size_t f = 0; f < cf.size(); ++f) pobj += cf[f] * s.scalars[f];
  for (int i = 0; i < m; ++i) dobj += p.constraints[i].rhs * s.dual_multipliers[i];
  r.primal_objective = pobj;
  r.dual_objective = dobj;
  r.gap = std::abs(pobj - dobj) / (1.0 + std::abs(pobj) + std::abs(dobj));
  return r;
}

// ---------------------------------------------------------------- embedding / dump

RMatrix real_embedding(const CMatrix& m) {
  const Eigen::Index r = m.rows(), c = m.cols();
  RMatrix e(2 * r, 2 * c);
  e.topLeftCorner(r, c) = m.real();
  e.topRightCorner(r, c) = -m.imag();
  e.bottomLeftCorner(r, c) = m.imag();
  e.bottomRightCorner(r, c) = m.real();
  return e;
}

void write_debug_dump(const SdpProblem& p, std::ostream& os) {
  p.validate();
  const int m = static_cast<int>(p.constraints.size());
  const int nb = static_cast<int>(p.blocks.size());
  int n_diag = 0;
  for (const auto& c : p.constraints)
    if (c.rel != Relation::Eq) ++n_diag;
  n_diag += 2 * static_cast<int>(p.free_scalars.size());

  os << "* real-embedded dump: maximize -<C,X>, constraints <A_i,X> = b_i\n";
  for (int b = 0; b < nb; ++b) os << "* block " << b + 1 << " '" << p.blocks[b].name << "' dim " << p.blocks[b].dim << "\n";
  os << m << " = mDIM\n";
  os << nb + (n_diag > 0 ? 1 : 0) << " = nBLOCK\n";
  for (int b = 0; b < nb; ++b) os << 2 * p.blocks[b].dim << " ";
  if (n_diag > 0) os << -n_diag;
  os << "\n";
  os.precision(17);
  for (int i = 0; i < m; ++i) os << p.constraints[i].rhs << (i + 1 < m ? " " : "\n");

  auto emit = [&](int mat, int block, const CMatrix& c, double scale) {
    RMatrix e = real_embedding(c);
    for (Eigen::Index r = 0; r < e.rows(); ++r)
      for (Eigen::Index q = r; q < e.cols(); ++q)
        if (e(r, q) != 0.0) os << mat << " " << block + 1 << " " << r + 1 << " " << q + 1 << " " << scale * e(r, q) << "\n";
  };
  // the embedding doubles every inner product, hence the 1/2 factors
  for (const auto& [b, c] : p.objective_blocks) emit(0, b, c.to_dense(p.blocks[b].dim), -0.5);
  const int diag_block = nb;
  int slot = 0;
  std::vector<int> slack_slot(m, -1);
  for (int i = 0; i < m; ++i)
    if (p.constraints[i].rel != Relation::Eq) slack_slot[i] = slot++;
  const int free_base = slot;
  for (const auto& [f, v] : p.objective_free) {
    os << 0 << " " << diag_block + 1 << " " << free_base + 2 * f + 1 << " " << free_base + 2 * f + 1 << " " << -v << "\n";
    os << 0 << " " << diag_block + 1 << " " << free_base + 2 * f + 2 << " " << free_base + 2 * f + 2 << " " << v << "\n";
  }
  for (int i = 0; i < m; ++i) {
    const auto& con = p.constraints[i];
    for (const auto& [b, c] : con.block_terms) emit(i + 1, b, c.to_dense(p.blocks[b].dim), 0.5);
    if (slack_slot[i] >= 0) {
      double v = con.rel == Relation::Ge ? -1.0 : 1.0;
      os << i + 1 << " " << diag_block + 1 << " " << slack_slot[i] + 1 << " " << slack_slot[i] + 1 << " " << v << "\n";
    }
    for (const auto& [f, v] : con.free_terms) {
      os << i + 1 << " " << diag_block + 1 << " " << free_base + 2 * f + 1 << " " << free_base + 2 * f + 1 << " " << v << "\n";
      os << i + 1 << " " << diag_block + 1 << " " << free_base + 2 * f + 2 << " " << free_base + 2 * f + 2 << " " << -v << "\n";
    }
  }
}

}  // namespace dfrc::sdp
