#pragma once

#include <iosfwd>
#include <string>
#include <vector>

#include "dfrc/numerics.hpp"

namespace dfrc::sdp {

/// One Hermitian term v*e_r*e_c^H + conj(v)*e_c*e_r^H with r < c, or
/// Re(v)*e_r*e_r^H when r == c.
struct SparseEntry {
  int row;
  int col;
  Complex value;
};

/// Hermitian coefficient matrix of a trace inner product <C, X> = tr(C X),
/// stored densely or as a short list of Hermitian entries.
struct HermCoef {
  bool is_dense = false;
  CMatrix dense;
  std::vector<SparseEntry> entries;

  static HermCoef from_dense(const CMatrix& m);
  static HermCoef entry(int r, int c, Complex v);
  static HermCoef identity(int n, double scale = 1.0);

  /// tr(C G) for an arbitrary square G.
  Complex trace_with(const CMatrix& G) const;
  /// S += s * C.
  void add_to(CMatrix& S, double s) const;
  CMatrix to_dense(int n) const;
  HermCoef scaled(double s) const;
  double frob_norm2() const;
  int nnz() const;
};

enum class Relation { Eq, Ge, Le };

struct Constraint {
  std::vector<std::pair<int, HermCoef>> block_terms;
  std::vector<std::pair<int, double>> free_terms;
  Relation rel = Relation::Eq;
  double rhs = 0.0;
  std::string name;

  Constraint& add(int block, HermCoef c) {
    block_terms.emplace_back(block, std::move(c));
    return *this;
  }
  Constraint& add_free(int idx, double c) {
    free_terms.emplace_back(idx, c);
    return *this;
  }
};

struct BlockSpec {
  std::string name;
  int dim;
};

/// minimize sum_b <C_b, X_b> + c^T x  subject to linear (in)equalities,
/// X_b Hermitian PSD, x free.
struct SdpProblem {
  std::vector<BlockSpec> blocks;
  std::vector<std::string> free_scalars;
  std::vector<std::pair<int, HermCoef>> objective_blocks;
  std::vector<std::pair<int, double>> objective_free;
  std::vector<Constraint> constraints;

  int add_block(std::string name, int dim);
  int add_free(std::string name);
  Constraint& add_constraint(Relation rel, double rhs, std::string name = {});
  void validate() const;
};

enum class Status { Optimal, Infeasible, Unbounded, MaxIter };

const char* to_string(Status s) noexcept;

struct Residuals {
  double primal = 0.0;
  double dual = 0.0;
  double gap = 0.0;
  double primal_objective = 0.0;
  double dual_objective = 0.0;

  double max() const { return std::max(primal, std::max(dual, gap)); }
};

struct SdpSolution {
  Status status = Status::MaxIter;
  std::vector<CMatrix> primal_blocks;
  std::vector<double> scalars;
  std::vector<double> dual_multipliers;   // one per constraint, Lagrangian sign
  std::vector<CMatrix> dual_slacks;       // C_b - sum_i y_i A_ib per block
  Residuals residuals;
  int iterations = 0;
  /// Dual improving ray when status is Infeasible, and its normalized margin
  /// b^T y / ||y||.
  std::vector<double> certificate;
  double certificate_margin = 0.0;
};

struct SolverOptions {
  double tol = 1e-9;          // internal stopping target on scaled residuals
  double tol_accept = 1e-7;   // residual level required to report Optimal
  int max_iter = 100;
  double infeas_tol = 1e-8;
  bool verbose = false;       // per-iteration trace on stderr
};

SdpSolution solve(const SdpProblem& p, const SolverOptions& opts = {});

/// Residuals of (X, x, y) recomputed on the user-level problem.
Residuals check_certificate(const SdpProblem& p, const SdpSolution& s);

/// [[Re M, -Im M], [Im M, Re M]].
RMatrix real_embedding(const CMatrix& m);

/// Plain-text dump in SDPA-like block format over the real embedding, for
/// cross-checking with external solvers. Inequalities become diagonal slack
/// entries and free scalars are split into differences of nonnegatives.
void write_debug_dump(const SdpProblem& p, std::ostream& os);

}  // namespace dfrc::sdp
