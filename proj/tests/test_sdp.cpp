#include <sstream>

#include "helpers.hpp"

#include "dfrc/sdp.hpp"

using namespace dfrc;
using namespace dfrc::sdp;
using testing::random_psd;
using testing::rel;

namespace {

HermCoef re_part(int r, int c) { return r == c ? HermCoef::entry(r, r, 1.0) : HermCoef::entry(r, c, Complex(0.5, 0)); }
HermCoef im_part(int r, int c) { return HermCoef::entry(r, c, Complex(0, 0.5)); }

// min tr(X) with X - S = I entrywise, S >= 0.
SdpProblem shifted_trace(int n) {
  SdpProblem p;
  int X = p.add_block("X", n);
  int S = p.add_block("S", n);
  p.objective_blocks.push_back({X, HermCoef::identity(n)});
  for (int r = 0; r < n; ++r)
    for (int c = r; c < n; ++c) {
      p.add_constraint(Relation::Eq, r == c ? 1.0 : 0.0).add(X, re_part(r, c)).add(S, re_part(r, c).scaled(-1.0));
      if (r != c) p.add_constraint(Relation::Eq, 0.0).add(X, im_part(r, c)).add(S, im_part(r, c).scaled(-1.0));
    }
  return p;
}

}  // namespace

TEST_SUITE("sdp") {

TEST_CASE("HermCoef trace semantics") {
  Rng rng(1);
  CMatrix X = random_psd(4, 4, rng);
  CHECK(std::abs(re_part(1, 3).trace_with(X) - X(1, 3).real()) < 1e-12);
  CHECK(std::abs(im_part(1, 3).trace_with(X) - X(1, 3).imag()) < 1e-12);
  CHECK(std::abs(HermCoef::identity(4, 2.0).trace_with(X) - 2.0 * X.trace()) < 1e-12);
  CMatrix D = random_psd(4, 2, rng);
  HermCoef h = HermCoef::from_dense(D);
  CHECK(std::abs(h.trace_with(X) - (D * X).trace()) < 1e-10);
  CHECK(rel(h.to_dense(4), D) < 1e-15);
  CMatrix acc = CMatrix::Zero(4, 4);
  re_part(0, 2).add_to(acc, 2.0);
  CHECK(acc(0, 2) == Complex(1.0, 0.0));
  CHECK(acc(2, 0) == Complex(1.0, 0.0));
}

TEST_CASE("1x1 block: min x s.t. x >= 1") {
  SdpProblem p;
  int b = p.add_block("x", 1);
  p.objective_blocks.push_back({b, HermCoef::identity(1)});
  p.add_constraint(Relation::Ge, 1.0).add(b, HermCoef::identity(1));
  SdpSolution s = solve(p);
  REQUIRE(s.status == Status::Optimal);
  CHECK(s.primal_blocks[0](0, 0).real() == doctest::Approx(1.0).epsilon(1e-7));
  CHECK(s.dual_multipliers[0] == doctest::Approx(1.0).epsilon(1e-7));
}

TEST_CASE("check_certificate on a hand-built optimal pair") {
  SdpProblem p;
  int b = p.add_block("x", 1);
  p.objective_blocks.push_back({b, HermCoef::identity(1)});
  p.add_constraint(Relation::Ge, 1.0).add(b, HermCoef::identity(1));
  SdpSolution s;
  s.primal_blocks = {CMatrix::Ones(1, 1)};
  s.dual_multipliers = {1.0};
  Residuals r = check_certificate(p, s);
  CHECK(r.primal <= 1e-12);
  CHECK(r.dual <= 1e-12);
  CHECK(r.gap <= 1e-12);
}

TEST_CASE("shifted trace problem and injected violation") {
  SdpProblem p = shifted_trace(3);
  SdpSolution s = solve(p);
  REQUIRE(s.status == Status::Optimal);
  CHECK(rel(s.primal_blocks[0], CMatrix::Identity(3, 3)) < 1e-7);
  CHECK(s.residuals.primal_objective == doctest::Approx(3.0).epsilon(1e-8));
  Residuals r = check_certificate(p, s);
  CHECK(r.max() <= 1e-7);

  SdpSolution bad = s;
  bad.primal_blocks[0] += 1e-3 * CMatrix::Identity(3, 3);
  Residuals rb = check_certificate(p, bad);
  CHECK(rb.primal == doctest::Approx(1e-3).epsilon(0.01));
}

TEST_CASE("min <C, X> over the unit-trace spectraplex equals lambda_min(C)") {
  Rng rng(7);
  for (int n : {2, 4, 8}) {
    CMatrix A = complex_gaussian(n, n, 1.0, rng);
    CMatrix C = A + A.adjoint();
    SdpProblem p;
    int b = p.add_block("X", n);
    p.objective_blocks.push_back({b, HermCoef::from_dense(C)});
    p.add_constraint(Relation::Eq, 1.0).add(b, HermCoef::identity(n));
    SdpSolution s = solve(p);
    REQUIRE(s.status == Status::Optimal);
    double lmin = herm_eigenvalues(C)(0);
    CHECK(std::abs(s.residuals.primal_objective - lmin) < 1e-7 * (1 + std::abs(lmin)));
    CHECK(numeric_rank(s.primal_blocks[0], 1e-5) == 1);
  }
}

TEST_CASE("free scalar: max t s.t. t <= 2 - tr(X), X >= 0") {
  SdpProblem p;
  int b = p.add_block("X", 2);
  int t = p.add_free("t");
  p.objective_free.push_back({t, -1.0});
  p.add_constraint(Relation::Le, 2.0).add(b, HermCoef::identity(2)).add_free(t, 1.0);
  SdpSolution s = solve(p);
  REQUIRE(s.status == Status::Optimal);
  CHECK(s.scalars[t] == doctest::Approx(2.0).epsilon(1e-7));
}

TEST_CASE("infeasible problem yields a dual ray") {
  SdpProblem p;
  int b = p.add_block("x", 1);
  p.objective_blocks.push_back({b, HermCoef::identity(1)});
  p.add_constraint(Relation::Ge, 1.0).add(b, HermCoef::identity(1));
  p.add_constraint(Relation::Le, 0.5).add(b, HermCoef::identity(1));
  SdpSolution s = solve(p);
  CHECK(s.status == Status::Infeasible);
  CHECK(s.certificate_margin > 0.0);
  CHECK(s.certificate.size() == 2);
}

TEST_CASE("validation of malformed problems") {
  SdpProblem p;
  int b = p.add_block("X", 2);
  p.add_constraint(Relation::Eq, 1.0).add(b + 1, HermCoef::identity(2));
  CHECK_THROWS_AS(p.validate(), Error);
}

TEST_CASE("real embedding preserves the spectrum") {
  Rng rng(3);
  CMatrix M = random_psd(5, 3, rng);
  RMatrix E = real_embedding(M);
  CHECK(E.rows() == 10);
  Eigen::SelfAdjointEigenSolver<RMatrix> es(E);
  RVector ev = herm_eigenvalues(M);
  // each eigenvalue appears twice
  for (int i = 0; i < 5; ++i) {
    CHECK(std::abs(es.eigenvalues()(2 * i) - ev(i)) < 1e-10);
    CHECK(std::abs(es.eigenvalues()(2 * i + 1) - ev(i)) < 1e-10);
  }
}

TEST_CASE("debug dump is written") {
  std::ostringstream os;
  write_debug_dump(shifted_trace(2), os);
  CHECK(os.str().size() > 20);
}

}  // TEST_SUITE
