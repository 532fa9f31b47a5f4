#include "helpers.hpp"

#include "dfrc/designs.hpp"
#include "dfrc/experiments.hpp"

using namespace dfrc;
using testing::random_psd;
using testing::rel;

namespace {

Scenario single(const CVector& h, double gamma, double power, double noise, const ArrayGeometry& g) {
  Scenario s;
  s.geometry = g;
  s.channels = h.adjoint();
  s.sinr_thresholds = {gamma};
  s.power_budget = power;
  s.noise_comm = noise;
  return s;
}

Scenario defaults(int K, double sinr_db, std::uint64_t seed = 1) {
  ExperimentConfig c;
  c.seed = seed;
  return make_scenario(c, K, sinr_db);
}

ErrorCode code_of(const std::function<void()>& f) {
  try {
    f();
  } catch (const Error& e) {
    return e.code();
  }
  FAIL("expected an error");
  return ErrorCode::InvalidArgument;
}

}  // namespace

TEST_SUITE("designs") {

TEST_CASE("single user point: channel aligned with the target") {
  ArrayGeometry g(4, 6);
  CVector a = steering(0.0, 4);
  DesignSolution d = design_point_single(a, 0.0, 2.0, 1.0, 1.0, g);
  CHECK(rel(CMatrix(d.comm_beamformers), CMatrix(a / 2.0)) < 1e-14);
  CHECK(std::norm(a.dot(d.comm_beamformers.col(0))) == doctest::Approx(4.0));
  CHECK(d.achieved_sinrs[0] >= 2.0);
}

TEST_CASE("single user point: vacuous threshold steers at the target") {
  Rng rng(2);
  ArrayGeometry g(8, 10);
  CVector h = complex_gaussian(8, 1, 1.0, rng);
  DesignSolution d = design_point_single(h, 0.2, 1e-9, 5.0, 1.0, g);
  CVector a = steering(0.2, 8);
  CHECK(rel(CMatrix(d.comm_beamformers), CMatrix(std::sqrt(5.0) * a / a.norm())) < 1e-14);
}

TEST_CASE("single user point: active branch against a search over span{a, h}") {
  Rng rng(6);
  ArrayGeometry g(8, 10);
  const double theta = 0.1, power = 1.0, noise = 1.0;
  CVector a = steering(theta, 8);
  for (int trial = 0; trial < 3; ++trial) {
    // channel mostly orthogonal to a so the threshold binds
    CVector h = complex_gaussian(8, 1, 1.0, rng);
    h -= 0.95 * (a.dot(h) / a.squaredNorm()) * a;
    const double gamma = 0.8 * power * h.squaredNorm() / noise;
    DesignSolution d = design_point_single(h, theta, gamma, power, noise, g);
    REQUIRE(d.diagnostics.notes[0] == "branch: SINR constraint active");

    // w = sqrt(P) (cos(psi) u1 + e^{j phi} sin(psi) u2) in an orthonormal basis of span{h, a}
    CVector u1 = h / h.norm();
    CVector u2 = a - u1.dot(a) * u1;
    u2 /= u2.norm();
    auto value = [&](double psi, double phi) {
      CVector w = std::sqrt(power) * (std::cos(psi) * u1 + std::exp(kJ * phi) * std::sin(psi) * u2);
      if (std::norm(h.dot(w)) < gamma * noise) return -1.0;
      return std::norm(a.dot(w));
    };
    double best = -1, bp = 0, bf = 0;
    for (int i = 0; i <= 800; ++i)
      for (int j = 0; j < 800; ++j) {
        double psi = kPi / 2 * i / 800, phi = 2 * kPi * j / 800;
        double v = value(psi, phi);
        if (v > best) best = v, bp = psi, bf = phi;
      }
    double span = kPi / 800;
    for (int round = 0; round < 4; ++round, span /= 20) {
      double cp = bp, cf = bf;
      for (int i = -40; i <= 40; ++i)
        for (int j = -40; j <= 40; ++j) {
          double v = value(cp + span * i / 40, cf + span * j / 40);
          if (v > best) best = v, bp = cp + span * i / 40, bf = cf + span * j / 40;
        }
    }
    CHECK(rel(d.surrogate, best) < 1e-4);
    CHECK(d.surrogate >= best * (1 - 1e-12));
    CHECK(d.achieved_sinrs[0] >= gamma * (1 - 1e-12));
    CHECK(d.comm_beamformers.squaredNorm() == doctest::Approx(power));
  }
}

TEST_CASE("single user: infeasible threshold") {
  ArrayGeometry g(4, 6);
  CVector h = CVector::Ones(4);
  CHECK(code_of([&] { design_point_single(h, 0.0, 5.0, 1.0, 1.0, g); }) == ErrorCode::Infeasible);
  CHECK(code_of([&] { design_extended_single(h, 5.0, 1.0, 1.0, g); }) == ErrorCode::Infeasible);
}

TEST_CASE("single user extended: spectra") {
  ArrayGeometry g(2, 4);
  CVector h(2);
  h << 1.0, kJ;  // ||h||^2 = 2
  DesignSolution d = design_extended_single(h, 0.5, 1.0, 1.0, g);
  CHECK(rel(d.covariance, 0.5 * CMatrix::Identity(2, 2)) < 1e-14);
  CMatrix W = d.comm_beamformers * d.comm_beamformers.adjoint();
  CHECK(rel(W, CMatrix(0.5 * h * h.adjoint() / 2.0)) < 1e-14);

  d = design_extended_single(h, 1.5, 1.0, 1.0, g);
  RVector ev = herm_eigenvalues(d.covariance);
  CHECK(ev(0) == doctest::Approx(0.25));
  CHECK(ev(1) == doctest::Approx(0.75));
  CHECK(d.surrogate == doctest::Approx(16.0 / 3.0));
  CHECK(d.achieved_sinrs[0] == doctest::Approx(1.5));
  CMatrix WA = *d.aux_beamformer;
  CHECK(rel(CMatrix(d.comm_beamformers * d.comm_beamformers.adjoint() + WA * WA.adjoint()), d.covariance) < 1e-14);

  // both branches coincide at the boundary P ||h||^2 / (N_t sigma^2) = 1
  ExtendedSingleSpectrum lo = extended_single_spectrum(2.0, std::nextafter(1.0, 0.0), 1.0, 1.0, 2);
  ExtendedSingleSpectrum hi = extended_single_spectrum(2.0, 1.0, 1.0, 1.0, 2);
  CHECK_FALSE(lo.constrained);
  CHECK(hi.constrained);
  CHECK(std::abs(lo.lambda_h - hi.lambda_h) <= 1e-10);
  CHECK(std::abs(lo.lambda_perp - hi.lambda_perp) <= 1e-10);
}

TEST_CASE("point relaxation with one user matches the closed form") {
  for (std::uint64_t seed : {1, 2, 3})
    for (double db : {0.0, 10.0, 20.0, 30.0}) {
      Scenario s = defaults(1, db, seed);
      DesignSolution cf = design_point_single(s);
      DesignSolution sdp = design_point_multi(s);
      CHECK(rel(sdp.objective, cf.objective) <= 1e-5);
    }
}

TEST_CASE("point relaxation at the default operating point is rank one") {
  Scenario s = defaults(4, 15.0);
  DesignSolution d = design_point_multi(s);
  CHECK(d.diagnostics.status == DesignStatus::Optimal);
  for (double q : d.diagnostics.rank_ratios) CHECK(q <= 1e-6);
  REQUIRE(d.comm_beamformers.cols() == 4);
  for (int k = 0; k < 4; ++k) CHECK(d.achieved_sinrs[k] >= s.sinr_thresholds[k] * (1 - 1e-6));
  CHECK(d.covariance.trace().real() <= s.power_budget * (1 + 1e-6));
  CHECK(d.duals.has_value());
}

TEST_CASE("point relaxation with a vacuous threshold reaches the unconstrained optimum") {
  Scenario s = defaults(4, -40.0);
  DesignSolution d = design_point_multi(s);

  // brute force over R = P [u1 u2] M [u1 u2]^H, M = [[p, c], [c*, 1-p]]
  const int nt = s.geometry.n_tx;
  CVector u1 = steering(0.0, nt), u2 = steering_deriv(0.0, nt);
  u1 /= u1.norm();
  u2 /= u2.norm();
  double best = std::numeric_limits<double>::infinity();
  for (int i = 1; i <= 50; ++i)
    for (int j = 0; j <= 10; ++j)
      for (int k = 0; k < 8; ++k) {
        double p = i / 50.0;
        Complex c = std::sqrt(p * (1 - p)) * (j / 10.0) * std::exp(kJ * (2 * kPi * k / 8));
        CMatrix R = s.power_budget * (p * u1 * u1.adjoint() + (1 - p) * u2 * u2.adjoint() + c * u1 * u2.adjoint() +
                                      std::conj(c) * u2 * u1.adjoint());
        try {
          best = std::min(best, crb_point_theta(R, 0.0, s.point.alpha, s));
        } catch (const Error&) {
        }
      }
  CHECK(rel(d.objective, best) < 1e-6);
}

TEST_CASE("point relaxation reports infeasibility") {
  Scenario s = defaults(4, 60.0);
  CHECK(code_of([&] { design_point_multi(s); }) == ErrorCode::Infeasible);
  CHECK(code_of([&] { design_extended_multi(s); }) == ErrorCode::Infeasible);
}

TEST_CASE("extended relaxation with one user matches the closed form") {
  for (std::uint64_t seed : {1, 2})
    for (double db : {0.0, 15.0, 30.0, 38.0}) {
      Scenario s = defaults(1, db, seed);
      DesignSolution cf = design_extended_single(s);
      DesignSolution sdp = design_extended_multi(s);
      CHECK(rel(sdp.objective, cf.objective) <= 1e-5);
    }
}

TEST_CASE("extended relaxation with a vacuous threshold is isotropic") {
  Scenario s = defaults(4, -40.0);
  DesignSolution d = design_extended_multi(s);
  const int nt = s.geometry.n_tx;
  // the objective is flat at the optimum, so the covariance is only pinned to about sqrt(tol)
  CHECK(rel(d.covariance, CMatrix((s.power_budget / nt) * CMatrix::Identity(nt, nt))) < 1e-5);
  double expect = nt * nt * s.noise_radar * s.geometry.n_rx / (s.frame_len * s.power_budget);
  CHECK(rel(d.objective, expect) < 1e-8);
}

TEST_CASE("extended relaxation is monotone in the threshold") {
  double prev = 0.0;
  for (double db : {0.0, 6.0, 12.0, 18.0, 24.0}) {
    DesignSolution d = design_extended_multi(defaults(6, db));
    CHECK(d.objective >= prev * (1 - 1e-6));
    prev = d.objective;
    for (const auto& w : d.comm_beamformers.colwise()) CHECK(w.norm() > 0.0);
    for (int k = 0; k < 6; ++k) CHECK(d.achieved_sinrs[k] >= db_to_linear(db) * (1 - 1e-6));
  }
}

TEST_CASE("rank-one extraction identities") {
  // idempotent on rank-one input
  Rng rng(4);
  CVector w = complex_gaussian(4, 1, 1.0, rng);
  CVector h = complex_gaussian(4, 1, 1.0, rng);
  CMatrix W = w * w.adjoint();
  CMatrix R = W + random_psd(4, 4, rng);
  RankOneExtraction ex = extract_rank_one(R, {W}, {h * h.adjoint()});
  CHECK(rel(ex.W_tilde[0], W) < 1e-12);

  // hand case: W = I_2, h = e1, R = 2 I
  CVector e1 = CVector::Zero(2);
  e1(0) = 1.0;
  ex = extract_rank_one(2.0 * CMatrix::Identity(2, 2), {CMatrix::Identity(2, 2)}, {e1 * e1.adjoint()});
  CHECK(rel(ex.W_tilde[0], CMatrix(e1 * e1.adjoint())) < 1e-14);
  CMatrix diag12 = CMatrix::Zero(2, 2);
  diag12.diagonal() << 1.0, 2.0;
  CHECK(rel(CMatrix(ex.aux_beamformer * ex.aux_beamformer.adjoint()), diag12) < 1e-12);

  // zero useful power
  CVector e2 = CVector::Zero(2);
  e2(1) = 1.0;
  CHECK(code_of([&] { extract_rank_one(2.0 * CMatrix::Identity(2, 2), {e1 * e1.adjoint()}, {e2 * e2.adjoint()}); }) ==
        ErrorCode::ZeroUsefulPower);
}

TEST_CASE("rank-one extraction preserves the metrics of high-rank blocks") {
  Rng rng(12);
  const int nt = 6, K = 3;
  Scenario s;
  s.geometry = ArrayGeometry(nt, 8);
  s.channels = complex_gaussian(K, nt, 1.0, rng);
  s.sinr_thresholds.assign(K, 1.0);
  std::vector<CMatrix> Wb, Q;
  CMatrix R = random_psd(nt, nt, rng);
  for (int k = 0; k < K; ++k) {
    Wb.push_back(random_psd(nt, 3, rng));
    Q.push_back(s.channel_gram(k));
    R += Wb.back();
  }
  RankOneExtraction ex = extract_rank_one(R, Wb, Q);
  DesignSolution sol;
  sol.comm_beamformers = ex.beamformers;
  sol.aux_beamformer = ex.aux_beamformer;
  CMatrix Rx = ex.beamformers * ex.beamformers.adjoint() + ex.aux_beamformer * ex.aux_beamformer.adjoint();
  CHECK(rel(Rx, R) < 1e-10);
  for (int k = 0; k < K; ++k) {
    CHECK(numeric_rank(ex.W_tilde[k], 1e-8) == 1);
    CHECK(rel(sinr_extended(sol, k, s), sinr_covariance(Wb[k], R, k, s)) < 1e-10);
  }
}

TEST_CASE("eigen-truncation baseline") {
  Scenario s = defaults(6, 20.0);
  DesignSolution d = design_extended_multi(s);
  DesignSolution b = eig_truncation_baseline(d, s);
  CHECK(b.covariance.trace().real() <= s.power_budget * (1 + 1e-9));
  CHECK(b.objective >= d.objective * (1 - 1e-9));
  CHECK(b.achieved_sinrs.size() == 6u);
  DesignSolution bad = d;
  bad.relaxed_blocks.pop_back();
  CHECK_THROWS_AS(eig_truncation_baseline(bad, s), Error);
}

}  // TEST_SUITE
