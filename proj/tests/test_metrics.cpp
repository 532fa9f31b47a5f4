#include "helpers.hpp"

#include "dfrc/metrics.hpp"
#include "dfrc/sim.hpp"

using namespace dfrc;
using testing::random_psd;
using testing::rel;

namespace {

Scenario small_scenario(int nt, int nr, int L) {
  Scenario s;
  s.geometry = ArrayGeometry(nt, nr);
  s.channels = CMatrix(0, nt);
  s.frame_len = L;
  s.noise_radar = 1.0;
  return s;
}

// Real-parameter FIM of (theta, Re alpha, Im alpha) for Y = alpha b a^H X + Z,
// with X built so that X X^H / L = R. Returns the inverse.
RMatrix brute_force_crb(const CMatrix& R, double theta, Complex alpha, const Scenario& s) {
  const int nt = s.geometry.n_tx, nr = s.geometry.n_rx, L = s.frame_len;
  CMatrix X = psd_sqrt(R) * gen_streams(nt, L, 99);
  CVector a = steering(theta, nt), ad = steering_deriv(theta, nt);
  CVector b = steering(theta, nr), bd = steering_deriv(theta, nr);
  CMatrix dth = alpha * (bd * a.adjoint() + b * ad.adjoint()) * X;
  CMatrix dre = b * a.adjoint() * X;
  CMatrix dim = kJ * dre;
  const CMatrix* d[3] = {&dth, &dre, &dim};
  RMatrix J(3, 3);
  for (int i = 0; i < 3; ++i)
    for (int j = 0; j < 3; ++j) J(i, j) = 2.0 / s.noise_radar * (d[i]->adjoint() * *d[j]).trace().real();
  return J.inverse();
}

}  // namespace

TEST_SUITE("metrics") {

TEST_CASE("crb_point_theta against the real-parameter information matrix") {
  Rng rng(21);
  for (int trial = 0; trial < 10; ++trial) {
    Scenario s = small_scenario(4, 6, 16);
    s.noise_radar = 0.5 + trial;
    CMatrix R = random_psd(4, 1 + trial % 4, rng);
    double theta = 0.1 * trial - 0.4;
    Complex alpha(0.7, -0.2 * trial);
    RMatrix C = brute_force_crb(R, theta, alpha, s);
    CHECK(rel(crb_point_theta(R, theta, alpha, s), C(0, 0)) < 1e-9);
    // the closed form for alpha exceeds the real-parameter bound on E|alpha_hat - alpha|^2
    // by sigma^2 |tr(Adot^H A R)|^2 / (2 L tr(A^H A R) D), and matches it when that trace vanishes
    PointTraces t = point_traces(R, theta, s.geometry);
    double D = t.tdd * t.taa - std::norm(t.tda);
    double excess = s.noise_radar * std::norm(t.tda) / (2.0 * s.frame_len * t.taa * D);
    CHECK(rel(crb_point_alpha(R, theta, alpha, s), C(1, 1) + C(2, 2) + excess) < 1e-9);
    CHECK(crb_point_alpha(R, theta, alpha, s) > 0.0);
  }
}

TEST_CASE("crb_point_theta on the identity covariance") {
  // N_t=4, N_r=6, theta=0, alpha=1, L=16: a^H adot = 0 so the bound is
  // sigma^2 / (2 L tr(Adot^H Adot))
  Scenario s = small_scenario(4, 6, 16);
  CMatrix R = CMatrix::Identity(4, 4);
  double ndb = steering_deriv(0.0, 6).squaredNorm();
  double nda = steering_deriv(0.0, 4).squaredNorm();
  double tdd = ndb * 4.0 + 6.0 * nda;
  CHECK(rel(crb_point_theta(R, 0.0, 1.0, s), 1.0 / (2.0 * 16.0 * tdd)) < 1e-12);
  CHECK(rel(crb_point_alpha(R, 0.0, 1.0, s), 1.0 / (16.0 * 24.0)) < 1e-12);
  RMatrix C = brute_force_crb(R, 0.0, 1.0, s);
  CHECK(rel(crb_point_alpha(R, 0.0, 1.0, s), C(1, 1) + C(2, 2)) < 1e-9);
}

TEST_CASE("crb_point_theta rank-one chain and scaling") {
  Rng rng(4);
  Scenario s = small_scenario(16, 20, 30);
  for (int trial = 0; trial < 5; ++trial) {
    CVector w = complex_gaussian(16, 1, 1.0, rng);
    CMatrix R = w * w.adjoint();
    double theta = 0.2 * trial;
    Complex alpha(0.3, 0.4);
    double bd2 = steering_deriv_norm2(theta, 20);
    double simple = s.noise_radar / (2.0 * std::norm(alpha) * s.frame_len * bd2 * std::norm(steering(theta, 16).dot(w)));
    CHECK(rel(crb_point_theta(R, theta, alpha, s), simple) < 1e-9);
    CHECK(rel(crb_point_theta(3.5 * R, theta, alpha, s), crb_point_theta(R, theta, alpha, s) / 3.5) < 1e-12);
  }
}

TEST_CASE("point CRB with no power on the target is singular") {
  Scenario s = small_scenario(4, 6, 16);
  CHECK_THROWS_AS(crb_point_theta(CMatrix::Zero(4, 4), 0.0, 1.0, s), Error);
  // beam orthogonal to a(0): a = ones, w = (1, -1, 0, 0)
  CVector w = CVector::Zero(4);
  w(0) = 1.0;
  w(1) = -1.0;
  try {
    crb_point_theta(w * w.adjoint(), 0.0, 1.0, s);
    FAIL("expected SingularFim");
  } catch (const Error& e) {
    CHECK(e.code() == ErrorCode::SingularFim);
  }
}

TEST_CASE("schur_term cases") {
  ArrayGeometry g(8, 10);
  PointTraces t = point_traces(CMatrix::Identity(8, 8), 0.3, g);
  CHECK(std::abs(t.tda) < 1e-10);
  CHECK(rel(schur_term(t), t.tdd) < 1e-14);

  // R = c a a^H: t = c ||bdot||^2 N_t^2
  CVector a = steering(0.3, 8);
  t = point_traces(2.0 * a * a.adjoint(), 0.3, g);
  CHECK(rel(schur_term(t), 2.0 * steering_deriv_norm2(0.3, 10) * 64.0) < 1e-10);
}

TEST_CASE("extended FIM and CRB") {
  Scenario s = small_scenario(16, 20, 30);
  CMatrix J = fim_extended(CMatrix::Identity(16, 16), s);
  CHECK(rel(J, 1.5 * CMatrix::Identity(16, 16)) < 1e-15);

  Rng rng(8);
  CMatrix low = random_psd(16, 4, rng);
  CHECK(numeric_rank(fim_extended(low, s), 1e-10) == 4);
  CHECK_THROWS_AS(crb_extended(low, s), Error);

  s.power_budget = 1000.0;
  CMatrix iso = (1000.0 / 16.0) * CMatrix::Identity(16, 16);
  CHECK(crb_extended(iso, s) == doctest::Approx(20.0 * 256.0 / 30000.0).epsilon(1e-12));
  CMatrix R = random_psd(16, 16, rng);
  CHECK(rel(crb_extended(2.0 * R, s), crb_extended(R, s) / 2.0) < 1e-10);

  // isotropic covariance minimizes tr(R^{-1}) at fixed trace
  for (int trial = 0; trial < 10; ++trial) {
    CMatrix Q = random_psd(16, 16, rng);
    Q *= 1000.0 / Q.trace().real();
    CHECK(trace_inverse(Q) >= trace_inverse(iso) - 1e-12);
  }
}

TEST_CASE("SINR expressions") {
  Rng rng(9);
  Scenario s = small_scenario(4, 6, 16);
  s.channels = complex_gaussian(2, 4, 1.0, rng);
  s.sinr_thresholds = {1.0, 1.0};
  s.noise_comm = 0.7;
  DesignSolution sol;
  sol.comm_beamformers = complex_gaussian(4, 2, 1.0, rng);
  for (int k = 0; k < 2; ++k) {
    Complex hw[2];
    for (int i = 0; i < 2; ++i) {
      hw[i] = 0.0;
      for (int m = 0; m < 4; ++m) hw[i] += s.channels(k, m) * sol.comm_beamformers(m, i);
    }
    double expect = std::norm(hw[k]) / (std::norm(hw[1 - k]) + 0.7);
    CHECK(rel(sinr_point(sol, k, s), expect) < 1e-12);
  }

  // zero aux beamformer reduces to the point formula
  sol.aux_beamformer = CMatrix::Zero(4, 4);
  CHECK(rel(sinr_extended(sol, 0, s), sinr_point(sol, 0, s)) < 1e-15);
  CMatrix WA = complex_gaussian(4, 4, 1.0, rng);
  sol.aux_beamformer = WA;
  for (int k = 0; k < 2; ++k) {
    double useful = std::norm((s.channels.row(k) * sol.comm_beamformers.col(k))(0));
    double other = std::norm((s.channels.row(k) * sol.comm_beamformers.col(1 - k))(0));
    double leak = (s.channels.row(k) * WA).squaredNorm();
    CHECK(rel(sinr_extended(sol, k, s), useful / (other + leak + 0.7)) < 1e-12);
    CMatrix W = sol.comm_beamformers;
    CMatrix R = W * W.adjoint() + WA * WA.adjoint();
    CHECK(rel(sinr_covariance(W.col(k) * W.col(k).adjoint(), R, k, s), sinr_extended(sol, k, s)) < 1e-12);
  }

  // single user: no interference term
  Scenario one = small_scenario(4, 6, 16);
  one.channels = s.channels.topRows(1);
  one.sinr_thresholds = {1.0};
  one.noise_comm = 0.7;
  DesignSolution s1;
  s1.comm_beamformers = sol.comm_beamformers.leftCols(1);
  double g = std::norm((one.channels.row(0) * s1.comm_beamformers)(0));
  CHECK(rel(sinr_point(s1, 0, one), g / 0.7) < 1e-12);
}

TEST_CASE("beampattern") {
  ArrayGeometry g(8, 10);
  std::vector<double> grid;
  for (int i = -10; i <= 10; ++i) grid.push_back(0.15 * i);
  RVector p = beampattern(CMatrix::Identity(8, 8), grid, g);
  for (Eigen::Index i = 0; i < p.size(); ++i) CHECK(p(i) == doctest::Approx(8.0));

  double th0 = 0.3;
  CVector a0 = steering(th0, 8);
  CMatrix R = 1000.0 * a0 * a0.adjoint() / 8.0;
  RVector q = beampattern(R, {th0, -0.4}, g);
  CHECK(q(0) == doctest::Approx(8000.0));
  CHECK(q(1) < q(0));
  Rng rng(1);
  CMatrix M = random_psd(8, 3, rng);
  RVector r = beampattern(M, grid, g);
  for (std::size_t i = 0; i < grid.size(); ++i) {
    CVector a = steering(grid[i], 8);
    CHECK(rel(r(static_cast<Eigen::Index>(i)), a.dot(M * a).real()) < 1e-12);
  }
}

TEST_CASE("scenario validation") {
  Scenario s = small_scenario(4, 6, 16);
  s.channels = CMatrix::Ones(2, 4);
  s.sinr_thresholds = {1.0};
  CHECK_THROWS_AS(s.validate(), Error);
  s.sinr_thresholds = {1.0, 2.0};
  CHECK_NOTHROW(s.validate());
  CHECK_NOTHROW(s.validate(true));
  s.frame_len = 3;
  CHECK_THROWS_AS(s.validate(true), Error);
  s.frame_len = 16;
  s.point.theta = kPi / 2;
  CHECK_THROWS_AS(s.validate(), Error);
}

}  // TEST_SUITE
