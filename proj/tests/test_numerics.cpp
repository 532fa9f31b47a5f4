#include "helpers.hpp"

#include "dfrc/numerics.hpp"

using namespace dfrc;
using testing::random_psd;
using testing::rel;

TEST_SUITE("numerics") {

TEST_CASE("herm_eig on identity and diagonal") {
  auto e = herm_eig(CMatrix::Identity(3, 3));
  CHECK((e.values - RVector::Ones(3)).norm() < 1e-14);
  CHECK(rel(e.vectors.adjoint() * e.vectors, CMatrix::Identity(3, 3)) < 1e-14);

  CMatrix d = CMatrix::Zero(3, 3);
  d.diagonal() << 3.0, 1.0, 2.0;
  e = herm_eig(d);
  CHECK(e.values(0) == doctest::Approx(1.0));
  CHECK(e.values(1) == doctest::Approx(2.0));
  CHECK(e.values(2) == doctest::Approx(3.0));
  // ascending values map back to the permuted canonical basis, phase fixed
  CHECK(std::abs(e.vectors(1, 0) - 1.0) < 1e-14);
  CHECK(std::abs(e.vectors(2, 1) - 1.0) < 1e-14);
  CHECK(std::abs(e.vectors(0, 2) - 1.0) < 1e-14);
}

TEST_CASE("herm_eig of h h^H with h = (1, j)") {
  CVector h(2);
  h << 1.0, kJ;
  auto e = herm_eig(h * h.adjoint());
  CHECK(std::abs(e.values(0)) < 1e-14);
  CHECK(e.values(1) == doctest::Approx(2.0));
  // eigenvector equals h / sqrt(2) up to a unit phase
  CHECK(std::abs(std::abs(e.vectors.col(1).dot(h)) - std::sqrt(2.0)) < 1e-14);
  // phase convention: largest-magnitude entry real positive, first index on ties
  CHECK(std::abs(e.vectors(0, 1).imag()) < 1e-15);
  CHECK(e.vectors(0, 1).real() > 0.0);
}

TEST_CASE("herm_eig reconstructs random Hermitian input") {
  Rng rng(11);
  for (int n : {1, 2, 5, 12}) {
    CMatrix a = complex_gaussian(n, n, 1.0, rng);
    CMatrix m = a + a.adjoint();
    auto e = herm_eig(m);
    CMatrix back = e.vectors * e.values.cast<Complex>().asDiagonal() * e.vectors.adjoint();
    CHECK(rel(back, m) < 1e-12);
    for (int i = 1; i < n; ++i) CHECK(e.values(i) >= e.values(i - 1));
  }
}

TEST_CASE("herm_eig rejects non-Hermitian input") {
  CMatrix m = CMatrix::Identity(2, 2);
  m(0, 1) = 1e-3;
  CHECK_THROWS_AS(herm_eig(m), Error);
  try {
    herm_eig(m);
  } catch (const Error& e) {
    CHECK(e.code() == ErrorCode::NonHermitian);
  }
  CHECK_FALSE(is_hermitian(m));
  CHECK(is_hermitian(hermitian_part(m)));
}

TEST_CASE("psd_sqrt") {
  CHECK(rel(psd_sqrt(CMatrix::Identity(2, 2)), CMatrix::Identity(2, 2)) < 1e-14);

  CMatrix e11 = CMatrix::Zero(3, 3);
  e11(0, 0) = 4.0;
  CMatrix half = e11 / 2.0;
  CHECK(rel(psd_sqrt(e11), half) < 1e-14);

  Rng rng(3);
  for (int trial = 0; trial < 20; ++trial) {
    CMatrix m = random_psd(6, 1 + trial % 6, rng);
    CMatrix b = psd_sqrt(m);
    CHECK(rel(b * b.adjoint(), m) <= 1e-8);
    CHECK(hermitian_deviation(b) < 1e-10 * b.norm());
  }

  CMatrix bad = CMatrix::Identity(2, 2);
  bad(1, 1) = -1e-3;
  CHECK_THROWS_AS(psd_sqrt(bad), Error);
  // small negative noise is clipped, not rejected
  CMatrix noisy = CMatrix::Identity(2, 2);
  noisy(1, 1) = -1e-9;
  CMatrix s = psd_sqrt(noisy);
  CHECK(std::abs(s(1, 1)) < 1e-12);
}

TEST_CASE("numeric_rank") {
  Rng rng(5);
  CVector w = complex_gaussian(5, 1, 1.0, rng);
  CHECK(numeric_rank(w * w.adjoint(), 1e-6) == 1);
  CHECK(numeric_rank(CMatrix::Identity(4, 4), 1e-6) == 4);
  CHECK(numeric_rank(CMatrix::Zero(3, 3), 1e-6) == 0);
  CHECK(numeric_rank(random_psd(8, 3, rng), 1e-8) == 3);
}

TEST_CASE("second_eigen_ratio") {
  CMatrix d = CMatrix::Zero(3, 3);
  d.diagonal() << 4.0, 1.0, 0.5;
  CHECK(second_eigen_ratio(d) == doctest::Approx(0.25));
  CHECK(second_eigen_ratio(CMatrix::Zero(2, 2)) == 0.0);
  CHECK(second_eigen_ratio(CMatrix::Identity(1, 1)) == 0.0);
}

TEST_CASE("complex_gaussian moments") {
  Rng rng(17);
  CMatrix g = complex_gaussian(400, 400, 2.0, rng);
  double p = g.squaredNorm() / g.size();
  CHECK(p == doctest::Approx(2.0).epsilon(0.02));
  double re = g.real().squaredNorm() / g.size();
  CHECK(re == doctest::Approx(1.0).epsilon(0.02));
  CHECK(std::abs(g.sum()) / g.size() < 0.01);
}

TEST_CASE("random_unitary is unitary") {
  Rng rng(2);
  CMatrix u = random_unitary(7, rng);
  CHECK(rel(u.adjoint() * u, CMatrix::Identity(7, 7)) < 1e-13);
}

TEST_CASE("derive_seed is deterministic and separates streams") {
  CHECK(derive_seed(1, 2, 3) == derive_seed(1, 2, 3));
  CHECK(derive_seed(1, 2, 3) != derive_seed(1, 3, 2));
  CHECK(derive_seed(1, 2, 3) != derive_seed(2, 2, 3));
  CHECK(derive_seed(0, 0, 0) != 0u);
}

TEST_CASE("unit conversions") {
  CHECK(dbm_to_mw(30.0) == doctest::Approx(1000.0));
  CHECK(db_to_linear(15.0) == doctest::Approx(31.6227766017));
  CHECK(linear_to_db(100.0) == doctest::Approx(20.0));
  CHECK(rad_to_deg(deg_to_rad(37.5)) == doctest::Approx(37.5));
}

}  // TEST_SUITE
