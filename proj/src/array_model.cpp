#include "dfrc/array_model.hpp"

#include <cmath>

namespace dfrc {

ArrayGeometry::ArrayGeometry(int tx, int rx) : n_tx(tx), n_rx(rx) {
  if (tx < 2 || rx < 2)
    throw Error(ErrorCode::InvalidArgument, "arrays need at least two elements");
}

CVector steering(double theta, int n) {
  if (n < 1) throw Error(ErrorCode::InvalidArgument, "steering needs n >= 1");
  CVector a(n);
  const double s = std::sin(theta);
  for (int m = 0; m < n; ++m) {
    double phase = kPi * (m - 0.5 * (n - 1)) * s;
    a(m) = Complex(std::cos(phase), std::sin(phase));
  }
  return a;
}

CVector steering_deriv(double theta, int n) {
  if (n < 2) throw Error(ErrorCode::InvalidArgument, "steering_deriv needs n >= 2");
  CVector a = steering(theta, n);
  const double c = std::cos(theta);
  for (int m = 0; m < n; ++m) a(m) *= kJ * (kPi * (m - 0.5 * (n - 1)) * c);
  return a;
}

double steering_deriv_norm2(double theta, int n) {
  // sum of squared centred indices is n(n^2-1)/12
  double c = std::cos(theta);
  return kPi * kPi * c * c * n * (static_cast<double>(n) * n - 1.0) / 12.0;
}

CMatrix response_point(const PointTarget& t, const ArrayGeometry& g) {
  return t.alpha * steering(t.theta, g.n_rx) * steering(t.theta, g.n_tx).adjoint();
}

CMatrix response_extended(const std::vector<Scatterer>& scatterers, const ArrayGeometry& g) {
  if (scatterers.empty())
    throw Error(ErrorCode::InvalidArgument, "extended response needs at least one scatterer");
  CMatrix G = CMatrix::Zero(g.n_rx, g.n_tx);
  for (const auto& s : scatterers) G += response_point({s.theta, s.alpha}, g);
  return G;
}

CMatrix random_extended_response(const ArrayGeometry& g, Rng& rng) {
  return complex_gaussian(g.n_rx, g.n_tx, 1.0, rng);
}

}  // namespace dfrc
