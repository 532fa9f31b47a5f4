#pragma once

#include <utility>
#include <vector>

#include "dfrc/numerics.hpp"

namespace dfrc {

/// Transmit/receive uniform linear arrays with half-wavelength spacing,
/// phase-referenced to the array centre.
struct ArrayGeometry {
  int n_tx = 16;
  int n_rx = 20;

  ArrayGeometry() = default;
  ArrayGeometry(int tx, int rx);
};

struct PointTarget {
  double theta = 0.0;  // radians
  Complex alpha{1.0, 0.0};
};

struct Scatterer {
  Complex alpha;
  double theta;
};

/// a(theta), entry m = exp(j*pi*(m - (n-1)/2)*sin(theta)).
CVector steering(double theta, int n);

/// d a / d theta.
CVector steering_deriv(double theta, int n);

/// Closed form of ||steering_deriv||^2.
double steering_deriv_norm2(double theta, int n);

/// G = alpha * b(theta) a(theta)^H, size n_rx x n_tx.
CMatrix response_point(const PointTarget& t, const ArrayGeometry& g);

/// Sum of point responses.
CMatrix response_extended(const std::vector<Scatterer>& scatterers, const ArrayGeometry& g);

/// i.i.d. CN(0,1) response matrix.
CMatrix random_extended_response(const ArrayGeometry& g, Rng& rng);

}  // namespace dfrc
