#pragma once

#include <doctest.h>

#include "dfrc/numerics.hpp"

namespace testing {

inline dfrc::CMatrix random_psd(int n, int rank, dfrc::Rng& rng) {
  dfrc::CMatrix B = dfrc::complex_gaussian(n, rank, 1.0, rng);
  return B * B.adjoint();
}

inline double rel(double a, double b) { return std::abs(a - b) / std::max(std::abs(b), 1e-300); }

inline double rel(const dfrc::CMatrix& a, const dfrc::CMatrix& b) {
  return (a - b).norm() / std::max(b.norm(), 1e-300);
}

}  // namespace testing
