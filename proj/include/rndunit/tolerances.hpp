#pragma once

namespace rndunit {

// Numeric tolerances shared by every validation check in the library.
struct Tolerances {
  double hermitian = 1e-12;    // relative to max(1, |A|_max)
  double unitary = 1e-10;      // |U^dag U - 1|_max
  double trace = 1e-12;        // |Tr rho - 1|
  double positivity = 1e-10;   // smallest admissible eigenvalue is -positivity
  double weights = 1e-12;      // |sum p - 1|
  double commutation = 1e-10;  // relative, see commutes()
  double degenerate = 1e-12;   // relative to max(1, spectral span)
};

inline constexpr Tolerances kDefaultTolerances{};

}  // namespace rndunit
