#pragma once

namespace retdist {

// Modified Bessel function of the second kind K_nu(x) for real order nu and
// x > 0. Symmetric in nu. Throws NumericError when the value overflows a
// double (use log_bessel_k instead).
double bessel_k(double nu, double x);

// log K_nu(x). Finite wherever K_nu itself over- or underflows: large
// orders at small argument (K_200(1e-8) ~ 1e2370) and large arguments
// (K_nu(1e5) ~ 1e-43430) are both representable on the log scale.
double log_bessel_k(double nu, double x);

}  // namespace retdist
