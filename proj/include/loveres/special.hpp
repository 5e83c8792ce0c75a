#pragma once

#include <complex>

namespace loveres {

// Sine integral Si(x) = \int_0^x sin(t)/t dt.
double sine_integral(double x);

// Generalized exponential integral E_n(z) = \int_1^inf e^{-zt} t^{-n} dt,
// n >= 1, Re z >= 0, z != 0 when n == 1.
std::complex<double> expint_e(int n, std::complex<double> z);

// T_n(y) = (1/2pi) \int_{|k|>K} e^{iky} (ik)^{-n} dk for y >= 0; T_1(0) is
// the right limit 1/2.
double fourier_tail(int n, double K, double y);

}  // namespace loveres
