#pragma once

#include <complex>
#include <functional>

namespace loveres {

using Complex = std::complex<double>;

// A complex-valued function of the wave number. Must be reentrant.
using ComplexFunction = std::function<Complex(Complex)>;

struct Rectangle {
  double re_min = 0, re_max = 0, im_min = 0, im_max = 0;

  bool contains(Complex z, double pad = 0.0) const {
    return z.real() >= re_min - pad && z.real() <= re_max + pad &&
           z.imag() >= im_min - pad && z.imag() <= im_max + pad;
  }
  double width() const { return re_max - re_min; }
  double height() const { return im_max - im_min; }
  Complex center() const { return {0.5 * (re_min + re_max), 0.5 * (im_min + im_max)}; }
  double diameter() const { return std::hypot(width(), height()); }
};

inline constexpr double kPi = 3.14159265358979323846;

}  // namespace loveres
