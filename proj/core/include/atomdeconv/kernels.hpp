#pragma once

#include "atomdeconv/spectral.hpp"

namespace atomdeconv {

// Normalizing constant C_{a,m} = (1/2) * integral_{-1}^{1} exp(-a|t|^{-m}) dt,
// so the normalized kernel integrates to 2 over [-1, 1]. The t = 0 node is
// evaluated as the integrand's limit, 0.
double flat_top_normalizer(double a, double m);

// Fourier-domain deconvolution kernel exp(-a|t|^{-m}) / C_{a,m} on [-1, 1].
// Vanishes to infinite order at t = 0 and identically outside [-1, 1].
class FlatTopKernel {
public:
  FlatTopKernel() : FlatTopKernel(1.0, 1.0) {}
  FlatTopKernel(double a, double m);

  double a() const { return a_; }
  double m() const { return m_; }
  double normalizer() const { return normalizer_; }

  double operator()(double t) const;

private:
  double a_;
  double m_;
  double normalizer_;
};

double flat_top_eval(const FlatTopKernel& kernel, double t);

// Fourier side of the sinc kernel: the indicator of [-1, 1].
double sinc_phi(double t);

// x side: sin(x) / (pi x), with sinc_x(0) = 1/pi.
double sinc_x(double x);

}  // namespace atomdeconv
