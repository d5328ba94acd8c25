#pragma once

#include <complex>

namespace homog::fft {

// Thin FFTW wrappers.  All transforms are unnormalized: a forward/backward
// round trip multiplies by the product of the transform lengths (for DST-I,
// by prod 2*(n_j + 1)).  Row-major layout, axis 0 slowest, matching Field.

// full-dimensional real-to-half-complex transform; out is n[0] x ... x (n[dim-1]/2 + 1)
void forwardR2C(int dim, const long* n, const double* in, std::complex<double>* out);
void backwardC2R(int dim, const long* n, std::complex<double>* in, double* out);

// DST-I (RODFT00) applied along every axis, out-of-place allowed (in == out ok)
void dst1All(int dim, const long* n, double* in, double* out);

// single-axis transforms on a 2D row-major view (n0 x n1)
void forwardR2CAxis0(long n0, long n1, const double* in, std::complex<double>* out);
void backwardC2RAxis0(long n0, long n1, std::complex<double>* in, double* out);
void forwardR2CAxis1(long n0, long n1, const double* in, std::complex<double>* out);
void backwardC2RAxis1(long n0, long n1, std::complex<double>* in, double* out);
void dst1Axis0(long n0, long n1, double* data);
void dst1Axis1(long n0, long n1, double* data);

}  // namespace homog::fft
