#include "fftwrap.hpp"

#include <fftw3.h>

#include <mutex>

namespace homog::fft {

namespace {
std::mutex plan_mutex;  // FFTW plan creation is not thread safe

fftw_complex* fc(std::complex<double>* p) { return reinterpret_cast<fftw_complex*>(p); }
}  // namespace

void forwardR2C(int dim, const long* n, const double* in, std::complex<double>* out) {
  int ni[3];
  for (int j = 0; j < dim; ++j) ni[j] = static_cast<int>(n[j]);
  fftw_plan plan;
  {
    std::lock_guard<std::mutex> lock(plan_mutex);
    plan = fftw_plan_dft_r2c(dim, ni, const_cast<double*>(in), fc(out), FFTW_ESTIMATE);
  }
  fftw_execute(plan);
  std::lock_guard<std::mutex> lock(plan_mutex);
  fftw_destroy_plan(plan);
}

void backwardC2R(int dim, const long* n, std::complex<double>* in, double* out) {
  int ni[3];
  for (int j = 0; j < dim; ++j) ni[j] = static_cast<int>(n[j]);
  fftw_plan plan;
  {
    std::lock_guard<std::mutex> lock(plan_mutex);
    plan = fftw_plan_dft_c2r(dim, ni, fc(in), out, FFTW_ESTIMATE);
  }
  fftw_execute(plan);
  std::lock_guard<std::mutex> lock(plan_mutex);
  fftw_destroy_plan(plan);
}

void dst1All(int dim, const long* n, double* in, double* out) {
  int ni[3];
  fftw_r2r_kind kinds[3];
  for (int j = 0; j < dim; ++j) {
    ni[j] = static_cast<int>(n[j]);
    kinds[j] = FFTW_RODFT00;
  }
  fftw_plan plan;
  {
    std::lock_guard<std::mutex> lock(plan_mutex);
    plan = fftw_plan_r2r(dim, ni, in, out, kinds, FFTW_ESTIMATE);
  }
  fftw_execute(plan);
  std::lock_guard<std::mutex> lock(plan_mutex);
  fftw_destroy_plan(plan);
}

namespace {

void manyR2C(int len, int howmany, int stride, int dist, int odist, const double* in,
             std::complex<double>* out) {
  fftw_plan plan;
  {
    std::lock_guard<std::mutex> lock(plan_mutex);
    plan = fftw_plan_many_dft_r2c(1, &len, howmany, const_cast<double*>(in), nullptr, stride, dist,
                                  fc(out), nullptr, stride, odist, FFTW_ESTIMATE);
  }
  fftw_execute(plan);
  std::lock_guard<std::mutex> lock(plan_mutex);
  fftw_destroy_plan(plan);
}

void manyC2R(int len, int howmany, int stride, int idist, int dist, std::complex<double>* in,
             double* out) {
  fftw_plan plan;
  {
    std::lock_guard<std::mutex> lock(plan_mutex);
    plan = fftw_plan_many_dft_c2r(1, &len, howmany, fc(in), nullptr, stride, idist, out, nullptr,
                                  stride, dist, FFTW_ESTIMATE);
  }
  fftw_execute(plan);
  std::lock_guard<std::mutex> lock(plan_mutex);
  fftw_destroy_plan(plan);
}

void manyDst1(int len, int howmany, int stride, int dist, double* data) {
  fftw_r2r_kind kind = FFTW_RODFT00;
  fftw_plan plan;
  {
    std::lock_guard<std::mutex> lock(plan_mutex);
    plan = fftw_plan_many_r2r(1, &len, howmany, data, nullptr, stride, dist, data, nullptr, stride,
                              dist, &kind, FFTW_ESTIMATE);
  }
  fftw_execute(plan);
  std::lock_guard<std::mutex> lock(plan_mutex);
  fftw_destroy_plan(plan);
}

}  // namespace

void forwardR2CAxis0(long n0, long n1, const double* in, std::complex<double>* out) {
  manyR2C(static_cast<int>(n0), static_cast<int>(n1), static_cast<int>(n1), 1, 1, in, out);
}

void backwardC2RAxis0(long n0, long n1, std::complex<double>* in, double* out) {
  manyC2R(static_cast<int>(n0), static_cast<int>(n1), static_cast<int>(n1), 1, 1, in, out);
}

void forwardR2CAxis1(long n0, long n1, const double* in, std::complex<double>* out) {
  manyR2C(static_cast<int>(n1), static_cast<int>(n0), 1, static_cast<int>(n1),
          static_cast<int>(n1 / 2 + 1), in, out);
}

void backwardC2RAxis1(long n0, long n1, std::complex<double>* in, double* out) {
  manyC2R(static_cast<int>(n1), static_cast<int>(n0), 1, static_cast<int>(n1 / 2 + 1),
          static_cast<int>(n1), in, out);
}

void dst1Axis0(long n0, long n1, double* data) {
  manyDst1(static_cast<int>(n0), static_cast<int>(n1), static_cast<int>(n1), 1, data);
}

void dst1Axis1(long n0, long n1, double* data) {
  manyDst1(static_cast<int>(n1), static_cast<int>(n0), 1, static_cast<int>(n1), data);
}

}  // namespace homog::fft
