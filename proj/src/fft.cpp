#include "fft.hpp"

#include <fftw3.h>

#include <algorithm>
#include <map>
#include <memory>
#include <mutex>
#include <stdexcept>

namespace detmodes::detail {

namespace {

std::mutex& planner_mutex() {
  static std::mutex m;
  return m;
}

}  // namespace

FftEngine::FftEngine(int n) : n_(n) {
  const std::size_t nreal = static_cast<std::size_t>(n) * n * n;
  const std::size_t ncomplex = static_cast<std::size_t>(n) * n * (n / 2 + 1);
  std::lock_guard lock(planner_mutex());
  real_ = fftw_alloc_real(nreal);
  auto* cbuf = fftw_alloc_complex(ncomplex);
  complex_ = cbuf;
  if (real_ == nullptr || cbuf == nullptr) throw std::bad_alloc();
  // FFTW_ESTIMATE keeps plan selection, and therefore rounding, reproducible
  // from run to run.
  forward_plan_ = fftw_plan_dft_r2c_3d(n, n, n, real_, cbuf, FFTW_ESTIMATE);
  backward_plan_ = fftw_plan_dft_c2r_3d(n, n, n, cbuf, real_, FFTW_ESTIMATE);
  if (forward_plan_ == nullptr || backward_plan_ == nullptr) {
    throw std::runtime_error("FFTW plan creation failed");
  }
}

FftEngine::~FftEngine() {
  std::lock_guard lock(planner_mutex());
  fftw_destroy_plan(static_cast<fftw_plan>(forward_plan_));
  fftw_destroy_plan(static_cast<fftw_plan>(backward_plan_));
  fftw_free(real_);
  fftw_free(complex_);
}

void FftEngine::forward(std::span<const double> in, std::span<std::complex<double>> out) {
  auto* cbuf = static_cast<fftw_complex*>(complex_);
  std::copy(in.begin(), in.end(), real_);
  fftw_execute(static_cast<fftw_plan>(forward_plan_));
  const auto* src = reinterpret_cast<const std::complex<double>*>(cbuf);
  std::copy(src, src + out.size(), out.begin());
}

void FftEngine::backward(std::span<const std::complex<double>> in, std::span<double> out) {
  auto* cbuf = reinterpret_cast<std::complex<double>*>(complex_);
  std::copy(in.begin(), in.end(), cbuf);
  fftw_execute(static_cast<fftw_plan>(backward_plan_));
  std::copy(real_, real_ + out.size(), out.begin());
}

FftEngine& fft_engine(int n) {
  thread_local std::map<int, std::unique_ptr<FftEngine>> engines;
  auto& slot = engines[n];
  if (!slot) slot = std::make_unique<FftEngine>(n);
  return *slot;
}

}  // namespace detmodes::detail
