#pragma once

// Thin FFTW wrapper. Plans are cached per thread and per resolution; the
// planner itself is serialized because FFTW planning is not thread-safe.

#include <complex>
#include <span>

namespace detmodes::detail {

class FftEngine {
 public:
  explicit FftEngine(int n);
  ~FftEngine();
  FftEngine(const FftEngine&) = delete;
  FftEngine& operator=(const FftEngine&) = delete;

  int n() const { return n_; }

  /// Unnormalized real-to-complex transform (FFTW sign convention e^{-i}).
  void forward(std::span<const double> in, std::span<std::complex<double>> out);
  /// Unnormalized complex-to-real transform; `in` is not modified.
  void backward(std::span<const std::complex<double>> in, std::span<double> out);

 private:
  int n_;
  double* real_ = nullptr;
  void* complex_ = nullptr;
  void* forward_plan_ = nullptr;
  void* backward_plan_ = nullptr;
};

/// Engine for resolution n owned by the calling thread.
FftEngine& fft_engine(int n);

}  // namespace detmodes::detail
