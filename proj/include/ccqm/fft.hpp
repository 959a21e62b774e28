#pragma once

#include <complex>
#include <cstddef>
#include <span>
#include <vector>

namespace ccqm {

/// In-place multidimensional complex FFT (row-major), backed by FFTW.
///
/// Plans are created with FFTW_ESTIMATE so the same transform is chosen on
/// every run. Planning is serialized through a process-wide mutex; execution
/// is thread-safe. backward() is unnormalized.
class FftPlan {
 public:
  explicit FftPlan(std::span<const std::size_t> extents);
  ~FftPlan();
  FftPlan(const FftPlan&) = delete;
  FftPlan& operator=(const FftPlan&) = delete;
  FftPlan(FftPlan&& other) noexcept;
  FftPlan& operator=(FftPlan&& other) noexcept;

  std::size_t size() const noexcept { return size_; }
  void forward(std::span<std::complex<double>> data) const;
  void backward(std::span<std::complex<double>> data) const;

 private:
  void release() noexcept;

  void* forward_ = nullptr;
  void* backward_ = nullptr;
  std::size_t size_ = 0;
};

/// Angular wavenumbers (hbar = 1 momenta) of an FFT axis of n cells with spacing a.
std::vector<double> fft_momenta(std::size_t n, double a);

}  // namespace ccqm
