#include "ccqm/fft.hpp"

#include <fftw3.h>

#include <mutex>
#include <numbers>
#include <stdexcept>
#include <utility>

namespace ccqm {

namespace {

std::mutex& planner_mutex() {
  static std::mutex m;
  return m;
}

}  // namespace

FftPlan::FftPlan(std::span<const std::size_t> extents) {
  std::vector<int> n(extents.size());
  size_ = 1;
  for (std::size_t i = 0; i < extents.size(); ++i) {
    n[i] = static_cast<int>(extents[i]);
    size_ *= extents[i];
  }
  std::lock_guard lock(planner_mutex());
  auto* buffer = fftw_alloc_complex(size_);
  const unsigned flags = FFTW_ESTIMATE | FFTW_UNALIGNED;
  forward_ = fftw_plan_dft(static_cast<int>(n.size()), n.data(), buffer, buffer, FFTW_FORWARD, flags);
  backward_ = fftw_plan_dft(static_cast<int>(n.size()), n.data(), buffer, buffer, FFTW_BACKWARD, flags);
  fftw_free(buffer);
  if (forward_ == nullptr || backward_ == nullptr) {
    release();
    throw std::runtime_error("FFTW planning failed");
  }
}

FftPlan::~FftPlan() { release(); }

FftPlan::FftPlan(FftPlan&& other) noexcept
    : forward_(std::exchange(other.forward_, nullptr)),
      backward_(std::exchange(other.backward_, nullptr)),
      size_(other.size_) {}

FftPlan& FftPlan::operator=(FftPlan&& other) noexcept {
  if (this != &other) {
    release();
    forward_ = std::exchange(other.forward_, nullptr);
    backward_ = std::exchange(other.backward_, nullptr);
    size_ = other.size_;
  }
  return *this;
}

void FftPlan::release() noexcept {
  if (forward_ == nullptr && backward_ == nullptr) return;
  std::lock_guard lock(planner_mutex());
  if (forward_ != nullptr) fftw_destroy_plan(static_cast<fftw_plan>(forward_));
  if (backward_ != nullptr) fftw_destroy_plan(static_cast<fftw_plan>(backward_));
  forward_ = backward_ = nullptr;
}

void FftPlan::forward(std::span<std::complex<double>> data) const {
  auto* p = reinterpret_cast<fftw_complex*>(data.data());
  fftw_execute_dft(static_cast<fftw_plan>(forward_), p, p);
}

void FftPlan::backward(std::span<std::complex<double>> data) const {
  auto* p = reinterpret_cast<fftw_complex*>(data.data());
  fftw_execute_dft(static_cast<fftw_plan>(backward_), p, p);
}

std::vector<double> fft_momenta(std::size_t n, double a) {
  std::vector<double> k(n);
  const double dk = 2.0 * std::numbers::pi / (static_cast<double>(n) * a);
  for (std::size_t j = 0; j < n; ++j) {
    const auto signed_j = (j < (n + 1) / 2) ? static_cast<double>(j)
                                            : static_cast<double>(j) - static_cast<double>(n);
    k[j] = signed_j * dk;
  }
  return k;
}

}  // namespace ccqm
