#include "muskat/fft.hpp"

#include <fftw3.h>

#include <map>
#include <mutex>
#include <stdexcept>
#include <vector>

namespace muskat::fft {
namespace {

struct Plans {
  fftw_plan r2c = nullptr;
  fftw_plan c2r = nullptr;
};

// FFTW planning is not thread-safe; execution through the new-array interface
// is. Plans are created once per length and live for the whole process.
const Plans& plans_for(int n) {
  static std::mutex mutex;
  static std::map<int, Plans> cache;
  std::lock_guard lock(mutex);
  auto it = cache.find(n);
  if (it != cache.end()) return it->second;

  std::vector<double> real(static_cast<size_t>(n));
  std::vector<std::complex<double>> cplx(static_cast<size_t>(n / 2 + 1));
  auto* c = reinterpret_cast<fftw_complex*>(cplx.data());
  Plans p;
  const unsigned flags = FFTW_ESTIMATE | FFTW_UNALIGNED;
  p.r2c = fftw_plan_dft_r2c_1d(n, real.data(), c, flags);
  p.c2r = fftw_plan_dft_c2r_1d(n, c, real.data(), flags | FFTW_DESTROY_INPUT);
  if (p.r2c == nullptr || p.c2r == nullptr) throw std::runtime_error("FFTW planning failed");
  return cache.emplace(n, p).first->second;
}

}  // namespace

void forward(std::span<const double> values, std::span<std::complex<double>> coeffs) {
  const int n = static_cast<int>(values.size());
  if (coeffs.size() != static_cast<size_t>(n / 2 + 1))
    throw std::invalid_argument("fft::forward: coefficient span has wrong length");
  const Plans& p = plans_for(n);
  // r2c does not touch its input, but the FFTW signature is non-const.
  fftw_execute_dft_r2c(p.r2c, const_cast<double*>(values.data()),
                       reinterpret_cast<fftw_complex*>(coeffs.data()));
  const double scale = 1.0 / n;
  for (auto& c : coeffs) c *= scale;
}

void inverse(std::span<const std::complex<double>> coeffs, std::span<double> values) {
  const int n = static_cast<int>(values.size());
  if (coeffs.size() != static_cast<size_t>(n / 2 + 1))
    throw std::invalid_argument("fft::inverse: coefficient span has wrong length");
  const Plans& p = plans_for(n);
  thread_local std::vector<std::complex<double>> scratch;
  scratch.assign(coeffs.begin(), coeffs.end());
  fftw_execute_dft_c2r(p.c2r, reinterpret_cast<fftw_complex*>(scratch.data()), values.data());
}

}  // namespace muskat::fft
