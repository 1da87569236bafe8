#include "hbid/fft.hpp"

#include <fftw3.h>

#include <map>
#include <mutex>
#include <utility>

#include "hbid/error.hpp"

namespace hbid::fft {
namespace {

enum class PlanKind { kForward, kDct2 };

// FFTW planning is not thread-safe; execution with the new-array interface is.
// FFTW_ESTIMATE keeps the chosen algorithm (and thus the rounding) stable across runs.
class PlanCache {
 public:
  ~PlanCache() {
    for (auto& [key, plan] : plans_) fftw_destroy_plan(plan);
  }

  fftw_plan get(PlanKind kind, int n) {
    std::lock_guard<std::mutex> lock(mutex_);
    auto key = std::make_pair(kind, n);
    if (auto it = plans_.find(key); it != plans_.end()) return it->second;

    constexpr unsigned kFlags = FFTW_ESTIMATE | FFTW_UNALIGNED | FFTW_PRESERVE_INPUT;
    fftw_plan plan = nullptr;
    if (kind == PlanKind::kForward) {
      auto* in = fftw_alloc_complex(static_cast<size_t>(n));
      auto* out = fftw_alloc_complex(static_cast<size_t>(n));
      plan = fftw_plan_dft_1d(n, in, out, FFTW_FORWARD, kFlags);
      fftw_free(in);
      fftw_free(out);
    } else {
      auto* in = fftw_alloc_real(static_cast<size_t>(n));
      auto* out = fftw_alloc_real(static_cast<size_t>(n));
      plan = fftw_plan_r2r_1d(n, in, out, FFTW_REDFT10, kFlags);
      fftw_free(in);
      fftw_free(out);
    }
    if (plan == nullptr) throw Error(ErrorCode::InvalidArgument, "FFTW planning failed");
    plans_.emplace(key, plan);
    return plan;
  }

 private:
  std::mutex mutex_;
  std::map<std::pair<PlanKind, int>, fftw_plan> plans_;
};

PlanCache& cache() {
  static PlanCache instance;
  return instance;
}

}  // namespace

void forward(std::span<const std::complex<double>> in, std::span<std::complex<double>> out) {
  if (in.empty()) throw Error(ErrorCode::EmptyInput, "fft::forward on empty input");
  if (in.size() != out.size()) throw Error(ErrorCode::DimensionMismatch, "fft::forward size mismatch");
  const int n = static_cast<int>(in.size());
  fftw_plan plan = cache().get(PlanKind::kForward, n);
  // std::complex<double> is layout-compatible with fftw_complex.
  fftw_execute_dft(plan,
                   reinterpret_cast<fftw_complex*>(const_cast<std::complex<double>*>(in.data())),
                   reinterpret_cast<fftw_complex*>(out.data()));
}

void dct2(std::span<const double> in, std::span<double> out) {
  if (in.empty()) throw Error(ErrorCode::EmptyInput, "dct2 on empty input");
  if (in.size() != out.size()) throw Error(ErrorCode::DimensionMismatch, "dct2 size mismatch");
  const int n = static_cast<int>(in.size());
  fftw_plan plan = cache().get(PlanKind::kDct2, n);
  fftw_execute_r2r(plan, const_cast<double*>(in.data()), out.data());
  // FFTW's REDFT10 carries a factor of 2.
  for (double& v : out) v *= 0.5;
}

}  // namespace hbid::fft
