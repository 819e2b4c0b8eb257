#include "fft.hpp"

#include <fftw3.h>

#include <map>
#include <mutex>
#include <utility>
#include <vector>

#include "chg/errors.hpp"

namespace chg::fft {
namespace {

// FFTW planning is not thread-safe; execution with the new-array interface
// is. Plans are created once per (size, direction) and kept for the process.
class PlanCache {
 public:
  ~PlanCache() {
    for (auto& [key, plan] : plans_) fftw_destroy_plan(plan);
  }

  fftw_plan get(int n, Direction dir) {
    std::lock_guard lock(mutex_);
    const auto key = std::make_pair(n, dir == Direction::forward);
    if (auto it = plans_.find(key); it != plans_.end()) return it->second;
    std::vector<Complex> a(static_cast<std::size_t>(n)), b(static_cast<std::size_t>(n));
    fftw_plan plan = fftw_plan_dft_1d(
        n, reinterpret_cast<fftw_complex*>(a.data()), reinterpret_cast<fftw_complex*>(b.data()),
        dir == Direction::forward ? FFTW_FORWARD : FFTW_BACKWARD,
        FFTW_ESTIMATE | FFTW_UNALIGNED);
    plans_.emplace(key, plan);
    return plan;
  }

 private:
  std::mutex mutex_;
  std::map<std::pair<int, bool>, fftw_plan> plans_;
};

PlanCache& cache() {
  static PlanCache instance;
  return instance;
}

}  // namespace

void transform(std::span<const Complex> in, std::span<Complex> out, Direction dir) {
  if (in.size() != out.size() || in.empty()) throw InputError("fft: size mismatch");
  fftw_plan plan = cache().get(static_cast<int>(in.size()), dir);
  // FFTW takes a non-const input pointer but does not modify it for
  // out-of-place plans.
  fftw_execute_dft(plan, reinterpret_cast<fftw_complex*>(const_cast<Complex*>(in.data())),
                   reinterpret_cast<fftw_complex*>(out.data()));
}

}  // namespace chg::fft
