#pragma once

#include <fftw3.h>

#include <complex>
#include <map>
#include <mutex>
#include <span>
#include <utility>
#include <vector>

#include "scatterkit/grid.hpp"

namespace scatterkit::fft {

using cplx = std::complex<double>;

namespace detail {

// FFTW planning is not thread-safe, execution is. Plans are created once per
// (extents, direction) with FFTW_ESTIMATE | FFTW_UNALIGNED so the same plan
// runs on any caller-owned buffer and yields identical arithmetic.
class PlanCache {
 public:
  static PlanCache& instance() {
    static PlanCache cache;
    return cache;
  }

  fftw_plan get(const GridShape& shape, int sign) {
    std::lock_guard lock(mutex_);
    auto key = std::make_pair(shape.extents(), sign);
    auto it = plans_.find(key);
    if (it != plans_.end()) return it->second;
    std::vector<int> n(shape.extents().begin(), shape.extents().end());
    auto* buf = fftw_alloc_complex(shape.count());
    fftw_plan plan = fftw_plan_dft(static_cast<int>(n.size()), n.data(), buf, buf, sign,
                                   FFTW_ESTIMATE | FFTW_UNALIGNED);
    fftw_free(buf);
    plans_.emplace(std::move(key), plan);
    return plan;
  }

  PlanCache(const PlanCache&) = delete;
  PlanCache& operator=(const PlanCache&) = delete;

 private:
  PlanCache() = default;
  ~PlanCache() {
    for (auto& [key, plan] : plans_) fftw_destroy_plan(plan);
  }

  std::mutex mutex_;
  std::map<std::pair<std::vector<std::size_t>, int>, fftw_plan> plans_;
};

inline void execute(std::span<cplx> data, const GridShape& shape, int sign) {
  if (data.size() != shape.count()) throw DimensionError("fft buffer size does not match grid " + shape.str());
  if (data.size() == 1) return;
  auto* p = reinterpret_cast<fftw_complex*>(data.data());
  fftw_execute_dft(PlanCache::instance().get(shape, sign), p, p);
}

}  // namespace detail

// Unnormalized forward DFT, in place: X[k] = sum_u x[u] exp(-2 pi i k.u / n).
inline void forward(std::span<cplx> data, const GridShape& shape) { detail::execute(data, shape, FFTW_FORWARD); }

// Inverse DFT including the 1/N factor, in place.
inline void inverse(std::span<cplx> data, const GridShape& shape) {
  detail::execute(data, shape, FFTW_BACKWARD);
  const double scale = 1.0 / static_cast<double>(shape.count());
  for (auto& v : data) v *= scale;
}

inline std::vector<cplx> forward_copy(std::span<const cplx> data, const GridShape& shape) {
  std::vector<cplx> out(data.begin(), data.end());
  forward(out, shape);
  return out;
}

inline std::vector<cplx> inverse_copy(std::span<const cplx> data, const GridShape& shape) {
  std::vector<cplx> out(data.begin(), data.end());
  inverse(out, shape);
  return out;
}

}  // namespace scatterkit::fft
