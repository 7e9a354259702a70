#pragma once

#include <cstddef>
#include <initializer_list>
#include <string>
#include <vector>

#include "scatterkit/errors.hpp"

namespace scatterkit {

constexpr bool is_power_of_two(std::size_t n) { return n != 0 && (n & (n - 1)) == 0; }

constexpr int log2_exact(std::size_t n) {
  int r = 0;
  while (n > 1) {
    n >>= 1;
    ++r;
  }
  return r;
}

// Extents of a periodic grid with one or two axes, row-major. Every extent is
// a power of two; user-facing signals additionally need extents >= 4 (see
// require_input_grid), subsampled grids may shrink to a single sample.
class GridShape {
 public:
  GridShape() = default;

  GridShape(std::initializer_list<std::size_t> extents) : GridShape(std::vector<std::size_t>(extents)) {}

  explicit GridShape(std::vector<std::size_t> extents) : extents_(std::move(extents)) {
    if (extents_.empty() || extents_.size() > 2) {
      throw DimensionError("grid must have 1 or 2 axes, got " + std::to_string(extents_.size()));
    }
    for (std::size_t e : extents_) {
      if (!is_power_of_two(e)) {
        throw DimensionError("grid extent " + std::to_string(e) + " is not a power of two");
      }
    }
  }

  std::size_t ndims() const { return extents_.size(); }
  std::size_t extent(std::size_t axis) const { return extents_.at(axis); }
  const std::vector<std::size_t>& extents() const { return extents_; }

  std::size_t count() const {
    std::size_t n = extents_.empty() ? 0 : 1;
    for (std::size_t e : extents_) n *= e;
    return n;
  }

  std::size_t min_extent() const {
    std::size_t m = extents_.at(0);
    for (std::size_t e : extents_) m = e < m ? e : m;
    return m;
  }

  // Grid obtained by keeping every factor-th sample along each axis.
  GridShape subsampled(std::size_t factor) const {
    if (!is_power_of_two(factor)) {
      throw DimensionError("subsampling factor " + std::to_string(factor) + " is not a power of two");
    }
    std::vector<std::size_t> out;
    out.reserve(extents_.size());
    for (std::size_t e : extents_) {
      if (e % factor != 0) {
        throw DimensionError("subsampling factor " + std::to_string(factor) + " does not divide extent " +
                             std::to_string(e));
      }
      out.push_back(e / factor);
    }
    return GridShape(std::move(out));
  }

  std::string str() const {
    std::string s;
    for (std::size_t i = 0; i < extents_.size(); ++i) {
      if (i) s += "x";
      s += std::to_string(extents_[i]);
    }
    return s;
  }

  friend bool operator==(const GridShape&, const GridShape&) = default;

 private:
  std::vector<std::size_t> extents_;
};

inline void require_input_grid(const GridShape& shape) {
  for (std::size_t e : shape.extents()) {
    if (e < 4) throw DimensionError("input grid " + shape.str() + " has an axis shorter than 4");
  }
}

inline void require_same_shape(const GridShape& a, const GridShape& b, const char* what) {
  if (!(a == b)) throw DimensionError(std::string(what) + ": grid " + a.str() + " vs " + b.str());
}

// Signed frequency index of DFT bin i on an axis of length n: [-n/2, n/2).
inline long signed_bin(std::size_t i, std::size_t n) {
  if (n == 1) return 0;
  return i < n / 2 ? static_cast<long>(i) : static_cast<long>(i) - static_cast<long>(n);
}

inline std::size_t wrap_index(long i, std::size_t n) {
  long m = i % static_cast<long>(n);
  return static_cast<std::size_t>(m < 0 ? m + static_cast<long>(n) : m);
}

}  // namespace scatterkit
