#pragma once

#include <complex>
#include <string>
#include <vector>

#include "scatterkit/fft.hpp"
#include "scatterkit/grid.hpp"

namespace scatterkit {

using cplx = std::complex<double>;

enum class KernelKind { low_pass, band_pass };

inline const char* to_string(KernelKind k) { return k == KernelKind::low_pass ? "low_pass" : "band_pass"; }

inline KernelKind kernel_kind_from_string(const std::string& s) {
  if (s == "low_pass") return KernelKind::low_pass;
  if (s == "band_pass") return KernelKind::band_pass;
  throw DomainError("unknown kernel kind '" + s + "'");
}

// A filter stored by its DFT samples on a periodic grid. `scale` is j and
// `band` is the orientation (2D) or log-frequency bin (1D); low-pass kernels
// use band = -1.
struct FrequencyKernel {
  GridShape shape;
  std::vector<cplx> response;
  KernelKind kind = KernelKind::band_pass;
  int scale = 0;
  int band = -1;

  cplx dc() const { return response.at(0); }

  // Spatial samples h(u) = IDFT(h^)(u).
  std::vector<cplx> spatial() const { return fft::inverse_copy(response, shape); }

  double max_magnitude() const {
    double m = 0.0;
    for (const auto& v : response) m = std::max(m, std::abs(v));
    return m;
  }
};

}  // namespace scatterkit
