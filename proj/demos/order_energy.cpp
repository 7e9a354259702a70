// Share of scattering energy carried by each order for the bundled signals.

#include <cstdio>
#include <string>

#include "scatterkit/io.hpp"
#include "scatterkit/scattering.hpp"

using namespace scatterkit;

int main(int argc, char** argv) {
  const std::string data = argc > 1 ? argv[1] : SCATTERKIT_DATA_DIR;
  const int M = 3;
  for (const char* name : {"camera_128.pgm", "brick_64.pgm", "grass_64.pgm", "audio_4096.sig"}) {
    const Signal x = io::load_signal(data + "/" + name);
    const bool one_d = x.ndims() == 1;
    const auto bank = build_bank(x.shape(), one_d ? 8 : 4, one_d ? 12 : 8);
    const auto s = scatter(x, bank, {M, 1, Rho::modulus});
    double total = 0.0;
    for (double e : s.order_energy) total += e;
    std::printf("%-16s %6zu paths ", name, s.paths.size());
    for (int m = 0; m <= M; ++m) std::printf("  E%d %6.2f%%", m, 100.0 * s.order_energy[m] / total);
    std::printf("\n");
  }
  return 0;
}
