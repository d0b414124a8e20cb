#pragma once

#include <cmath>
#include <cstddef>
#include <cstdint>
#include <numbers>
#include <vector>

#include "adiabatic/nstate.hpp"

namespace adiabatic::lab {

/// Counter-based SplitMix64 stream: draw i (i = 0, 1, ...) is
/// mix(seed + (i + 1) * 0x9E3779B97F4A7C15), so any implementation with
/// 64-bit wrapping arithmetic reproduces the same sequence.
class SplitMix64 {
public:
  explicit SplitMix64(std::uint64_t seed) : seed_(seed) {}

  std::uint64_t next() { return mix(seed_ + (++counter_) * 0x9E3779B97F4A7C15ULL); }

  /// Uniform in [0, 1) with 53 random bits.
  double uniform() { return static_cast<double>(next() >> 11) * 0x1.0p-53; }

  /// Standard normal by Box-Muller, one value per two uniforms (cosine branch).
  double gaussian() {
    const double u1 = 1.0 - uniform();  // (0, 1]
    const double u2 = uniform();
    return std::sqrt(-2.0 * std::log(u1)) * std::cos(2.0 * std::numbers::pi * u2);
  }

  static std::uint64_t mix(std::uint64_t z) {
    z = (z ^ (z >> 30)) * 0xBF58476D1CE4E5B9ULL;
    z = (z ^ (z >> 27)) * 0x94D049BB133111EBULL;
    return z ^ (z >> 31);
  }

private:
  std::uint64_t seed_;
  std::uint64_t counter_ = 0;
};

struct RandomModelSpec {
  std::uint64_t seed = 0;
  std::size_t levels = 4;
  double gap = 1.0;     // minimum spacing between consecutive unperturbed levels
  double vscale = 1.0;  // scale of the perturbation entries
  double x = 0.05;
  double eps = 0.1;
};

struct RandomModelData {
  std::vector<double> energies;
  std::vector<double> v_real;  // row-major
  std::vector<double> v_imag;
};

/// Draw order: energies first (E_0 = 0, E_k = E_{k-1} + gap (1 + U)), then
/// for each i <= j in row-major order a real Gaussian, followed by an
/// imaginary Gaussian when i < j. Diagonal entries are vscale * G;
/// off-diagonal entries are vscale * (G_re + i G_im) / sqrt(2).
inline RandomModelData random_model_data(const RandomModelSpec& spec) {
  SplitMix64 rng(spec.seed);
  const std::size_t n = spec.levels;
  RandomModelData out;
  out.energies.resize(n);
  for (std::size_t k = 1; k < n; ++k) out.energies[k] = out.energies[k - 1] + spec.gap * (1.0 + rng.uniform());
  out.v_real.assign(n * n, 0.0);
  out.v_imag.assign(n * n, 0.0);
  for (std::size_t i = 0; i < n; ++i) {
    for (std::size_t j = i; j < n; ++j) {
      if (i == j) {
        out.v_real[i * n + i] = spec.vscale * rng.gaussian();
      } else {
        const double re = spec.vscale * rng.gaussian() / std::numbers::sqrt2;
        const double im = spec.vscale * rng.gaussian() / std::numbers::sqrt2;
        out.v_real[i * n + j] = re;
        out.v_imag[i * n + j] = im;
        out.v_real[j * n + i] = re;
        out.v_imag[j * n + i] = -im;
      }
    }
  }
  return out;
}

inline nstate::NStateModel random_model(const RandomModelSpec& spec) {
  const auto d = random_model_data(spec);
  return {d.energies, numkit::HermitianMatrix::from_parts(spec.levels, d.v_real, d.v_imag), spec.x, spec.eps};
}

}  // namespace adiabatic::lab
