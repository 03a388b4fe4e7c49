#pragma once

#include <cstdint>
#include <span>
#include <string_view>

namespace mecsfc {

// Deterministic splittable generator. Every stochastic draw in the project
// comes from a named substream derived from (seed, stream path), so adding a
// new draw site never perturbs the values produced by existing ones.
// Uniform doubles are built directly from the high 53 bits of a SplitMix64
// output to keep results identical across standard libraries and platforms.
class Rng {
public:
  explicit Rng(std::uint64_t seed) : state_(mix(seed ^ kPhi)) {}

  // Child generator for a named substream, e.g. stream("mu_radius", cell, k).
  Rng stream(std::string_view name, std::uint64_t a = 0, std::uint64_t b = 0) const {
    std::uint64_t h = state_;
    for (char c : name) {
      h = mix(h ^ static_cast<std::uint64_t>(static_cast<unsigned char>(c)));
    }
    h = mix(h ^ (a + kPhi));
    h = mix(h ^ (b + 2 * kPhi));
    return Rng(h, Raw{});
  }

  std::uint64_t next_u64() {
    state_ += kPhi;
    return mix(state_);
  }

  // [0, 1)
  double uniform() { return static_cast<double>(next_u64() >> 11) * 0x1.0p-53; }

  double uniform(double lo, double hi) { return lo + (hi - lo) * uniform(); }

  // Inclusive bounds.
  int uniform_int(int lo, int hi) {
    return lo + static_cast<int>(next_u64() % static_cast<std::uint64_t>(hi - lo + 1));
  }

  template <typename T>
  const T& pick(std::span<const T> options) {
    return options[static_cast<std::size_t>(next_u64() % options.size())];
  }

  // Index draw proportional to weights; weights need not be normalized.
  int pick_weighted(std::span<const double> weights) {
    double total = 0;
    for (double w : weights) total += w;
    const double u = uniform() * total;
    double acc = 0;
    for (std::size_t i = 0; i < weights.size(); ++i) {
      acc += weights[i];
      if (u < acc) return static_cast<int>(i);
    }
    return static_cast<int>(weights.size()) - 1;
  }

private:
  struct Raw {};
  Rng(std::uint64_t raw, Raw) : state_(raw) {}

  static constexpr std::uint64_t kPhi = 0x9e3779b97f4a7c15ull;

  static std::uint64_t mix(std::uint64_t z) {
    z ^= z >> 30;
    z *= 0xbf58476d1ce4e5b9ull;
    z ^= z >> 27;
    z *= 0x94d049bb133111ebull;
    z ^= z >> 31;
    return z;
  }

  std::uint64_t state_;
};

}  // namespace mecsfc
