#ifndef GAUSSRD_RNG_HPP
#define GAUSSRD_RNG_HPP

#include <cmath>
#include <cstdint>

namespace gaussrd {

// Counter-based generator: every variate is a pure function of
// (seed, sample index, dimension), so parallel chunking cannot change
// the stream. Three splitmix64 rounds give full avalanche per key.
class CounterRng {
 public:
  explicit CounterRng(std::uint64_t seed) : seed_(seed) {}

  // Uniform in (0, 1).
  double uniform(std::uint64_t sample, std::uint64_t dim) const {
    std::uint64_t h = mix(mix(mix(seed_ + kGamma) ^ spread(sample)) ^
                          spread(dim + 0x9e3779b97f4a7c15ULL));
    return (static_cast<double>(h >> 11) + 0.5) * 0x1.0p-53;
  }

  // Standard normal via Box-Muller; dimension d consumes uniform
  // dimensions 2d and 2d+1.
  double normal(std::uint64_t sample, std::uint64_t dim) const {
    double u1 = uniform(sample, 2 * dim);
    double u2 = uniform(sample, 2 * dim + 1);
    return std::sqrt(-2.0 * std::log(u1)) *
           std::cos(2.0 * Pi() * u2);
  }

 private:
  static constexpr double Pi() { return 3.141592653589793238462643383279502884; }
  static constexpr std::uint64_t kGamma = 0x9e3779b97f4a7c15ULL;

  static std::uint64_t spread(std::uint64_t x) { return x * kGamma + 1; }

  static std::uint64_t mix(std::uint64_t z) {
    z += kGamma;
    z = (z ^ (z >> 30)) * 0xbf58476d1ce4e5b9ULL;
    z = (z ^ (z >> 27)) * 0x94d049bb133111ebULL;
    return z ^ (z >> 31);
  }

  std::uint64_t seed_;
};

}  // namespace gaussrd

#endif  // GAUSSRD_RNG_HPP
