#include "retdist/rng.hpp"

#include <stdexcept>

namespace retdist {

namespace {

// SplitMix64 finalizer; decorrelates nearby (seed, stream) pairs.
std::uint64_t splitmix64(std::uint64_t z) {
  z += 0x9E3779B97F4A7C15ull;
  z = (z ^ (z >> 30)) * 0xBF58476D1CE4E5B9ull;
  z = (z ^ (z >> 27)) * 0x94D049BB133111EBull;
  return z ^ (z >> 31);
}

}  // namespace

RngStream::RngStream(std::uint64_t seed, std::uint64_t stream)
    : seed_(seed), stream_(stream), engine_(splitmix64(splitmix64(seed) ^ splitmix64(~stream))) {}

double RngStream::uniform() {
  return std::uniform_real_distribution<double>(0.0, 1.0)(engine_);
}

double RngStream::uniform(double a, double b) {
  if (!(a < b)) throw std::invalid_argument("RngStream::uniform: need a < b");
  return std::uniform_real_distribution<double>(a, b)(engine_);
}

double RngStream::normal() { return normal_(engine_); }

double RngStream::gamma(double shape, double scale) {
  if (!(shape > 0.0) || !(scale > 0.0)) {
    throw std::invalid_argument("RngStream::gamma: shape and scale must be positive");
  }
  return std::gamma_distribution<double>(shape, scale)(engine_);
}

double RngStream::chi_squared(double dof) { return gamma(0.5 * dof, 2.0); }

int RngStream::uniform_int(int lo, int hi) {
  if (lo > hi) throw std::invalid_argument("RngStream::uniform_int: empty range");
  return std::uniform_int_distribution<int>(lo, hi)(engine_);
}

}  // namespace retdist
