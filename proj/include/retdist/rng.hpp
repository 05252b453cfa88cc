#pragma once

#include <cstdint>
#include <random>

namespace retdist {

// Reproducible RNG stream: identical (seed, stream) replays the identical
// draw sequence. Stream ids are mixed into the seed with SplitMix64 so
// parallel workers can own streams 0..n-1 under one master seed without
// overlapping sequences.
class RngStream {
 public:
  explicit RngStream(std::uint64_t seed, std::uint64_t stream = 0);

  double uniform();                    // U[0,1)
  double uniform(double a, double b);  // U[a,b)
  double normal();                     // N(0,1)
  double gamma(double shape, double scale);
  double chi_squared(double dof);      // Gamma(dof/2, 2)
  int uniform_int(int lo, int hi);     // inclusive bounds

  std::uint64_t seed() const { return seed_; }
  std::uint64_t stream() const { return stream_; }
  std::mt19937_64& engine() { return engine_; }

 private:
  std::uint64_t seed_;
  std::uint64_t stream_;
  std::mt19937_64 engine_;
  std::normal_distribution<double> normal_{0.0, 1.0};
};

}  // namespace retdist
