// Seed derivation and Gaussian draw streams.
//
// Every stochastic operation takes an explicit master seed; per-replicate seeds
// are derived with splitmix64 so results are reproducible and independent of
// how replicates are distributed across workers.
#pragma once

#include <cstdint>
#include <random>

namespace hmq {

inline std::uint64_t splitmix64(std::uint64_t& state) {
  std::uint64_t z = (state += 0x9E3779B97F4A7C15ull);
  z = (z ^ (z >> 30)) * 0xBF58476D1CE4E5B9ull;
  z = (z ^ (z >> 27)) * 0x94D049BB133111EBull;
  return z ^ (z >> 31);
}

// Seed for the i-th replicate of a run; stable under any worker partition.
inline std::uint64_t derive_seed(std::uint64_t master, std::uint64_t index) {
  std::uint64_t s = master + (index + 1) * 0x9E3779B97F4A7C15ull;
  return splitmix64(s);
}

// Stream of standard normal draws. The only source of Gaussian randomness in
// the library, so mirrored-stream tests can wrap it.
class NormalStream {
 public:
  explicit NormalStream(std::uint64_t seed) : gen_(seed) {}
  double operator()() { return dist_(gen_); }

 private:
  std::mt19937_64 gen_;
  std::normal_distribution<double> dist_{0.0, 1.0};
};

}  // namespace hmq
