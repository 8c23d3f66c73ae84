#pragma once

#include <cstdint>
#include <random>
#include <string_view>

namespace qmod {

// Named sub-streams split from one scenario seed.
//
// Stream seed = splitmix64(seed ^ fnv1a64(name)); the engine is std::mt19937_64,
// whose output sequence is fixed by the standard. Uniform reals are built from
// the top 53 bits by hand because std:: distributions are not portable across
// standard libraries.
//
// Stream names in use: "link/<index>" per configured link (index in config
// order), "workload", "fault", "jitter".
class RandomStream {
 public:
  RandomStream(std::uint64_t seed, std::string_view name);

  // Uniform in [0, 1).
  double uniform();
  // Uniform in [lo, hi).
  double uniform(double lo, double hi) { return lo + (hi - lo) * uniform(); }
  // Uniform integer in [0, n).
  std::uint64_t below(std::uint64_t n);
  bool bernoulli(double p) { return uniform() < p; }

  std::uint64_t draws() const { return draws_; }

 private:
  std::mt19937_64 engine_;
  std::uint64_t draws_ = 0;
};

std::uint64_t fnv1a64(std::string_view text);
std::uint64_t splitmix64(std::uint64_t x);

}  // namespace qmod
