// Counter-based pseudo-random stream. Output depends only on (seed, stream,
// counter), so parallel and serial consumers of the same stream indices see
// identical draws on every platform.

#pragma once

#include <cstdint>

namespace tempord::rng {

inline std::uint64_t splitmix64(std::uint64_t x) {
  x += 0x9e3779b97f4a7c15ULL;
  x = (x ^ (x >> 30)) * 0xbf58476d1ce4e5b9ULL;
  x = (x ^ (x >> 27)) * 0x94d049bb133111ebULL;
  return x ^ (x >> 31);
}

class Stream {
 public:
  explicit Stream(std::uint64_t seed, std::uint64_t stream = 0)
      : base_(splitmix64(seed ^ splitmix64(stream + 0x6a09e667f3bcc909ULL))) {}

  std::uint64_t next_u64() { return splitmix64(base_ + 0x9e3779b97f4a7c15ULL * ++counter_); }

  // Uniform in [0, 1).
  double uniform() { return static_cast<double>(next_u64() >> 11) * 0x1.0p-53; }

  double uniform(double lo, double hi) { return lo + (hi - lo) * uniform(); }

  // Uniform integer in [0, n).
  std::uint64_t below(std::uint64_t n) { return next_u64() % n; }

 private:
  std::uint64_t base_;
  std::uint64_t counter_ = 0;
};

}  // namespace tempord::rng
