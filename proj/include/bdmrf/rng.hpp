#pragma once

#include <cmath>
#include <cstdint>
#include <random>
#include <string_view>

namespace bdmrf {

inline std::uint64_t splitmix64(std::uint64_t& state) {
  state += 0x9e3779b97f4a7c15ULL;
  std::uint64_t z = state;
  z = (z ^ (z >> 30)) * 0xbf58476d1ce4e5b9ULL;
  z = (z ^ (z >> 27)) * 0x94d049bb133111ebULL;
  return z ^ (z >> 31);
}

inline std::uint64_t fnv1a64(std::string_view s) {
  std::uint64_t h = 0xcbf29ce484222325ULL;
  for (unsigned char c : s) {
    h ^= c;
    h *= 0x100000001b3ULL;
  }
  return h;
}

// Random stream with hand-pinned variate transforms. All draws consume
// mt19937_64 words through uniform(), so the byte sequence of any output is a
// pure function of the seed, independent of the standard library's
// distribution implementations.
class RandomStream {
 public:
  explicit RandomStream(std::uint64_t seed) : engine_(seed) {}

  // [0, 1)
  double uniform() {
    return static_cast<double>(engine_() >> 11) * 0x1.0p-53;
  }

  // standard normal via Box-Muller (sine branch discarded)
  double normal() {
    double u1 = uniform();
    double u2 = uniform();
    double r = std::sqrt(-2.0 * std::log1p(-u1));
    return r * std::cos(2.0 * M_PI * u2);
  }

  double exponential(double rate) {
    return -std::log1p(-uniform()) / rate;
  }

  std::uint64_t next_u64() { return engine_(); }

 private:
  std::mt19937_64 engine_;
};

// Named stream derivation: all randomness descends from one user seed via
// (component name, index), so any sub-computation can be re-run in isolation.
inline RandomStream derive_stream(std::uint64_t seed, std::string_view component,
                                  std::uint64_t index) {
  std::uint64_t state = seed ^ fnv1a64(component);
  std::uint64_t a = splitmix64(state);
  state ^= index * 0x9e3779b97f4a7c15ULL;
  std::uint64_t b = splitmix64(state);
  return RandomStream(a ^ (b + 0x632be59bd9b4e019ULL));
}

inline std::uint64_t derive_seed(std::uint64_t seed, std::string_view component,
                                 std::uint64_t index) {
  std::uint64_t state = seed ^ fnv1a64(component);
  std::uint64_t a = splitmix64(state);
  state ^= index * 0x9e3779b97f4a7c15ULL;
  return a ^ (splitmix64(state) + 0x632be59bd9b4e019ULL);
}

}  // namespace bdmrf
