#pragma once

#include <cstdint>
#include <initializer_list>
#include <random>

namespace metainf {

// SplitMix64 finalizer. Used both as a hash and as the stream splitter.
constexpr std::uint64_t splitmix64(std::uint64_t z) noexcept {
  z += 0x9e3779b97f4a7c15ULL;
  z = (z ^ (z >> 30)) * 0xbf58476d1ce4e5b9ULL;
  z = (z ^ (z >> 27)) * 0x94d049bb133111ebULL;
  return z ^ (z >> 31);
}

// Sub-stream tags. A stream seed is derive_seed(parent, {tag, index...}).
enum class Stream : std::uint64_t {
  kCell = 1,       // (master, run seed)          -> cell seed
  kBestArms = 2,   // (cell)                      -> best-arm sequence
  kLosses = 3,     // (cell, episode)             -> loss matrix of one episode
  kPlays = 4,      // (cell, episode)             -> learner sampling
  kIdentify = 5,   // (cell, episode)             -> identification experiment
};

// Folds each component into the parent seed through splitmix64. Changing any
// component changes the whole stream; the order of components matters.
inline std::uint64_t derive_seed(std::uint64_t parent,
                                 std::initializer_list<std::uint64_t> parts) noexcept {
  std::uint64_t h = splitmix64(parent);
  for (std::uint64_t p : parts) h = splitmix64(h ^ splitmix64(p + 0x632be59bd9b4e019ULL));
  return h;
}

inline std::uint64_t derive_seed(std::uint64_t parent, Stream tag,
                                 std::uint64_t index = 0) noexcept {
  return derive_seed(parent, {static_cast<std::uint64_t>(tag), index});
}

// 64-bit Mersenne twister with a portable [0,1) conversion (53 random bits),
// so draws are identical across standard library implementations.
class Rng {
 public:
  explicit Rng(std::uint64_t seed) : engine_(seed) {}

  double uniform() noexcept {
    return static_cast<double>(engine_() >> 11) * 0x1.0p-53;
  }
  // Uniform on [lo, hi).
  double uniform(double lo, double hi) noexcept { return lo + (hi - lo) * uniform(); }

  std::uint64_t next() noexcept { return engine_(); }

 private:
  std::mt19937_64 engine_;
};

}  // namespace metainf
