#pragma once

#include <cstdint>
#include <initializer_list>
#include <random>
#include <span>
#include <utility>
#include <vector>

namespace imids {

/// splitmix64 finalizer; used to derive independent sub-stream seeds.
constexpr std::uint64_t mix64(std::uint64_t z) {
  z += 0x9e3779b97f4a7c15ULL;
  z = (z ^ (z >> 30)) * 0xbf58476d1ce4e5b9ULL;
  z = (z ^ (z >> 27)) * 0x94d049bb133111ebULL;
  return z ^ (z >> 31);
}

constexpr std::uint64_t derive_seed(std::uint64_t seed, std::initializer_list<std::uint64_t> tags) {
  std::uint64_t h = mix64(seed);
  for (std::uint64_t t : tags) h = mix64(h ^ mix64(t));
  return h;
}

/// Seeded generator with platform-independent sampling helpers. The
/// std:: distributions are implementation-defined, so traces would not be
/// reproducible across standard libraries if we used them.
class SeededRng {
 public:
  explicit SeededRng(std::uint64_t seed) : engine_(seed), seed_(seed) {}

  std::uint64_t seed() const { return seed_; }
  std::uint64_t next() { return engine_(); }

  /// Uniform in [0, 1) with 53 bits of resolution.
  double uniform() { return static_cast<double>(next() >> 11) * 0x1.0p-53; }

  double uniform(double lo, double hi) { return lo + (hi - lo) * uniform(); }

  /// Uniform integer in [0, n). n must be positive.
  std::uint64_t below(std::uint64_t n) {
    const std::uint64_t limit = (~std::uint64_t{0}) - (~std::uint64_t{0}) % n;
    std::uint64_t v;
    do {
      v = next();
    } while (v >= limit);
    return v % n;
  }

  bool bernoulli(double p) { return uniform() < p; }

  template <typename T>
  void shuffle(std::vector<T>& v) {
    for (std::size_t i = v.size(); i > 1; --i) {
      std::swap(v[i - 1], v[below(i)]);
    }
  }

  /// Independent child stream keyed by tags; the parent is not advanced.
  SeededRng fork(std::initializer_list<std::uint64_t> tags) const {
    return SeededRng(derive_seed(seed_, tags));
  }

 private:
  std::mt19937_64 engine_;
  std::uint64_t seed_;
};

// Stream tags so every consumer draws from its own sequence.
enum class Stream : std::uint64_t {
  Deploy = 1,
  Clusters = 2,
  Schedule = 3,
  Attack = 4,
  AttackerPick = 5,
  Itids = 6,
  Reconfig = 7,
};

inline SeededRng stream(std::uint64_t seed, Stream s, std::uint64_t a = 0, std::uint64_t b = 0) {
  return SeededRng(derive_seed(seed, {static_cast<std::uint64_t>(s), a, b}));
}

}  // namespace imids
