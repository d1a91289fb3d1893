#pragma once

#include <cstdint>

namespace ulyap {

/// SplitMix64 finalizer (Steele, Lea & Flood). Used as a counter-based
/// generator: the k-th output of a stream is mix64(key + (k + 1) * golden).
inline constexpr std::uint64_t mix64(std::uint64_t z) {
  z = (z ^ (z >> 30)) * 0xbf58476d1ce4e5b9ULL;
  z = (z ^ (z >> 27)) * 0x94d049bb133111ebULL;
  return z ^ (z >> 31);
}

inline constexpr std::uint64_t golden_gamma = 0x9e3779b97f4a7c15ULL;

/// Seed of the index-th member of a family rooted at seed; index 0 returns seed itself.
inline constexpr std::uint64_t derive_seed(std::uint64_t seed, std::uint64_t index) {
  return seed + index * golden_gamma;
}

/// Uniform double in [0, 1) from the top 53 bits.
inline constexpr double to_unit(std::uint64_t bits) { return static_cast<double>(bits >> 11) * 0x1.0p-53; }

enum class StreamMode { independent, dimer };

/// Reproducible source of the uniforms behind one realization omega.
///
/// The uniform at a given (seed, realization, position) never changes, and
/// positions can be read in any order. In dimer mode sites 2k and 2k+1 share
/// draw k, so the phases come in identical adjacent pairs.
class RealizationStream {
 public:
  RealizationStream(std::uint64_t seed, std::uint64_t index, StreamMode mode = StreamMode::independent)
      : seed_(seed), index_(index), mode_(mode), key_(mix64(seed ^ mix64(index + 0x632be59bd9b4e019ULL))) {}

  std::uint64_t seed() const { return seed_; }
  std::uint64_t index() const { return index_; }
  StreamMode mode() const { return mode_; }

  /// k-th raw uniform of this realization.
  double draw(std::uint64_t k) const { return to_unit(mix64(key_ + (k + 1) * golden_gamma)); }

  /// Uniform behind the phase theta_site.
  double site_uniform(std::uint64_t site) const {
    return draw(mode_ == StreamMode::dimer ? site / 2 : site);
  }

 private:
  std::uint64_t seed_;
  std::uint64_t index_;
  StreamMode mode_;
  std::uint64_t key_;
};

}  // namespace ulyap
