#pragma once

// Deterministic counter-based random number generation.
//
// Every sampling routine in the library takes an explicit 64-bit seed and
// derives draws as a pure function of (seed, domain tag, stream, counter).
// Per-entry draws use the packed pair index (or node index) as the stream,
// so results do not depend on iteration order or thread count, and distinct
// domains (adjacency, mask, pair subsets, latent positions, fitting) never
// share a stream even under equal seeds.

#include <cstdint>
#include <limits>

namespace netml {

// Domain-separation tags.  One per consumer of randomness.
namespace tag {
inline constexpr std::uint64_t adjacency = 0x41;  // edge indicators
inline constexpr std::uint64_t mask = 0x58;       // observation mask
inline constexpr std::uint64_t omega = 0x4F;      // held-out pair subset
inline constexpr std::uint64_t latent = 0x5A;     // latent positions
inline constexpr std::uint64_t fit = 0x46;        // local-search restarts
}  // namespace tag

// 64-bit finalizer (SplitMix64).  Bijective, well-mixed.
constexpr std::uint64_t mix64(std::uint64_t x) {
  x += 0x9e3779b97f4a7c15ull;
  x = (x ^ (x >> 30)) * 0xbf58476d1ce4e5b9ull;
  x = (x ^ (x >> 27)) * 0x94d049bb133111ebull;
  return x ^ (x >> 31);
}

// One pseudorandom word per (seed, domain, stream, counter) key.
constexpr std::uint64_t keyed_bits(std::uint64_t seed, std::uint64_t domain,
                                   std::uint64_t stream,
                                   std::uint64_t counter = 0) {
  std::uint64_t h = mix64(seed);
  h = mix64(h ^ domain);
  h = mix64(h ^ stream);
  h = mix64(h ^ counter);
  return h;
}

// Map a word to [0, 1) with 53 random bits.
constexpr double unit_double(std::uint64_t bits) {
  return static_cast<double>(bits >> 11) * 0x1.0p-53;
}

// Single uniform draw in [0, 1) for a fixed key.  The workhorse for
// one-draw-per-entry sampling (edges, mask cells, latent positions).
constexpr double keyed_uniform(std::uint64_t seed, std::uint64_t domain,
                               std::uint64_t stream,
                               std::uint64_t counter = 0) {
  return unit_double(keyed_bits(seed, domain, stream, counter));
}

// Sequential counter-based generator for consumers that need a stream of
// draws (shuffles, subset sampling, restart initialization).  Satisfies
// UniformRandomBitGenerator.
class CounterRng {
 public:
  using result_type = std::uint64_t;

  CounterRng(std::uint64_t seed, std::uint64_t domain, std::uint64_t stream)
      : seed_(seed), domain_(domain), stream_(stream) {}

  static constexpr result_type min() { return 0; }
  static constexpr result_type max() {
    return std::numeric_limits<result_type>::max();
  }

  result_type operator()() {
    return keyed_bits(seed_, domain_, stream_, counter_++);
  }

  double uniform() { return unit_double((*this)()); }

  // Unbiased integer in [0, bound) via bitmask rejection.  Deterministic:
  // rejections consume counter values in a fixed order.
  std::uint64_t below(std::uint64_t bound) {
    std::uint64_t mask = ~std::uint64_t{0};
    --bound;
    mask >>= __builtin_clzll(bound | 1);
    std::uint64_t v;
    do {
      v = (*this)() & mask;
    } while (v > bound);
    return v;
  }

 private:
  std::uint64_t seed_, domain_, stream_;
  std::uint64_t counter_ = 0;
};

// Fisher-Yates shuffle driven by a CounterRng (std::shuffle's draw pattern is
// implementation-defined; this one is pinned).
template <typename T, typename Rng>
void shuffle_sequence(T* data, std::size_t size, Rng& rng) {
  for (std::size_t i = size; i > 1; --i) {
    std::size_t j = static_cast<std::size_t>(rng.below(i));
    T tmp = data[i - 1];
    data[i - 1] = data[j];
    data[j] = tmp;
  }
}

}  // namespace netml
