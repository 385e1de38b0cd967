#pragma once

#include <array>
#include <cstdint>
#include <limits>
#include <string_view>

namespace mixsat {

/// Philox4x32-10 block function (Salmon et al., SC'11). Pure: the same
/// (counter, key) always yields the same four output words.
std::array<std::uint32_t, 4> philox4x32_10(std::array<std::uint32_t, 4> counter,
                                           std::array<std::uint32_t, 2> key);

/// SplitMix64 finalizer; a bijective 64-bit mixer.
std::uint64_t mix64(std::uint64_t x);

/// Derive a child key from a parent key and a tag. Used to split
/// independent streams off a master seed.
std::uint64_t derive_key(std::uint64_t parent, std::uint64_t tag);
std::uint64_t derive_key(std::uint64_t parent, std::string_view tag);

// Stable 64-bit FNV-1a, for tags and config hashes.
std::uint64_t fnv1a64(std::string_view bytes);

/// Counter-based random stream. A stream is identified by (key, stream id);
/// the n-th draw is a pure function of (key, stream id, n), so any stream
/// can be re-created at any position and streams never share state.
///
/// Satisfies UniformRandomBitGenerator so it can drive std::shuffle.
class RandomStream {
 public:
  using result_type = std::uint64_t;

  explicit RandomStream(std::uint64_t key, std::uint64_t stream_id = 0);

  static constexpr result_type min() { return 0; }
  static constexpr result_type max() { return std::numeric_limits<result_type>::max(); }
  result_type operator()() { return next_u64(); }

  std::uint64_t next_u64();
  std::uint32_t next_u32();

  /// Uniform double in [0, 1) with 53 random bits.
  double uniform();
  /// Uniform double in (0, 1).
  double uniform_open();
  /// Unbiased integer in [0, bound). bound must be nonzero.
  std::uint64_t bounded(std::uint64_t bound);
  /// Bernoulli(p) via a fixed-point threshold on one 64-bit draw.
  bool bernoulli(double p);
  /// Standard normal variate (Box-Muller, both variates used).
  double normal();

  /// Independent child stream; does not advance this stream.
  RandomStream split(std::uint64_t tag) const;

  std::uint64_t key() const { return key_; }
  std::uint64_t stream_id() const { return stream_id_; }
  /// Number of 32-bit words consumed so far.
  std::uint64_t position() const { return block_ == 0 ? 0 : (block_ - 1) * 4 + index_; }

 private:
  void refill();

  std::uint64_t key_;
  std::uint64_t stream_id_;
  std::uint64_t block_ = 0;
  std::array<std::uint32_t, 4> buffer_{};
  unsigned index_ = 4;
  bool has_spare_normal_ = false;
  double spare_normal_ = 0.0;
};

}  // namespace mixsat
