#pragma once

// Symbolic base: fair bit sources, finite words, word statistics.

#include <cmath>
#include <cstdint>
#include <functional>
#include <string>
#include <string_view>
#include <vector>

namespace invis {

/// SplitMix64 finalizer.
inline std::uint64_t mix64(std::uint64_t z) {
  z = (z ^ (z >> 30)) * 0xBF58476D1CE4E5B9ULL;
  z = (z ^ (z >> 27)) * 0x94D049BB133111EBULL;
  return z ^ (z >> 31);
}

/// Counter-based generator: word i of stream (seed, shard) is a pure function
/// of its arguments, so shards never overlap and any position is reachable.
struct CounterRng {
  static constexpr std::uint64_t kGamma = 0x9E3779B97F4A7C15ULL;

  static std::uint64_t key(std::uint64_t seed, std::uint64_t shard) {
    return mix64(seed ^ mix64((shard + 1) * kGamma));
  }
  static std::uint64_t word(std::uint64_t key, std::uint64_t index) {
    return mix64(key + (index + 1) * kGamma);
  }
};

/// Deterministic stream of fair independent bits.
class BitStream {
 public:
  BitStream() : BitStream(0, 0) {}
  explicit BitStream(std::uint64_t seed, std::uint64_t shard = 0)
      : seed_(seed), shard_(shard), key_(CounterRng::key(seed, shard)) {}

  std::uint64_t seed() const { return seed_; }
  std::uint64_t shard() const { return shard_; }
  /// Number of bits emitted so far.
  std::uint64_t cursor() const { return cursor_; }

  int next_bit() {
    if (buffered_ == 0) {
      buffer_ = CounterRng::word(key_, next_word_++);
      buffered_ = 64;
    }
    const int bit = static_cast<int>(buffer_ >> 63);
    buffer_ <<= 1;
    --buffered_;
    ++cursor_;
    return bit;
  }

  /// Next 64 bits, first-emitted bit in the most significant position.
  std::uint64_t next_bits64() {
    std::uint64_t w = 0;
    for (int i = 0; i < 64; ++i) w = (w << 1) | static_cast<std::uint64_t>(next_bit());
    return w;
  }

  /// Reposition so that the next bit emitted is bit number `position`.
  void seek(std::uint64_t position) {
    next_word_ = position / 64;
    buffered_ = 0;
    cursor_ = position;
    const int skip = static_cast<int>(position % 64);
    if (skip != 0) {
      buffer_ = CounterRng::word(key_, next_word_++) << skip;
      buffered_ = 64 - skip;
    }
  }

  /// Uniform double in [0, 1) from the next 53 bits.
  double next_uniform() {
    std::uint64_t w = 0;
    for (int i = 0; i < 53; ++i) w = (w << 1) | static_cast<std::uint64_t>(next_bit());
    return std::ldexp(static_cast<double>(w), -53);
  }

 private:
  std::uint64_t seed_;
  std::uint64_t shard_;
  std::uint64_t key_;
  std::uint64_t next_word_ = 0;
  std::uint64_t buffer_ = 0;
  int buffered_ = 0;
  std::uint64_t cursor_ = 0;
};

/// Finite window of a bi-infinite 0/1 sequence.
class BitWindow {
 public:
  BitWindow() = default;
  BitWindow(std::vector<std::uint8_t> bits, long long offset = 0);

  /// Parses a string of '0'/'1'; throws std::invalid_argument otherwise.
  static BitWindow parse(std::string_view text, long long offset = 0);
  static BitWindow from_stream(BitStream& stream, std::size_t length,
                               long long offset = 0);

  std::size_t size() const { return bits_.size(); }
  long long offset() const { return offset_; }
  int operator[](std::size_t i) const { return bits_[i]; }
  const std::vector<std::uint8_t>& bits() const { return bits_; }
  std::string str() const;

  /// Bits [first, first + count) packed with the earliest bit most significant.
  std::uint64_t packed(std::size_t first, int count) const;

  friend bool operator==(const BitWindow&, const BitWindow&) = default;

 private:
  std::vector<std::uint8_t> bits_;
  long long offset_ = 0;
};

/// Drops the leftmost bit. Throws std::out_of_range on a length-1 window.
BitWindow shift(const BitWindow& w);
BitWindow shift(const BitWindow& w, std::size_t k);

/// True iff the packed word (earliest bit most significant) has no "10".
inline bool packed_has_no_10(std::uint64_t word, int length) {
  if (length <= 1) return true;
  const std::uint64_t mask =
      length - 1 >= 64 ? ~0ULL : ((1ULL << (length - 1)) - 1);
  return ((word >> 1) & ~word & mask) == 0;
}

/// Membership in the set of length-2n words without "10" (0...01...1).
/// Throws std::invalid_argument unless the window has length 2n.
bool in_W(const BitWindow& w, int n);

/// Predicate on a packed word of the given length.
using WordPredicate = std::function<bool(std::uint64_t word, int length)>;

WordPredicate all_zero_predicate();
WordPredicate in_W_predicate();
WordPredicate always_true_predicate();

/// Commutative-monoid counter for window placements.
struct FrequencyCount {
  std::uint64_t hits = 0;
  std::uint64_t placements = 0;

  FrequencyCount& merge(const FrequencyCount& other) {
    hits += other.hits;
    placements += other.placements;
    return *this;
  }
  double frequency() const {
    return placements == 0 ? 0.0 : static_cast<double>(hits) / placements;
  }
  /// sqrt(p(1-p)/N); ignores the correlation of overlapping placements.
  double std_error() const {
    const double p = frequency();
    return placements == 0 ? 0.0 : std::sqrt(p * (1.0 - p) / placements);
  }
};

/// Empirical frequency over `placements` overlapping windows (slide by 1).
/// Requires window_len in [1, 64] and placements >= 10^4.
FrequencyCount word_frequency(BitStream& stream, const WordPredicate& predicate,
                              int window_len, std::uint64_t placements);

/// Same statistic over independent shards (seed, shard) run with OpenMP.
FrequencyCount word_frequency_sharded(std::uint64_t seed, int shards,
                                      const WordPredicate& predicate,
                                      int window_len, std::uint64_t placements);

/// Fate digit of an angular coordinate: 0 on [0, 1/2), 1 on [1/2, 1).
int fate_digit(double y);

}  // namespace invis
