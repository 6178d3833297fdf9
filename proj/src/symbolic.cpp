#include "invis/symbolic.hpp"

#include <stdexcept>

#include <omp.h>

namespace invis {

BitWindow::BitWindow(std::vector<std::uint8_t> bits, long long offset)
    : bits_(std::move(bits)), offset_(offset) {
  if (bits_.empty()) throw std::invalid_argument("BitWindow must be nonempty");
  for (auto b : bits_)
    if (b > 1) throw std::invalid_argument("BitWindow holds only 0/1");
}

BitWindow BitWindow::parse(std::string_view text, long long offset) {
  std::vector<std::uint8_t> bits;
  bits.reserve(text.size());
  for (char c : text) {
    if (c != '0' && c != '1')
      throw std::invalid_argument("word must contain only '0' and '1'");
    bits.push_back(static_cast<std::uint8_t>(c - '0'));
  }
  return BitWindow(std::move(bits), offset);
}

BitWindow BitWindow::from_stream(BitStream& stream, std::size_t length,
                                 long long offset) {
  std::vector<std::uint8_t> bits(length);
  for (auto& b : bits) b = static_cast<std::uint8_t>(stream.next_bit());
  return BitWindow(std::move(bits), offset);
}

std::string BitWindow::str() const {
  std::string s;
  s.reserve(bits_.size());
  for (auto b : bits_) s.push_back(static_cast<char>('0' + b));
  return s;
}

std::uint64_t BitWindow::packed(std::size_t first, int count) const {
  if (count < 0 || count > 64 || first + count > bits_.size())
    throw std::out_of_range("BitWindow::packed: range outside window");
  std::uint64_t w = 0;
  for (int i = 0; i < count; ++i) w = (w << 1) | bits_[first + i];
  return w;
}

BitWindow shift(const BitWindow& w) {
  if (w.size() < 2) throw std::out_of_range("shift: window exhausted");
  std::vector<std::uint8_t> bits(w.bits().begin() + 1, w.bits().end());
  return BitWindow(std::move(bits), w.offset());
}

BitWindow shift(const BitWindow& w, std::size_t k) {
  if (k >= w.size()) throw std::out_of_range("shift: window exhausted");
  std::vector<std::uint8_t> bits(w.bits().begin() + static_cast<long>(k),
                                 w.bits().end());
  return BitWindow(std::move(bits), w.offset());
}

bool in_W(const BitWindow& w, int n) {
  if (n < 1 || w.size() != static_cast<std::size_t>(2 * n))
    throw std::invalid_argument("in_W: word length must be 2n");
  for (std::size_t i = 0; i + 1 < w.size(); ++i)
    if (w[i] == 1 && w[i + 1] == 0) return false;
  return true;
}

WordPredicate all_zero_predicate() {
  return [](std::uint64_t word, int) { return word == 0; };
}

WordPredicate in_W_predicate() {
  return [](std::uint64_t word, int length) {
    return packed_has_no_10(word, length);
  };
}

WordPredicate always_true_predicate() {
  return [](std::uint64_t, int) { return true; };
}

FrequencyCount word_frequency(BitStream& stream, const WordPredicate& predicate,
                              int window_len, std::uint64_t placements) {
  if (window_len < 1 || window_len > 64)
    throw std::invalid_argument("word_frequency: window length must be in [1, 64]");
  if (placements < 10000)
    throw std::invalid_argument("word_frequency: need at least 10^4 placements");
  const std::uint64_t mask =
      window_len == 64 ? ~0ULL : ((1ULL << window_len) - 1);
  std::uint64_t w = 0;
  for (int i = 0; i < window_len - 1; ++i)
    w = (w << 1) | static_cast<std::uint64_t>(stream.next_bit());
  FrequencyCount count;
  for (std::uint64_t k = 0; k < placements; ++k) {
    w = ((w << 1) | static_cast<std::uint64_t>(stream.next_bit())) & mask;
    if (predicate(w, window_len)) ++count.hits;
  }
  count.placements = placements;
  return count;
}

FrequencyCount word_frequency_sharded(std::uint64_t seed, int shards,
                                      const WordPredicate& predicate,
                                      int window_len, std::uint64_t placements) {
  if (shards < 1) throw std::invalid_argument("word_frequency_sharded: shards >= 1");
  std::vector<FrequencyCount> parts(shards);
  const std::uint64_t per = placements / shards;
  const std::uint64_t extra = placements % shards;
  // Validate once up front so no exception escapes the parallel region.
  if (per < 10000)
    throw std::invalid_argument("word_frequency_sharded: each shard needs >= 10^4 placements");
  if (window_len < 1 || window_len > 64)
    throw std::invalid_argument("word_frequency: window length must be in [1, 64]");
#pragma omp parallel for schedule(dynamic, 1)
  for (int s = 0; s < shards; ++s) {
    BitStream stream(seed, static_cast<std::uint64_t>(s));
    parts[s] = word_frequency(stream, predicate, window_len,
                              per + (static_cast<std::uint64_t>(s) < extra ? 1 : 0));
  }
  FrequencyCount total;
  for (const auto& p : parts) total.merge(p);
  return total;
}

int fate_digit(double y) {
  if (!(y >= 0.0 && y < 1.0)) throw std::domain_error("fate_digit: y must be in [0, 1)");
  return y < 0.5 ? 0 : 1;
}

}  // namespace invis
