#include "invis/solenoid.hpp"

#include <stdexcept>

namespace invis {

void SolenoidParams::validate() const {
  if (!(lambda > 0.0 && lambda < 0.1))
    throw std::domain_error("solenoid: lambda must lie in (0, 0.1)");
  if (!(R >= 2.0)) throw std::domain_error("solenoid: R must be >= 2");
  if (!(1.0 + lambda * R < R))
    throw std::domain_error("solenoid: need 1 + lambda R < R");
}

BitQueue BitQueue::from_stream(BitStream stream) {
  BitQueue q;
  q.source_ = Source::Stream;
  q.stream_ = stream;
  q.fill();
  return q;
}

BitQueue BitQueue::periodic(std::string_view pattern) {
  if (pattern.empty()) throw std::invalid_argument("periodic: empty pattern");
  BitQueue q;
  q.source_ = Source::Periodic;
  for (char c : pattern) {
    if (c != '0' && c != '1') throw std::invalid_argument("periodic: pattern must be 0/1");
    q.pattern_.push_back(static_cast<std::uint8_t>(c - '0'));
  }
  q.fill();
  return q;
}

BitQueue BitQueue::with_prefix(const std::vector<std::uint8_t>& prefix,
                               BitQueue continuation) {
  BitQueue q = std::move(continuation);
  for (auto it = prefix.rbegin(); it != prefix.rend(); ++it) q.push_front(*it);
  return q;
}

bool BitQueue::pull(int& bit) {
  if (!pending_.empty()) {
    bit = pending_.front();
    pending_.pop_front();
    return true;
  }
  switch (source_) {
    case Source::Stream:
      bit = stream_.next_bit();
      return true;
    case Source::Periodic:
      bit = pattern_[phase_];
      phase_ = (phase_ + 1) % pattern_.size();
      return true;
    case Source::None:
      return false;
  }
  return false;
}

void BitQueue::fill() {
  int bit = 0;
  while (valid_ < 64 && pull(bit)) {
    window_ |= static_cast<std::uint64_t>(bit) << (63 - valid_);
    ++valid_;
  }
}

int BitQueue::pop() {
  const int bit = front();
  window_ <<= 1;
  --valid_;
  int next = 0;
  if (pull(next)) {
    window_ |= static_cast<std::uint64_t>(next);
    ++valid_;
  }
  return bit;
}

void BitQueue::push_front(int bit) {
  if (valid_ == 64) pending_.push_front(static_cast<std::uint8_t>(window_ & 1ULL));
  else ++valid_;
  window_ = (window_ >> 1) | (static_cast<std::uint64_t>(bit & 1) << 63);
}

SolenoidPoint::SolenoidPoint(BitQueue bits, std::complex<double> z)
    : bits_(std::move(bits)), z_(z) {
  refresh_y();
}

SolenoidPoint SolenoidPoint::from_stream(BitStream stream, std::complex<double> z) {
  return SolenoidPoint(BitQueue::from_stream(stream), z);
}

SolenoidPoint SolenoidPoint::from_real(double y, std::complex<double> z) {
  if (!(y >= 0.0 && y < 1.0)) throw std::domain_error("from_real: y must be in [0, 1)");
  std::vector<std::uint8_t> digits;
  while (y != 0.0) {
    y *= 2.0;
    const int d = y >= 1.0 ? 1 : 0;
    if (d) y -= 1.0;
    digits.push_back(static_cast<std::uint8_t>(d));
  }
  return SolenoidPoint(BitQueue::with_prefix(digits, BitQueue::periodic("0")), z);
}

void SolenoidPoint::retreat(int past_bit, const SolenoidParams& params) {
  const std::uint64_t w = bits_.window();
  const std::uint64_t shifted = (w >> 1) | (static_cast<std::uint64_t>(past_bit & 1) << 63);
  const double y_prev = std::ldexp(static_cast<double>(shifted), -64);
  const double ang = kTwoPi * y_prev;
  const std::complex<double> d = z_ - std::complex<double>(std::cos(ang), std::sin(ang));
  if (std::abs(d) > params.lambda * params.R * (1.0 + 1e-12))
    throw std::domain_error("h_inverse_step: branch mismatch, z has no preimage in the disc");
  bits_.push_front(past_bit);
  z_ = d / params.lambda;
  refresh_y();
}

SolenoidPoint h_step(SolenoidPoint p, const SolenoidParams& params) {
  p.advance(params);
  return p;
}

SolenoidPoint h_inverse_step(SolenoidPoint p, int past_bit,
                             const SolenoidParams& params) {
  p.retreat(past_bit, params);
  return p;
}

BitWindow fate_forward(const SolenoidPoint& p, std::size_t k) {
  if (k == 0) throw std::invalid_argument("fate_forward: k >= 1");
  std::vector<std::uint8_t> bits(k);
  const std::uint64_t w = p.prefix64();
  if (k <= 64 && static_cast<int>(k) <= p.bits().valid()) {
    for (std::size_t i = 0; i < k; ++i) bits[i] = static_cast<std::uint8_t>((w >> (63 - i)) & 1ULL);
    return BitWindow(std::move(bits));
  }
  BitQueue q = p.bits();
  for (std::size_t i = 0; i < k; ++i) {
    if (q.valid() == 0) throw std::runtime_error("fate_forward: digit queue exhausted");
    bits[i] = static_cast<std::uint8_t>(q.pop());
  }
  return BitWindow(std::move(bits));
}

std::pair<SolenoidPoint, SolenoidPoint> special_points(const SolenoidParams& params) {
  params.validate();
  const double lam = params.lambda;
  SolenoidPoint b0(BitQueue::periodic("0"), {1.0 / (1.0 - lam), 0.0});
  const std::complex<double> e1 = std::polar(1.0, kTwoPi / 3.0);
  const std::complex<double> e2 = std::polar(1.0, 2.0 * kTwoPi / 3.0);
  SolenoidPoint b1(BitQueue::periodic("01"), (e2 + lam * e1) / (1.0 - lam * lam));
  return {b0, b1};
}

}  // namespace invis
