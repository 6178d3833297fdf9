#pragma once

// Solenoid map h(y, z) = (2y, exp(2 pi i y) + lambda z) on the solid torus,
// with the angular coordinate carried exactly as a queue of binary digits.

#include <cmath>
#include <complex>
#include <cstdint>
#include <deque>
#include <stdexcept>
#include <string_view>
#include <utility>
#include <vector>

#include "invis/symbolic.hpp"

namespace invis {

inline constexpr double kTwoPi = 6.283185307179586476925286766559;

struct SolenoidParams {
  double lambda = 0.05;
  double R = 2.0;

  /// Throws std::domain_error unless 0 < lambda < 0.1, R >= 2, 1 + lambda R < R.
  void validate() const;
};

/// Binary digits of y, current digit first. The 64 upcoming digits live in a
/// register; later digits come from pushed-back bits, then from the source.
class BitQueue {
 public:
  BitQueue() = default;

  static BitQueue from_stream(BitStream stream);
  /// Repeats `pattern` forever, e.g. "0" or "01".
  static BitQueue periodic(std::string_view pattern);
  /// Explicit digits followed by `continuation` (which may be empty).
  static BitQueue with_prefix(const std::vector<std::uint8_t>& prefix,
                              BitQueue continuation);

  /// Upcoming digits, current digit in the most significant bit.
  std::uint64_t window() const { return window_; }
  /// Valid digits in the register (64 unless the queue is running dry).
  int valid() const { return valid_; }
  int front() const { return static_cast<int>(window_ >> 63); }

  int pop();
  void push_front(int bit);

 private:
  enum class Source { None, Stream, Periodic };
  bool pull(int& bit);
  void fill();

  std::uint64_t window_ = 0;
  int valid_ = 0;
  std::deque<std::uint8_t> pending_;
  Source source_ = Source::None;
  BitStream stream_;
  std::vector<std::uint8_t> pattern_;
  std::size_t phase_ = 0;
};

/// Base point (y, z) with y held as exact digits.
class SolenoidPoint {
 public:
  SolenoidPoint() = default;
  SolenoidPoint(BitQueue bits, std::complex<double> z);

  static SolenoidPoint from_stream(BitStream stream, std::complex<double> z = {});
  /// Exact binary expansion of the double y in [0, 1), then zeros.
  static SolenoidPoint from_real(double y, std::complex<double> z = {});

  /// Double nearest to the value of the next 64 digits.
  double y() const { return y_; }
  std::uint64_t prefix64() const { return bits_.window(); }
  int digit() const { return bits_.front(); }
  std::complex<double> z() const { return z_; }
  const BitQueue& bits() const { return bits_; }
  void set_z(std::complex<double> z) { z_ = z; }

  /// In-place h; returns the digit popped off y. Throws std::runtime_error
  /// once the queue holds no digits.
  int advance(const SolenoidParams& params) {
    if (bits_.valid() == 0)
      throw std::runtime_error("solenoid point: digit queue exhausted, attach a BitStream continuation");
    const double ang = kTwoPi * y_;
    z_ = std::complex<double>(std::cos(ang) + params.lambda * z_.real(),
                              std::sin(ang) + params.lambda * z_.imag());
    const int bit = bits_.pop();
    refresh_y();
    return bit;
  }

  /// In-place inverse branch y' = (y + past_bit) / 2. Throws std::domain_error
  /// when z has no preimage in the disc on that branch.
  void retreat(int past_bit, const SolenoidParams& params);

 private:
  void refresh_y() { y_ = std::ldexp(static_cast<double>(bits_.window()), -64); }

  BitQueue bits_;
  std::complex<double> z_{};
  double y_ = 0.0;
};

SolenoidPoint h_step(SolenoidPoint p, const SolenoidParams& params);
SolenoidPoint h_inverse_step(SolenoidPoint p, int past_bit,
                             const SolenoidParams& params);

/// First k fate digits (omega_0 ... omega_{k-1}); k >= 1.
BitWindow fate_forward(const SolenoidPoint& p, std::size_t k);

/// Fixed point b0 (fate ...000...) and period-2 point b1 (fate ...0101...).
std::pair<SolenoidPoint, SolenoidPoint> special_points(const SolenoidParams& params);

}  // namespace invis
