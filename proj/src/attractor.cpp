#include "invis/attractor.hpp"

#include <algorithm>
#include <stdexcept>

namespace invis {
namespace {

int usable_depth(const SkewSystem& sys, const BitWindow& word, const char* who) {
  if (sys.base() != BaseKind::Bernoulli)
    throw std::invalid_argument(std::string(who) + ": word form needs the Bernoulli base");
  const int depth = static_cast<int>(word.size()) - (sys.window() - 1);
  if (depth < 1)
    throw std::invalid_argument(std::string(who) + ": word shorter than the digit window");
  return depth;
}

BitWindow alternating_past(std::size_t length) {
  // ...0101 ending in 1, so omega_0 = 0 continues the period-2 pattern.
  std::vector<std::uint8_t> bits(length);
  for (std::size_t i = 0; i < length; ++i)
    bits[length - 1 - i] = static_cast<std::uint8_t>(i % 2 == 0 ? 1 : 0);
  return BitWindow(std::move(bits));
}

}  // namespace

GraphSample gamma_bracket(const SkewSystem& sys, const BitWindow& past_word) {
  const int depth = usable_depth(sys, past_word, "gamma_bracket");
  const int w = sys.window();
  double lo = sys.family().I.lo, hi = sys.family().I.hi;
  for (int p = w - 1; p < static_cast<int>(past_word.size()); ++p) {
    const auto v = static_cast<std::uint32_t>(past_word.packed(p - w + 1, w));
    const FiberMap& g = sys.map_for(v);
    lo = g.lift(lo);
    hi = g.lift(hi);
  }
  return {past_word.str(), {lo, hi}, depth};
}

GraphSample gamma_bracket(const SkewSystem& sys, const BitWindow& past_word,
                          BitQueue continuation) {
  if (sys.base() != BaseKind::Solenoid)
    throw std::invalid_argument("gamma_bracket: continuation form needs the solenoid base");
  SolenoidPoint b(BitQueue::with_prefix(past_word.bits(), std::move(continuation)), {});
  const FiberMapFamily& fam = sys.family();
  double lo = fam.I.lo, hi = fam.I.hi;
  for (std::size_t j = 0; j < past_word.size(); ++j) {
    const FiberSelector sel = select_fiber_map(b.prefix64(), b.y());
    lo = selector_lift(fam, sel, lo);
    hi = selector_lift(fam, sel, hi);
    b.advance(sys.params());
  }
  return {past_word.str(), {lo, hi}, static_cast<int>(past_word.size())};
}

std::vector<Arc> gamma_bracket_depths(const SkewSystem& sys, const BitWindow& past_word) {
  const int depth = usable_depth(sys, past_word, "gamma_bracket_depths");
  std::vector<Arc> out;
  out.reserve(depth);
  for (int d = 1; d <= depth; ++d)
    out.push_back(gamma_bracket(sys, shift(past_word, depth - d)).interval);
  return out;
}

nlohmann::json WidthCheck::to_json() const {
  return {{"words", words}, {"depth", depth}, {"rate", rate}, {"worst_ratio", worst_ratio},
          {"pass", pass}};
}

WidthCheck bracket_width_check(const SkewSystem& sys, int words, int depth, std::uint64_t seed) {
  const Arc I = sys.family().I;
  WidthCheck r;
  r.words = words;
  r.depth = depth;
  constexpr int kGrid = 4096;
  for (const FiberMap& g : sys.maps())
    for (int i = 0; i <= kGrid; ++i)
      r.rate = std::max(r.rate, g.lift_derivative(I.lo + I.length() * i / kGrid));
  const std::size_t len = static_cast<std::size_t>(depth + sys.window() - 1);
  BitStream stream(seed, 0x77);
  for (int k = 0; k <= words; ++k) {
    const BitWindow word = k == 0 ? BitWindow(std::vector<std::uint8_t>(len, 0))
                                  : BitWindow::from_stream(stream, len);
    const auto arcs = gamma_bracket_depths(sys, word);
    double bound = I.length();
    for (const Arc& a : arcs) {
      bound *= r.rate;
      r.worst_ratio = std::max(r.worst_ratio, a.length() / bound);
    }
  }
  r.pass = r.worst_ratio <= 1.0 + 1e-9;
  return r;
}

GraphSample repeller_bracket(const SkewSystem& sys, const BitWindow& future_word) {
  const int depth = usable_depth(sys, future_word, "repeller_bracket");
  const int w = sys.window();
  double lo = sys.family().J.lo, hi = sys.family().J.hi;
  for (int p = static_cast<int>(future_word.size()) - 1; p >= w - 1; --p) {
    const auto v = static_cast<std::uint32_t>(future_word.packed(p - w + 1, w));
    const FiberMap& g = sys.map_for(v);
    lo = g.lift_inverse(lo);
    hi = g.lift_inverse(hi);
  }
  return {future_word.str(), {lo, hi}, depth};
}

GraphSample repeller_bracket(const SkewSystem& sys, const SolenoidPoint& b, int depth) {
  if (sys.base() != BaseKind::Solenoid)
    throw std::invalid_argument("repeller_bracket: point form needs the solenoid base");
  if (depth < 1) throw std::invalid_argument("repeller_bracket: depth >= 1");
  std::vector<FiberSelector> sels;
  sels.reserve(depth);
  SolenoidPoint p = b;
  for (int i = 0; i < depth; ++i) {
    sels.push_back(select_fiber_map(p.prefix64(), p.y()));
    p.advance(sys.params());
  }
  const FiberMapFamily& fam = sys.family();
  double lo = fam.J.lo, hi = fam.J.hi;
  for (int i = depth - 1; i >= 0; --i) {
    lo = selector_lift_inverse(fam, sels[i], lo);
    hi = selector_lift_inverse(fam, sels[i], hi);
  }
  return {fate_forward(b, static_cast<std::size_t>(std::min(depth, 64))).str(), {lo, hi}, depth};
}

nlohmann::json ArcReport::to_json() const {
  nlohmann::json f = nlohmann::json::array();
  for (const auto& g : forced)
    f.push_back({{"depth", g.depth}, {"lo", g.interval.lo}, {"hi", g.interval.hi},
                 {"word_tail", g.word.substr(g.word.size() > 16 ? g.word.size() - 16 : 0)}});
  return {{"outer", {outer.lo, outer.hi}},
          {"inner", {inner.lo, inner.hi}},
          {"samples", samples},
          {"depth", depth},
          {"deep_depth", deep_depth},
          {"a", a},
          {"contains_I_tilde", contains_I_tilde},
          {"inner_certifies_I_tilde", inner_certifies_I_tilde},
          {"inside_I", inside_I},
          {"forced", f}};
}

ArcReport projected_arc(const SkewSystem& sys, int samples, int depth, std::uint64_t seed) {
  if (samples < 1000) throw std::invalid_argument("projected_arc: samples >= 1000");
  if (depth < 40) throw std::invalid_argument("projected_arc: depth >= 40");
  const FiberMapFamily& fam = sys.family();
  const bool sol = sys.base() == BaseKind::Solenoid;
  const int extra = sol ? 0 : sys.window() - 1;
  ArcReport r;
  r.samples = samples;
  r.depth = depth;
  r.deep_depth = std::max(depth, 1000);
  r.a = fam.a;

  BitStream words(seed, 0);
  auto bracket = [&](const BitWindow& past, BitQueue cont) {
    return sol ? gamma_bracket(sys, past, std::move(cont)) : gamma_bracket(sys, past);
  };
  double lo = fam.I.hi, hi = fam.I.lo;
  for (int s = 0; s < samples; ++s) {
    const BitWindow past = BitWindow::from_stream(words, depth + extra);
    const GraphSample g =
        bracket(past, BitQueue::from_stream(BitStream(seed, static_cast<std::uint64_t>(s) + 1)));
    lo = std::min(lo, g.interval.lo);
    hi = std::max(hi, g.interval.hi);
  }
  for (int d : {depth, r.deep_depth}) {
    const BitWindow zeros(std::vector<std::uint8_t>(d + extra, 0));
    const BitWindow alt = alternating_past(d + extra);
    r.forced.push_back(bracket(zeros, BitQueue::periodic("0")));
    r.forced.push_back(bracket(alt, BitQueue::periodic("01")));
  }
  for (const auto& g : r.forced) {
    lo = std::min(lo, g.interval.lo);
    hi = std::max(hi, g.interval.hi);
  }
  r.outer = {lo, hi};
  r.inner = {r.forced[2].interval.hi, r.forced[3].interval.lo};
  r.contains_I_tilde = r.outer.lo <= 0.0 && r.outer.hi >= fam.a - 1e-6;
  r.inner_certifies_I_tilde = r.inner.lo <= 1e-6 && r.inner.hi >= fam.a - 1e-6;
  r.inside_I = r.outer.lo >= fam.I.lo - 1e-12 && r.outer.hi <= fam.I.hi + 1e-12;
  return r;
}

}  // namespace invis
