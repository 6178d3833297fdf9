#pragma once

// The statistical attractor as a graph over the base, approximated by
// nested interval brackets, and the repelling graph inside J.

#include <string>
#include <vector>

#include <json.hpp>

#include "invis/skew_system.hpp"

namespace invis {

struct GraphSample {
  std::string word;
  Arc interval;  // lift coordinates
  int depth = 0;
};

/// Bernoulli base. `past_word` lists omega_{-m} ... omega_{-1}, earliest
/// first. With a digit window w the first w-1 digits only feed the window,
/// so depth = m - (w - 1) maps are composed. Throws std::invalid_argument if
/// depth < 1.
GraphSample gamma_bracket(const SkewSystem& sys, const BitWindow& past_word);

/// Solenoid base. The fiber map at each past time depends on all later
/// digits, so the digits from time 0 on are supplied by `continuation`.
GraphSample gamma_bracket(const SkewSystem& sys, const BitWindow& past_word,
                          BitQueue continuation);

/// Brackets of depth 1 ... depth for the same past word (Bernoulli base).
std::vector<Arc> gamma_bracket_depths(const SkewSystem& sys, const BitWindow& past_word);

struct WidthCheck {
  int words = 0;
  int depth = 0;
  double rate = 0.0;         // sup of the fiber slopes over I
  double worst_ratio = 0.0;  // max over words and k of width_k / (rate^k |I|)
  bool pass = false;
  nlohmann::json to_json() const;
};

/// Width of the depth-k bracket against rate^k |I| for k = 1 ... depth, over
/// the all-zero word and `words` random past words (Bernoulli base).
WidthCheck bracket_width_check(const SkewSystem& sys, int words, int depth, std::uint64_t seed);

/// Bernoulli base. `future_word` lists omega_0 ... omega_{k-1} preceded by
/// w-1 history digits; J is pulled back by the inverse maps.
GraphSample repeller_bracket(const SkewSystem& sys, const BitWindow& future_word);

/// Solenoid base: pulls J back along the next `depth` fiber maps over b.
GraphSample repeller_bracket(const SkewSystem& sys, const SolenoidPoint& b, int depth);

struct ArcReport {
  Arc outer;   // hull of all brackets
  Arc inner;   // [top of the deep all-zero bracket, bottom of the deep alternating bracket]
  int samples = 0;
  int depth = 0;
  int deep_depth = 0;
  double a = 0.0;
  bool contains_I_tilde = false;        // outer.lo <= 0 and outer.hi >= a - 1e-6
  bool inner_certifies_I_tilde = false; // inner.lo <= 1e-6 and inner.hi >= a - 1e-6
  bool inside_I = false;
  std::vector<GraphSample> forced;

  nlohmann::json to_json() const;
};

/// Hull of gamma brackets over `samples` random past words plus the
/// all-zero and alternating words. Requires samples >= 1000, depth >= 40.
ArcReport projected_arc(const SkewSystem& sys, int samples, int depth, std::uint64_t seed);

}  // namespace invis
