#include "invis/skew_system.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>

namespace invis {

std::string to_string(BaseKind kind) {
  return kind == BaseKind::Bernoulli ? "bernoulli" : "solenoid";
}

BaseKind parse_base(const std::string& text) {
  if (text == "bernoulli") return BaseKind::Bernoulli;
  if (text == "solenoid") return BaseKind::Solenoid;
  throw std::invalid_argument("unknown base '" + text + "' (expected bernoulli|solenoid)");
}

SkewSystem SkewSystem::bernoulli(const FiberMapFamily& family) {
  return bernoulli_with_maps(family, {family.f0, family.f1}, 1);
}

SkewSystem SkewSystem::solenoid(const FiberMapFamily& family, SolenoidParams params) {
  params.validate();
  SkewSystem s;
  s.base_ = BaseKind::Solenoid;
  s.family_ = std::make_shared<const FiberMapFamily>(family);
  s.params_ = params;
  s.window_ = 1;
  s.maps_ = {family.f0, family.f1};
  return s;
}

SkewSystem SkewSystem::bernoulli_with_maps(const FiberMapFamily& family,
                                           std::vector<FiberMap> maps, int window) {
  if (window < 1 || window > 8)
    throw std::invalid_argument("bernoulli_with_maps: window must be in [1, 8]");
  if (maps.size() != (std::size_t{1} << window))
    throw std::invalid_argument("bernoulli_with_maps: need 2^window maps");
  SkewSystem s;
  s.base_ = BaseKind::Bernoulli;
  s.family_ = std::make_shared<const FiberMapFamily>(family);
  s.window_ = window;
  s.maps_ = std::move(maps);
  return s;
}

nlohmann::json SkewSystem::descriptor() const {
  nlohmann::json d{{"base", to_string(base_)}, {"n", family_->n}};
  if (base_ == BaseKind::Solenoid) {
    d["lambda"] = params_.lambda;
    d["R"] = params_.R;
  } else {
    d["lambda"] = nullptr;
    d["R"] = nullptr;
    d["window"] = window_;
  }
  if (perturbation_) {
    const auto& p = *perturbation_;
    d["perturbation"] = {{"seed", p.seed},
                         {"budget", p.budget},
                         {"harmonics", p.harmonics},
                         {"window", p.window},
                         {"amplitude", p.amplitude}};
  } else {
    d["perturbation"] = nullptr;
  }
  return d;
}

std::uint64_t fnv1a(const std::string& text) {
  std::uint64_t h = 0xcbf29ce484222325ULL;
  for (unsigned char c : text) {
    h ^= c;
    h *= 0x100000001b3ULL;
  }
  return h;
}

std::uint64_t SkewSystem::descriptor_hash() const { return fnv1a(descriptor().dump()); }

BernoulliState BernoulliState::start(BitStream stream, double x) {
  BernoulliState s;
  s.stream = stream;
  s.past = s.stream.next_bits64();
  s.ahead = s.stream.next_bits64();
  s.x = wrap_circle(x);
  return s;
}

int step_apply(const SkewSystem& sys, BernoulliState& state) {
  if (sys.base() != BaseKind::Bernoulli)
    throw std::invalid_argument("step_apply: system is not over the Bernoulli shift");
  const int d = state.digit();
  state.x = fiber_step(sys, state.past, d, state.x);
  state.past = (state.past << 1) | static_cast<std::uint64_t>(d);
  state.ahead = (state.ahead << 1) | static_cast<std::uint64_t>(state.stream.next_bit());
  return d;
}

FiberSelector select_fiber_map(double y) {
  if (!(y >= 0.0 && y < 1.0)) throw std::domain_error("select_fiber_map: y must be in [0, 1)");
  if (y < 0.375) return {FiberSelector::Kind::F0, 0.0, 0.0};
  if (y < 0.5) return {FiberSelector::Kind::Isotopy, 8.0 * y - 3.0, 8.0};
  if (y < 0.875) return {FiberSelector::Kind::F1, 1.0, 0.0};
  return {FiberSelector::Kind::Isotopy, 8.0 - 8.0 * y, -8.0};
}

double selector_lift(const FiberMapFamily& family, const FiberSelector& sel, double x) {
  switch (sel.kind) {
    case FiberSelector::Kind::F0: return family.f0.lift(x);
    case FiberSelector::Kind::F1: return family.f1.lift(x);
    case FiberSelector::Kind::Isotopy: return isotopy_lift(family, sel.t, x);
  }
  return x;
}

double selector_lift_dx(const FiberMapFamily& family, const FiberSelector& sel, double x) {
  switch (sel.kind) {
    case FiberSelector::Kind::F0: return family.f0.lift_derivative(x);
    case FiberSelector::Kind::F1: return family.f1.lift_derivative(x);
    case FiberSelector::Kind::Isotopy: return isotopy_lift_dx(family, sel.t, x);
  }
  return 1.0;
}

double selector_lift_dy(const FiberMapFamily& family, const FiberSelector& sel, double x) {
  if (sel.kind != FiberSelector::Kind::Isotopy) return 0.0;
  return sel.dt_dy * isotopy_lift_dt(family, sel.t, x);
}

double selector_lift_inverse(const FiberMapFamily& family, const FiberSelector& sel,
                             double y) {
  switch (sel.kind) {
    case FiberSelector::Kind::F0: return family.f0.lift_inverse(y);
    case FiberSelector::Kind::F1: return family.f1.lift_inverse(y);
    case FiberSelector::Kind::Isotopy: return isotopy_lift_inverse(family, sel.t, y);
  }
  return y;
}

int solenoid_apply(const SkewSystem& sys, SolenoidState& s) {
  if (sys.base() != BaseKind::Solenoid)
    throw std::invalid_argument("solenoid_apply: system is not over the solenoid");
  return solenoid_apply_unchecked(sys, s);
}

double composition_identity_gap(const SkewSystem& sys, int count, std::uint64_t seed) {
  if (sys.base() != BaseKind::Solenoid)
    throw std::invalid_argument("composition_identity_gap: solenoid base required");
  const FiberMapFamily& fam = sys.family();
  BitStream rng(seed, 0x7);
  double worst = 0.0;
  for (int c = 0; c < count; ++c) {
    const int m = 2 + static_cast<int>(rng.next_uniform() * 19.0);
    std::vector<std::uint8_t> word(m);
    int prev = 0;
    for (auto& d : word) {
      d = static_cast<std::uint8_t>(prev ? 0 : rng.next_bit());
      prev = d;
    }
    std::vector<std::uint8_t> cont{0};
    SolenoidState s{SolenoidPoint(BitQueue::with_prefix(
                                      word, BitQueue::with_prefix(
                                                cont, BitQueue::from_stream(BitStream(seed, 1000 + c)))),
                                  {}),
                    -1.0 + 2.0 * rng.next_uniform()};
    double x = s.x;
    for (int i = 0; i < m; ++i) {
      x = (word[i] ? fam.f1 : fam.f0).lift(x);
      solenoid_apply(sys, s);
    }
    worst = std::max(worst, std::abs(wrap_circle(s.x - x)));
  }
  return worst;
}

}  // namespace invis
