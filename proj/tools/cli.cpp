#include "cli.hpp"

#include <omp.h>

#include <cinttypes>
#include <cmath>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <sstream>

#include <CLI11.hpp>

#include "invis/attractor.hpp"
#include "invis/cones.hpp"
#include "invis/ergodic.hpp"
#include "invis/measure.hpp"

namespace invis::cli {
namespace fs = std::filesystem;
using nlohmann::json;

namespace {

template <typename T>
void read_key(const json& j, const char* key, T& into) {
  if (!j.contains(key)) return;
  try {
    into = j.at(key).get<T>();
  } catch (const json::exception& e) {
    throw ConfigError(std::string("config key '") + key + "': " + e.what());
  }
}

std::string hex64(std::uint64_t v) {
  char buf[17];
  std::snprintf(buf, sizeof buf, "%016" PRIx64, v);
  return buf;
}

json stamp(const ExperimentConfig& config, json body) {
  body["config_hash"] = config.hash_hex();
  body["version"] = INVIS_VERSION;
  return body;
}

std::string csv_preamble(const ExperimentConfig& config, const std::string& schema) {
  return "# schema=" + schema + " config_hash=" + config.hash_hex() +
         " version=" + INVIS_VERSION + "\n";
}

fs::path output_path(const ExperimentConfig& config, const std::string& name) {
  const fs::path dir(config.out);
  std::error_code ec;
  fs::create_directories(dir, ec);
  if (ec) throw std::runtime_error("cannot create output directory " + dir.string() + ": " + ec.message());
  return dir / name;
}

void write_file(const fs::path& path, const std::string& content) {
  std::ofstream f(path, std::ios::binary);
  if (!f) throw std::runtime_error("cannot open " + path.string() + " for writing");
  f << content;
  f.close();
  if (!f) throw std::runtime_error("write failed for " + path.string());
}

void write_json(const ExperimentConfig& config, const std::string& name, json body) {
  write_file(output_path(config, name), stamp(config, std::move(body)).dump(2) + "\n");
}

SimulationConfig sim_config(const ExperimentConfig& c, std::uint64_t seed, std::uint64_t steps) {
  SimulationConfig s;
  s.seed = seed;
  s.steps = steps;
  s.burn_in = c.burn_in;
  s.shards = c.shards;
  return s;
}

SkewSystem make_system(const ExperimentConfig& c, BaseKind base) {
  const FiberMapFamily fam = build_family(c.n);
  if (base == BaseKind::Bernoulli) return SkewSystem::bernoulli(fam);
  return SkewSystem::solenoid(fam, SolenoidParams{c.lambda, c.R});
}

/// Seed of the i-th perturbation, derived from the first configured seed.
std::uint64_t perturbation_seed(const ExperimentConfig& c, int i) {
  return mix64(c.seeds.front() * 0x100000001b3ULL + static_cast<std::uint64_t>(i) + 1);
}

struct Line {
  std::string name;
  bool pass = false;
  json detail;
};

class Suite {
 public:
  explicit Suite(std::ostream& out) : out_(out) {}

  void add(std::string name, bool pass, json detail) {
    out_ << (pass ? "PASS " : "FAIL ") << name << "\n" << std::flush;
    lines_.push_back({std::move(name), pass, std::move(detail)});
  }
  bool all_pass() const {
    for (const auto& l : lines_)
      if (!l.pass) return false;
    return !lines_.empty();
  }
  json to_json() const {
    json arr = json::array();
    for (const auto& l : lines_) arr.push_back({{"name", l.name}, {"pass", l.pass}, {"detail", l.detail}});
    return {{"all_pass", all_pass()}, {"checks", arr}};
  }

 private:
  std::ostream& out_;
  std::vector<Line> lines_;
};

/// North-South checklist, arc containment, SRB marginals and Bernoulli
/// invisibility for one (possibly perturbed) Bernoulli system.
void bernoulli_suite(Suite& suite, const std::string& prefix, const SkewSystem& sys,
                     const ExperimentConfig& c, std::uint64_t steps) {
  const NorthSouthReport ns = verify_northsouth(sys);
  suite.add(prefix + "northsouth", ns.all_pass(), ns.to_json());

  const ArcReport arc = projected_arc(sys, c.arc_samples, c.arc_depth, c.seeds.front());
  suite.add(prefix + "arc_contains_I_tilde", arc.contains_I_tilde && arc.inner_certifies_I_tilde,
            arc.to_json());
  suite.add(prefix + "arc_inside_I", arc.inside_I,
            json{{"outer", {arc.outer.lo, arc.outer.hi}}, {"nu", sys.nu()}});
  const WidthCheck widths = bracket_width_check(sys, 64, c.arc_depth, c.seeds.front());
  suite.add(prefix + "bracket_widths", widths.pass, widths.to_json());

  for (std::uint64_t seed : c.seeds) {
    const OrbitStats stats = simulate(sys, sim_config(c, seed, steps));
    const std::string tag = prefix + "seed" + std::to_string(seed) + ".";
    bool srb_ok = true;
    json srb = json::array();
    for (int len = 1; len <= 5; ++len) {
      const SrbReport r = srb_marginal_check(stats.measure, len);
      srb_ok = srb_ok && r.pass && r.sufficient;
      srb.push_back(r.to_json());
    }
    suite.add(tag + "srb_marginals", srb_ok, srb);
    const InvisibilityReport inv = invisibility_verdict(stats, sys.n(), BaseKind::Bernoulli);
    suite.add(tag + "invisibility_bernoulli", inv.verdict == Verdict::Pass && inv.explained &&
                                                  inv.limsup_within_bound,
              inv.to_json());
  }
}

}  // namespace

ExperimentConfig ExperimentConfig::from_json(const json& j) {
  if (!j.is_object()) throw ConfigError("config must be a JSON object");
  static const std::vector<std::string> known = {
      "n", "base", "lambda", "R", "steps", "solenoid_steps", "burn_in", "seeds", "shards",
      "budget", "perturb_count", "perturb_steps", "harmonics", "window", "alpha", "eta",
      "cone_samples", "arc_samples", "arc_depth", "threshold_n_min", "threshold_n_max",
      "exhaustive_bernoulli_n", "exhaustive_bernoulli_depth", "exhaustive_solenoid_n",
      "exhaustive_solenoid_depth", "exhaustive_grid", "out", "threads"};
  for (const auto& [key, value] : j.items())
    if (std::find(known.begin(), known.end(), key) == known.end())
      throw ConfigError("unknown config key '" + key + "'");

  ExperimentConfig c;
  read_key(j, "n", c.n);
  if (j.contains("base")) {
    std::string b;
    read_key(j, "base", b);
    try {
      c.base = parse_base(b);
    } catch (const std::invalid_argument& e) {
      throw ConfigError(e.what());
    }
  }
  read_key(j, "lambda", c.lambda);
  read_key(j, "R", c.R);
  read_key(j, "steps", c.steps);
  read_key(j, "solenoid_steps", c.solenoid_steps);
  read_key(j, "burn_in", c.burn_in);
  read_key(j, "seeds", c.seeds);
  read_key(j, "shards", c.shards);
  read_key(j, "budget", c.budget);
  read_key(j, "perturb_count", c.perturb_count);
  read_key(j, "perturb_steps", c.perturb_steps);
  read_key(j, "harmonics", c.harmonics);
  read_key(j, "window", c.window);
  read_key(j, "alpha", c.alpha);
  read_key(j, "eta", c.eta);
  read_key(j, "cone_samples", c.cone_samples);
  read_key(j, "arc_samples", c.arc_samples);
  read_key(j, "arc_depth", c.arc_depth);
  read_key(j, "threshold_n_min", c.threshold_n_min);
  read_key(j, "threshold_n_max", c.threshold_n_max);
  read_key(j, "exhaustive_bernoulli_n", c.exhaustive_bernoulli_n);
  read_key(j, "exhaustive_bernoulli_depth", c.exhaustive_bernoulli_depth);
  read_key(j, "exhaustive_solenoid_n", c.exhaustive_solenoid_n);
  read_key(j, "exhaustive_solenoid_depth", c.exhaustive_solenoid_depth);
  read_key(j, "exhaustive_grid", c.exhaustive_grid);
  read_key(j, "out", c.out);
  read_key(j, "threads", c.threads);
  return c;
}

json ExperimentConfig::to_json() const {
  return {{"n", n},
          {"base", to_string(base)},
          {"lambda", lambda},
          {"R", R},
          {"steps", steps},
          {"solenoid_steps", solenoid_steps},
          {"burn_in", burn_in},
          {"seeds", seeds},
          {"shards", shards},
          {"budget", resolved_budget()},
          {"perturb_count", perturb_count},
          {"perturb_steps", perturb_steps},
          {"harmonics", harmonics},
          {"window", window},
          {"alpha", alpha},
          {"eta", eta},
          {"cone_samples", cone_samples},
          {"arc_samples", arc_samples},
          {"arc_depth", arc_depth},
          {"threshold_n_min", threshold_n_min},
          {"threshold_n_max", threshold_n_max},
          {"exhaustive_bernoulli_n", exhaustive_bernoulli_n},
          {"exhaustive_bernoulli_depth", exhaustive_bernoulli_depth},
          {"exhaustive_solenoid_n", exhaustive_solenoid_n},
          {"exhaustive_solenoid_depth", exhaustive_solenoid_depth},
          {"exhaustive_grid", exhaustive_grid}};
}

void ExperimentConfig::validate() const {
  auto require = [](bool ok, const std::string& what) {
    if (!ok) throw ConfigError(what);
  };
  require(n >= 5, "n must be >= 5 (got " + std::to_string(n) + "); at n = 4 the slope 1/4 - 1/n vanishes");
  require(!seeds.empty(), "seeds must be nonempty");
  const double cap = 1.0 / (4.0 * n * n);
  require(resolved_budget() >= 0.0 && resolved_budget() <= cap * (1.0 + 1e-12),
          "budget must lie in [0, 1/(4 n^2)] = [0, " + std::to_string(cap) + "]");
  require(steps > 0 && solenoid_steps > 0 && perturb_steps > 0, "step counts must be positive");
  require(shards >= 1, "shards must be >= 1");
  require(perturb_count >= 0, "perturb_count must be >= 0");
  require(harmonics >= 1 && harmonics <= 16, "harmonics must be in [1, 16]");
  require(window >= 1 && window <= 8, "window must be in [1, 8]");
  require(alpha > 0.0 && alpha <= 1.0, "alpha must be in (0, 1]");
  require(cone_samples >= 1, "cone_samples must be >= 1");
  require(arc_samples >= 1000 && arc_depth >= 40, "arc_samples >= 1000 and arc_depth >= 40 required");
  require(threshold_n_min >= 5 && threshold_n_max >= threshold_n_min, "threshold range must satisfy 5 <= min <= max");
  require(exhaustive_bernoulli_n >= 5 && exhaustive_solenoid_n >= 5, "exhaustive n must be >= 5");
  require(exhaustive_bernoulli_depth >= 1 && exhaustive_bernoulli_depth <= 24 &&
              exhaustive_solenoid_depth >= 1 && exhaustive_solenoid_depth <= 24,
          "exhaustive depths must be in [1, 24]");
  require(exhaustive_grid >= 1, "exhaustive_grid must be >= 1");
  require(threads >= 0, "threads must be >= 0");
  try {
    SolenoidParams{lambda, R}.validate();
  } catch (const std::domain_error& e) {
    throw ConfigError(e.what());
  }
}

std::string ExperimentConfig::hash_hex() const { return hex64(fnv1a(to_json().dump())); }

int cmd_verify(const ExperimentConfig& c, std::ostream& out) {
  Suite suite(out);
  const FiberMapFamily fam = build_family(c.n);
  const SkewSystem bern = SkewSystem::bernoulli(fam);
  const SkewSystem sol = SkewSystem::solenoid(fam, SolenoidParams{c.lambda, c.R});

  const NorthSouthReport inv = family_invariants(fam);
  suite.add("family_invariants", inv.all_pass(), inv.to_json());

  bool phi_ok = true;
  json phi = json::array();
  for (int n = c.threshold_n_min; n <= c.threshold_n_max; ++n) {
    const PhiThreshold p = phi_threshold(n);
    phi_ok = phi_ok && p.phi_above_quarter;
    if (n == c.n) phi.push_back({{"n", n}, {"phi", p.phi}});
  }
  suite.add("phi_gate", phi_ok && phi_threshold(c.n).phi_above_quarter, phi);

  const NorthSouthReport ns_sol = verify_northsouth(sol);
  suite.add("northsouth_solenoid", ns_sol.all_pass(), ns_sol.to_json());

  const double gap = composition_identity_gap(sol, 1000, c.seeds.front());
  suite.add("composition_identity", gap <= 1e-12, json{{"max_gap", gap}});

  bernoulli_suite(suite, "", bern, c, c.steps);

  for (std::uint64_t seed : c.seeds) {
    const OrbitStats stats = simulate(sol, sim_config(c, seed, c.solenoid_steps));
    const InvisibilityReport r = invisibility_verdict(stats, c.n, BaseKind::Solenoid);
    suite.add("seed" + std::to_string(seed) + ".invisibility_solenoid",
              r.verdict == Verdict::Pass, r.to_json());
  }

  const ExhaustiveAuditReport eb = exhaustive_audit_bernoulli(
      SkewSystem::bernoulli(build_family(c.exhaustive_bernoulli_n)), c.exhaustive_bernoulli_depth,
      c.exhaustive_grid);
  suite.add("exhaustive_bernoulli", eb.pass(), eb.to_json());
  const ExhaustiveAuditReport es = exhaustive_audit_solenoid(
      SkewSystem::solenoid(build_family(c.exhaustive_solenoid_n), SolenoidParams{c.lambda, c.R}),
      c.exhaustive_solenoid_depth, c.exhaustive_grid, c.seeds.front());
  suite.add("exhaustive_solenoid", es.pass(), es.to_json());

  double eta = c.eta;
  if (eta < 0) {
    const EtaSearch search = search_eta(sol, c.cone_samples, c.alpha, c.seeds.front());
    suite.add("cone_audit", search.found && search.eta >= 1e-3, search.to_json());
    eta = search.found ? search.eta : 1e-4;
  } else {
    const HyperbolicityReport h =
        hyperbolicity_audit(sol, c.cone_samples, ConeParams{eta, c.alpha}, c.seeds.front());
    suite.add("cone_audit", h.pass, h.to_json());
  }
  const FdAgreement fd = finite_difference_agreement(sol, 200, eta, c.seeds.front());
  suite.add("jacobian_fd_agreement", fd.max_relative_error <= 1e-5, fd.to_json());

  PerturbOptions popt;
  popt.harmonics = c.harmonics;
  popt.window = c.window;
  for (int i = 0; i < c.perturb_count; ++i) {
    const SkewSystem p = perturb(bern, perturbation_seed(c, i), c.resolved_budget(), popt);
    const std::string prefix = "perturbed" + std::to_string(i) + ".";
    const auto& spec = *p.perturbation();
    suite.add(prefix + "distance_within_budget", spec.measured_distance <= c.resolved_budget(),
              p.descriptor());
    bernoulli_suite(suite, prefix, p, c, c.perturb_steps);
  }

  write_json(c, "verify.json", json{{"config", c.to_json()}, {"suite", suite.to_json()}});
  out << (suite.all_pass() ? "verify: all checks passed" : "verify: FAILED") << "\n";
  return suite.all_pass() ? 0 : 1;
}

int cmd_simulate(const ExperimentConfig& c, std::ostream& out, std::uint64_t dump_steps) {
  const SkewSystem sys = make_system(c, c.base);
  const std::uint64_t steps = c.base == BaseKind::Bernoulli ? c.steps : c.solenoid_steps;
  json runs = json::array();
  EmpiricalMeasure merged;
  bool pass = true;
  for (std::uint64_t seed : c.seeds) {
    const OrbitStats stats = simulate(sys, sim_config(c, seed, steps));
    const InvisibilityReport r = invisibility_verdict(stats, c.n, c.base);
    pass = pass && r.verdict == Verdict::Pass;
    runs.push_back({{"seed", seed}, {"stats", stats.to_json()}, {"verdict", r.to_json()}});
    merged.merge(stats.measure);
    out << "seed " << seed << ": visits " << stats.visits_V << " / " << stats.N << " -> "
        << to_string(r.verdict) << "\n";
  }
  write_json(c, "simulate.json",
             json{{"config", c.to_json()}, {"system", sys.descriptor()}, {"runs", runs}});

  std::ostringstream csv;
  csv << csv_preamble(c, "histogram/1") << "bin,lo,hi,count,density,in_V\n";
  csv.precision(17);
  const double width = 2.0 / EmpiricalMeasure::kBins;
  for (int b = 0; b < EmpiricalMeasure::kBins; ++b) {
    const double lo = EmpiricalMeasure::bin_lo(b), hi = EmpiricalMeasure::bin_hi(b);
    const std::uint64_t count = merged.bins()[b];
    const double density =
        merged.total() == 0 ? 0.0 : static_cast<double>(count) / (merged.total() * width);
    csv << b << ',' << lo << ',' << hi << ',' << count << ',' << density << ','
        << (lo >= 0.0 && hi <= 0.25 ? 1 : 0) << '\n';
  }
  write_file(output_path(c, "histogram.csv"), csv.str());

  if (dump_steps > 0) {
    std::ostringstream jl;
    const std::uint64_t seed = c.seeds.front();
    const double x0 = initial_fiber_point(sys.family(), seed, 0, true);
    if (c.base == BaseKind::Bernoulli) {
      BernoulliState s = BernoulliState::start(BitStream(seed, 0), x0);
      for (std::uint64_t k = 0; k < dump_steps; ++k) {
        jl << json{{"step", k}, {"y", std::ldexp(static_cast<double>(s.ahead), -64)},
                   {"re_z", nullptr}, {"im_z", nullptr}, {"fiber_x", s.x}}.dump()
           << '\n';
        step_apply(sys, s);
      }
    } else {
      SolenoidState s{SolenoidPoint::from_stream(BitStream(seed, 0)), x0};
      for (std::uint64_t k = 0; k < dump_steps; ++k) {
        jl << json{{"step", k}, {"y", s.b.y()}, {"re_z", s.b.z().real()},
                   {"im_z", s.b.z().imag()}, {"fiber_x", s.x}}.dump()
           << '\n';
        solenoid_apply(sys, s);
      }
    }
    write_file(output_path(c, "orbit.jsonl"), jl.str());
  }
  return pass ? 0 : 1;
}

int cmd_attractor(const ExperimentConfig& c, std::ostream& out) {
  const SkewSystem sys = make_system(c, BaseKind::Bernoulli);
  const ArcReport arc = projected_arc(sys, c.arc_samples, c.arc_depth, c.seeds.front());
  const WidthCheck widths = bracket_width_check(sys, 64, c.arc_depth, c.seeds.front());
  write_json(c, "attractor.json",
             json{{"config", c.to_json()}, {"arc", arc.to_json()}, {"widths", widths.to_json()}});

  std::ostringstream csv;
  csv.precision(17);
  csv << csv_preamble(c, "brackets/1") << "sample,past_word,depth,lo,hi,width\n";
  BitStream stream(c.seeds.front(), 0xa7c);
  const std::size_t len = static_cast<std::size_t>(c.arc_depth + sys.window() - 1);
  for (int i = 0; i < 64; ++i) {
    const BitWindow word = BitWindow::from_stream(stream, len);
    const auto arcs = gamma_bracket_depths(sys, word);
    for (std::size_t d = 0; d < arcs.size(); ++d)
      csv << i << ',' << word.str() << ',' << d + 1 << ',' << arcs[d].lo << ',' << arcs[d].hi
          << ',' << arcs[d].length() << '\n';
  }
  write_file(output_path(c, "brackets.csv"), csv.str());
  out << "arc [" << arc.outer.lo << ", " << arc.outer.hi << "], a = " << arc.a << "\n";
  return arc.contains_I_tilde && arc.inside_I && widths.pass ? 0 : 1;
}

int cmd_cones(const ExperimentConfig& c, std::ostream& out) {
  const SkewSystem sys = make_system(c, BaseKind::Solenoid);
  AuditOptions opt;
  opt.keep_points = true;
  HyperbolicityReport report;
  json search_json = nullptr;
  if (c.eta < 0) {
    const EtaSearch search = search_eta(sys, c.cone_samples, c.alpha, c.seeds.front(), opt);
    report = search.report;
    search_json = search.to_json();
  } else {
    report = hyperbolicity_audit(sys, c.cone_samples, ConeParams{c.eta, c.alpha}, c.seeds.front(), opt);
  }
  const FdAgreement fd =
      finite_difference_agreement(sys, 200, report.params.eta, c.seeds.front());
  write_json(c, "cones.json",
             json{{"config", c.to_json()}, {"search", search_json}, {"report", report.to_json()},
                  {"fd", fd.to_json()}});

  std::ostringstream csv;
  csv.precision(17);
  csv << csv_preamble(c, "cone_margins/1")
      << "index,tag,y,re_z,im_z,x,invariance_plus,expansion_plus,invariance_minus,expansion_minus\n";
  for (std::size_t i = 0; i < report.points.size(); ++i) {
    const PointMargin& p = report.points[i];
    csv << i << ',' << to_string(p.tag) << ',' << p.q.y << ',' << p.q.z.real() << ','
        << p.q.z.imag() << ',' << p.q.x << ',' << p.margins.invariance_plus << ','
        << p.margins.expansion_plus << ',' << p.margins.invariance_minus << ','
        << p.margins.expansion_minus << '\n';
  }
  write_file(output_path(c, "cone_margins.csv"), csv.str());
  out << "eta " << report.params.eta << ": " << (report.pass ? "PASS" : "FAIL") << "\n";
  return report.pass && fd.max_relative_error <= 1e-5 ? 0 : 1;
}

int cmd_thresholds(const ExperimentConfig& c, std::ostream& out) {
  std::ostringstream csv;
  csv.precision(17);
  csv << csv_preamble(c, "thresholds/1") << "n,phi,phi_above_quarter,doubled_bound,doubled_above_quarter\n";
  bool all = true;
  json rows = json::array();
  for (int n = c.threshold_n_min; n <= c.threshold_n_max; ++n) {
    const PhiThreshold p = phi_threshold(n);
    all = all && p.phi_above_quarter;
    csv << n << ',' << p.phi << ',' << int(p.phi_above_quarter) << ',' << p.doubled_bound << ','
        << int(p.doubled_above_quarter) << '\n';
    rows.push_back({{"n", n}, {"phi", p.phi}, {"doubled_bound", p.doubled_bound}});
  }
  const PhiThreshold limit = phi_threshold(1'000'000);
  const double limit_gap = std::abs(limit.phi - 3.0 / (4.0 * std::exp(1.0)));
  write_file(output_path(c, "thresholds.csv"), csv.str());
  write_json(c, "thresholds.json",
             json{{"config", c.to_json()}, {"rows", rows}, {"all_above_quarter", all},
                  {"phi_at_1e6", limit.phi}, {"limit_gap", limit_gap}});
  out << "phi(n) > 1/4 on [" << c.threshold_n_min << ", " << c.threshold_n_max
      << "]: " << (all ? "yes" : "no") << "; |phi(1e6) - 3/(4e)| = " << limit_gap << "\n";
  return all && limit_gap <= 1e-2 ? 0 : 1;
}

int run_cli(int argc, const char* const* argv, std::ostream& out, std::ostream& err) {
  CLI::App app{"invislab: skew products with epsilon-invisible sets"};
  app.require_subcommand(1);
  app.set_version_flag("--version", std::string(INVIS_VERSION));

  std::string config_path;
  std::optional<int> n, perturb_count, threads;
  std::optional<std::uint64_t> steps, seed;
  std::optional<std::string> base, out_dir;
  std::optional<double> budget, eta;
  std::uint64_t dump_steps = 0;

  app.add_option("--config", config_path, "JSON config file")->check(CLI::ExistingFile);
  app.add_option("--n", n, "family parameter n >= 5");
  app.add_option("--steps", steps, "counted steps (both bases)");
  app.add_option("--seed", seed, "single seed, replacing the seed list");
  app.add_option("--base", base, "bernoulli|solenoid");
  app.add_option("--perturb-count", perturb_count, "number of perturbed systems in verify");
  app.add_option("--budget", budget, "perturbation budget (<= 1/(4 n^2))");
  app.add_option("--eta", eta, "fixed cone scale (skips the search)");
  app.add_option("--out", out_dir, "output directory");
  app.add_option("--threads", threads, "OpenMP thread limit (0: runtime default)");

  app.fallthrough();
  auto* verify = app.add_subcommand("verify", "run the full ordered audit suite");
  auto* simulate_cmd = app.add_subcommand("simulate", "long-orbit statistics and fiber histogram");
  simulate_cmd->add_option("--dump", dump_steps, "write the first steps of seed orbit 0 as JSONL");
  auto* attractor = app.add_subcommand("attractor", "projected attractor arc and bracket widths");
  auto* cones = app.add_subcommand("cones", "cone-field audit of the solenoid system");
  auto* thresholds = app.add_subcommand("thresholds", "phi(n) threshold table");
  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e, out, err);
    return code == 0 ? 0 : 2;
  }

  ExperimentConfig config;
  try {
    if (!config_path.empty()) {
      std::ifstream f(config_path);
      if (!f) throw ConfigError("cannot read config " + config_path);
      json j;
      try {
        j = json::parse(f);
      } catch (const json::parse_error& e) {
        throw ConfigError("config " + config_path + ": " + e.what());
      }
      config = ExperimentConfig::from_json(j);
    }
    if (n) config.n = *n;
    if (steps) config.steps = config.solenoid_steps = config.perturb_steps = *steps;
    if (seed) config.seeds = {*seed};
    if (base) {
      try {
        config.base = parse_base(*base);
      } catch (const std::invalid_argument& e) {
        throw ConfigError(e.what());
      }
    }
    if (perturb_count) config.perturb_count = *perturb_count;
    if (budget) config.budget = *budget;
    if (eta) config.eta = *eta;
    if (out_dir) config.out = *out_dir;
    if (threads) config.threads = *threads;
    config.validate();
  } catch (const ConfigError& e) {
    err << "config error: " << e.what() << "\n";
    return 2;
  }

  if (config.threads > 0) omp_set_num_threads(config.threads);

  try {
    if (verify->parsed()) return cmd_verify(config, out);
    if (simulate_cmd->parsed()) return cmd_simulate(config, out, dump_steps);
    if (attractor->parsed()) return cmd_attractor(config, out);
    if (cones->parsed()) return cmd_cones(config, out);
    if (thresholds->parsed()) return cmd_thresholds(config, out);
  } catch (const std::exception& e) {
    err << "error: " << e.what() << "\n";
    return 1;
  }
  return 2;
}

}  // namespace invis::cli
