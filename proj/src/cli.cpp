#include "qpl/cli.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <sstream>

#include <CLI11.hpp>
#include <json.hpp>

#include "qpl/counting.hpp"
#include "qpl/error.hpp"
#include "qpl/forms.hpp"
#include "qpl/local_arith.hpp"
#include "qpl/manifest.hpp"
#include "qpl/quartic.hpp"
#include "qpl/real_geometry.hpp"
#include "qpl/rng.hpp"
#include "qpl/selmer.hpp"
#include "qpl/sieve.hpp"

namespace qpl::cli {

using json = nlohmann::ordered_json;

EnvLookup process_env() {
  return [](const std::string& name) -> std::optional<std::string> {
    if (const char* v = std::getenv(name.c_str())) return std::string(v);
    return std::nullopt;
  };
}

EnvLookup fixed_env(std::map<std::string, std::string> vars) {
  return [vars = std::move(vars)](const std::string& name) -> std::optional<std::string> {
    auto it = vars.find(name);
    if (it == vars.end()) return std::nullopt;
    return it->second;
  };
}

namespace {

// Integers become JSON numbers when they fit in 64 bits, decimal strings
// otherwise; non-integral rationals are strings "p/q".
json num(const BigInt& x) {
  if (x.fits_slong_p()) return static_cast<std::int64_t>(x.get_si());
  return x.get_str();
}

json num(const Rational& x) {
  if (x.get_den() == 1) return num(BigInt(x.get_num()));
  return x.get_str();
}

std::string fixed6(double x) {
  char buf[64];
  std::snprintf(buf, sizeof buf, "%.6f", x);
  return buf;
}

Rational parse_rational(const std::string& s, const std::string& what) {
  Rational r;
  if (r.set_str(s, 10) != 0) throw CLI::ValidationError(what, "not a rational number: " + s);
  if (r.get_den() == 0) throw CLI::ValidationError(what, "zero denominator");
  r.canonicalize();
  return r;
}

std::string read_file(const std::string& path) {
  std::ifstream in(path);
  if (!in) fail(ErrorKind::InvalidArgument, "cannot read " + path);
  std::ostringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

// Settings shared by every subcommand, resolved flag > environment > default.
struct Global {
  unsigned threads = 1;
  std::string out_dir = "qpl-out";
  std::uint64_t seed = 0;
  CLI::Option* threads_opt = nullptr;
  CLI::Option* out_opt = nullptr;
  CLI::Option* seed_opt = nullptr;
};

template <class T>
T env_value(const std::string& name, const std::string& text) {
  T v{};
  std::istringstream is(text);
  is >> v;
  if (!is || !is.eof()) throw CLI::ValidationError(name, "invalid value '" + text + "'");
  return v;
}

json resolve(Global& g, const EnvLookup& env) {
  json sources = json::object();
  auto pick = [&](CLI::Option* opt, const char* var, auto& value, const char* key) {
    using V = std::decay_t<decltype(value)>;
    if (opt->count() > 0) {
      sources[key] = "flag";
    } else if (auto e = env(var)) {
      if constexpr (std::is_same_v<V, std::string>)
        value = *e;
      else
        value = env_value<V>(var, *e);
      sources[key] = std::string("env:") + var;
    } else {
      sources[key] = "default";
    }
  };
  pick(g.threads_opt, "QPL_THREADS", g.threads, "threads");
  pick(g.out_opt, "QPL_OUT_DIR", g.out_dir, "out_dir");
  pick(g.seed_opt, "QPL_SEED", g.seed, "seed");
  if (g.threads == 0) throw CLI::ValidationError("threads", "must be >= 1");
  return sources;
}

// One invocation: collects outputs, keeps the manifest current on disk.
class Run {
 public:
  Run(std::string command, const Global& g, json sources, std::ostream& out)
      : g_(g), out_(out) {
    m_.command = std::move(command);
    m_.seed = g.seed;
    m_.sources = std::move(sources);
    m_.sources["out_dir_value"] = g.out_dir;
    m_.params["threads"] = g.threads;
    m_.started = utc_timestamp();
  }

  RunManifest& manifest() { return m_; }

  void record_params(const CLI::App& sub) {
    for (const CLI::Option* o : sub.get_options()) {
      if (o->get_lnames().empty() || o->get_lnames()[0] == "help") continue;
      const std::string key = o->get_lnames()[0];
      if (key == "threads" || key == "out-dir" || key == "seed") continue;
      if (o->count() > 0) {
        std::string v;
        for (const auto& r : o->results()) v += (v.empty() ? "" : " ") + r;
        m_.params[key] = v;
      } else {
        m_.params[key] = o->get_default_str();
      }
    }
  }

  // Primary output: echoed to stdout and written as <command>.<ext>.
  void emit(const std::string& ext, const std::string& content) {
    out_ << content;
    body_ += content;
    if (!files_enabled()) return;
    const std::string name = m_.command + "." + ext;
    write(name, content);
    m_.outputs.push_back(name);
  }

  void checkpoint(std::uint64_t cursor, json partial) {
    m_.checkpoints.push_back({cursor, std::move(partial)});
    write_manifest();
  }

  void finish(json totals) {
    m_.totals = std::move(totals);
    m_.result_digest = fnv1a_hex(body_);
    m_.finished = utc_timestamp();
    write_manifest();
  }

 private:
  const Global& g_;
  std::ostream& out_;
  RunManifest m_;
  std::string body_;

  bool files_enabled() const { return g_.out_dir != "-" && !g_.out_dir.empty(); }

  void write(const std::string& name, const std::string& content) {
    std::filesystem::create_directories(g_.out_dir);
    const auto path = std::filesystem::path(g_.out_dir) / name;
    std::ofstream f(path, std::ios::binary);
    if (!f) fail(ErrorKind::InvalidArgument, "cannot write " + path.string());
    f << content;
  }

  void write_manifest() {
    if (files_enabled()) write(m_.command + ".manifest.json", m_.to_json().dump(2) + "\n");
  }
};

// ---------------------------------------------------------------------------
// pair helpers

std::array<json, 5> quartic_json(const BinaryQuartic<Rational>& f) {
  std::array<json, 5> r;
  for (int i = 0; i < 5; ++i) r[i] = num(f[i]);
  return r;
}

PairOfQuadrics<BigInt> random_pair_mod(const CounterRng& rng, std::uint64_t i, std::int64_t p) {
  PairOfQuadrics<BigInt> v;
  for (int k = 0; k < 20; ++k) v.coord(k) = static_cast<long>(rng.uniform(k, i, 0, p - 1));
  return v;
}

// Pair with entries in [lo, hi] on streams offset by `salt`.
PairOfQuadrics<BigInt> random_pair_box(const CounterRng& rng, std::uint64_t salt, std::uint64_t i,
                                       std::int64_t lo, std::int64_t hi) {
  PairOfQuadrics<BigInt> v;
  for (int k = 0; k < 20; ++k) v.coord(k) = static_cast<long>(rng.uniform(salt + k, i, lo, hi));
  return v;
}

// ---------------------------------------------------------------------------
// subcommands

void cmd_invariants(Run& run, const std::string& pair_text) {
  const PairOfQuadrics<Rational> v = parse_rational_pair(pair_text);
  const BinaryQuartic<Rational> f = resolvent_quartic(v);
  const auto [I, J] = quartic_IJ(f);
  const Rational scaled_disc = 4 * I * I * I - J * J;
  const Rational disc = scaled_disc / 27;
  const Rational H = std::max(Rational(abs(I) * I * I), Rational(J * J / 4));
  json j;
  j["pair"] = serialize_pair(v);
  j["resolvent"] = quartic_json(f);
  j["I"] = num(I);
  j["J"] = num(J);
  j["disc"] = num(disc);
  j["height"] = num(H);
  run.emit("json", j.dump(2) + "\n");
  run.finish({{"I", num(I)}, {"J", num(J)}});
}

void cmd_classify(Run& run, const std::string& pair_text) {
  const PairOfQuadrics<BigInt> v = parse_pair(pair_text);
  const BinaryQuartic<BigInt> f = resolvent_quartic(v);
  json j;
  j["pair"] = serialize_pair(v);
  j["resolvent"] = serialize_quartic(f);
  if (f.is_zero_form()) {
    j["zero_resolvent"] = true;
    j["strongly_irreducible"] = false;
    run.emit("json", j.dump(2) + "\n");
    run.finish({{"strongly_irreducible", false}});
    return;
  }
  const InvariantPair inv = quartic_invariants(f);
  const bool disc_zero = sgn(inv.scaled_disc) == 0;
  const auto lemma = reducibility_case(v);
  const auto root = rational_linear_factor(f);
  const QuarticClassification qc = real_classification(f);
  j["I"] = num(inv.I);
  j["J"] = num(inv.J);
  j["disc_zero"] = disc_zero;
  j["lemma34_case"] = lemma ? json(*lemma) : json(nullptr);
  j["rational_linear_factor"] =
      root ? json::array({num(root->first), num(root->second)}) : json(nullptr);
  j["strongly_irreducible"] = is_strongly_irreducible(v);
  j["real_class"] = qc.real_class ? json(*qc.real_class) : json(nullptr);
  j["real_roots"] = qc.real_roots;
  if (disc_zero) {
    j["R_soluble"] = nullptr;
  } else {
    try {
      j["R_soluble"] = is_R_soluble(map_pair<double>(v, [](const BigInt& x) { return x.get_d(); }));
    } catch (const Error&) {
      j["R_soluble"] = nullptr;  // numerically too close to Delta = 0
    }
  }
  run.emit("json", j.dump(2) + "\n");
  run.finish({{"strongly_irreducible", j["strongly_irreducible"]}});
}

json counts_json(const IJCounts& c) { return {{"plus", c.plus}, {"minus", c.minus}, {"zero", c.zero}}; }

struct CountIJArgs {
  std::int64_t X = 0;
  std::string sign = "all";
  std::uint64_t chunk = 1'000'000;
  std::string resume;
};

void cmd_count_ij(Run& run, const Global& g, const CountIJArgs& a) {
  if (a.X < 1) fail(ErrorKind::InvalidArgument, "X must be >= 1");
  CountOptions opts;
  opts.threads = g.threads;
  opts.chunk = a.chunk;
  if (!a.resume.empty()) {
    const RunManifest prev = RunManifest::from_json(json::parse(read_file(a.resume)));
    if (prev.command != "count-ij") fail(ErrorKind::InvalidArgument, "resume manifest is not from count-ij");
    if (prev.params.value("X", "") != std::to_string(a.X))
      fail(ErrorKind::InvalidArgument, "resume manifest has a different X");
    if (prev.params.value("chunk", "") != std::to_string(a.chunk))
      fail(ErrorKind::InvalidArgument, "resume manifest has a different chunk size");
    if (!prev.checkpoints.empty()) {
      const Checkpoint& c = prev.checkpoints.back();
      opts.start = c.cursor;
      opts.partial = {c.partial.at("plus").get<std::int64_t>(), c.partial.at("minus").get<std::int64_t>(),
                      c.partial.at("zero").get<std::int64_t>()};
      run.manifest().checkpoints = prev.checkpoints;
    }
    run.manifest().params["resumed_from"] = opts.start;
  }
  opts.checkpoint = [&run](std::uint64_t cursor, const IJCounts& partial) {
    run.checkpoint(cursor, counts_json(partial));
  };
  const IJCounts c = count_invariant_pairs(a.X, opts);
  const double scale = std::pow(static_cast<double>(a.X), 5.0 / 6.0);
  std::string csv = "X,sign,count,ratio\n";
  auto row = [&](const char* s, std::int64_t n) {
    csv += std::to_string(a.X) + "," + s + "," + std::to_string(n) + "," + fixed6(n / scale) + "\n";
  };
  if (a.sign == "+" || a.sign == "all") row("+", c.plus);
  if (a.sign == "-" || a.sign == "all") row("-", c.minus);
  if (a.sign == "0" || a.sign == "all") row("0", c.zero);
  run.emit("csv", csv);
  run.finish(counts_json(c));
}

struct ScanArgs {
  std::int64_t M = 1;
  std::vector<std::string> predicates{"disc-nonzero"};
  std::uint64_t samples = 0;
  std::uint64_t range_begin = 0;
  std::optional<std::uint64_t> range_end;
  std::uint64_t chunk = 100'000;
};

void cmd_scan_box(Run& run, const Global& g, const ScanArgs& a) {
  std::vector<Predicate> preds;
  for (const auto& n : a.predicates) preds.push_back(parse_predicate(n));
  ScanOptions o;
  o.M = a.M;
  o.samples = a.samples;
  o.seed = g.seed;
  o.range_begin = a.range_begin;
  o.range_end = a.range_end;
  o.threads = g.threads;
  o.chunk = a.chunk;
  const ScanReport r = scan_box(o, preds);
  std::string csv = ScanReport::csv_header() + "\n";
  for (const auto& line : r.csv_rows()) csv += line + "\n";
  run.emit("csv", csv);
  json totals = {{"examined", r.examined}};
  for (const auto& t : r.tallies) totals[t.name] = t.hits;
  run.finish(totals);
}

void cmd_davenport(Run& run, const std::string& region_file, const std::vector<std::int64_t>& shear,
                   int grid) {
  Region region;
  if (!region_file.empty())
    region = parse_region(read_file(region_file));
  else if (shear.size() == 2)
    region = sheared_square(shear[0], shear[1]);
  else
    throw CLI::ValidationError("davenport", "one of --region-file or --shear N k is required");
  const DavenportResult r = davenport_check(region, {grid});
  json j;
  j["dim"] = region.dim;
  j["count"] = num(r.count);
  j["volume"] = r.volume;
  j["exact_volume"] = r.exact_volume ? json(r.exact_volume->get_str()) : json(nullptr);
  j["volume_error"] = r.volume_error;
  j["max_projection"] = r.max_projection;
  j["discrepancy"] = r.discrepancy();
  run.emit("json", j.dump(2) + "\n");
  run.finish({{"count", num(r.count)}});
}

void cmd_curves(Run& run, const Global& g, std::int64_t X, const std::string& family_file) {
  const CurveFamily fam = family_file.empty() ? CurveFamily{} : parse_family(read_file(family_file));
  const CurveCount c = enumerate_curves(X, fam, g.threads);
  json j;
  j["family"] = fam.name;
  j["X"] = c.X;
  j["count"] = c.count;
  j["ratio"] = c.ratio;
  j["predicted_constant"] = c.predicted_constant;
  j["archimedean"] = c.archimedean.get_str();
  auto dens = json::array();
  for (const auto& [p, d] : c.local_densities) dens.push_back({{"p", p}, {"density", d.get_str()}});
  j["local_densities"] = dens;
  run.emit("json", j.dump(2) + "\n");
  run.finish({{"count", c.count}});
}

struct SieveArgs {
  std::vector<std::int64_t> primes{5, 7};
  std::int64_t M = 5;
  std::uint64_t samples = 1000;
  std::string mode = "random";
};

// mode "normalized": a11 = 0 mod p^2 and a12, a13, a14, b11 = 0 mod p.
PairOfQuadrics<BigInt> sieve_sample(const CounterRng& rng, std::uint64_t i, std::int64_t M, std::int64_t p,
                                    bool normalized) {
  PairOfQuadrics<BigInt> v = random_pair_box(rng, 0, i, -M, M);
  if (normalized) {
    v.a_at(0, 0) *= p * p;
    for (int j = 1; j < 4; ++j) v.a_at(0, j) *= p;
    v.b_at(0, 0) *= p;
  }
  return v;
}

void cmd_sieve_scan(Run& run, const Global& g, const SieveArgs& a) {
  const bool normalized = a.mode == "normalized";
  const CounterRng rng(g.seed);
  std::string csv = SieveScanRow::csv_header() + "\n";
  json totals = json::object();
  for (std::int64_t p : a.primes) {
    if (p <= 3) fail(ErrorKind::InvalidArgument, "sieve-scan needs primes p > 3");
    const ChunkPlan plan{0, a.samples, 1000, g.threads};
    SieveScanRow total = run_chunked<SieveScanRow>(
        plan, SieveScanRow{p},
        [&](std::uint64_t b, std::uint64_t e) {
          SieveScanRow r{p};
          for (std::uint64_t i = b; i < e; ++i) r += sieve_tally(sieve_sample(rng, i, a.M, p, normalized), p);
          return r;
        },
        [](SieveScanRow& x, const SieveScanRow& y) { x += y; });
    csv += total.csv_row() + "\n";
    totals[std::to_string(p)] = {{"Wp", total.count_Wp}, {"Wp1", total.count_Wp1},
                                 {"Wp2", total.count_Wp2}, {"gamma_verified", total.gamma_verified}};
  }
  run.emit("csv", csv);
  run.finish(totals);
}

std::int64_t stabilizer_by(const std::string& method, const PairOfQuadrics<ModInt>& v) {
  return method == "scan" ? stabilizer_order_g4_scan(v) : stabilizer_order_fp(v);
}

void cmd_stabilizer(Run& run, const Global& g, const std::string& pair_text, std::int64_t p,
                    const std::string& method, std::uint64_t random) {
  if (random == 0) {
    if (pair_text.empty()) throw CLI::ValidationError("stabilizer-fp", "--pair or --random is required");
    const auto v = reduce_mod(parse_pair(pair_text), p);
    if (!nondegenerate_mod_p(v)) fail(ErrorKind::Degenerate, "pair is degenerate modulo p");
    const std::int64_t s = stabilizer_by(method, v);
    const std::int64_t e4 = pair_four_torsion(v);
    json j;
    j["p"] = p;
    j["method"] = method;
    j["stabilizer_order"] = s;
    j["four_torsion"] = e4;
    j["equal"] = s == e4;
    run.emit("json", j.dump(2) + "\n");
    run.finish({{"stabilizer_order", s}, {"four_torsion", e4}});
    return;
  }
  const CounterRng rng(g.seed);
  std::string csv = "index,pair,stabilizer_order,four_torsion,equal\n";
  std::uint64_t draw = 0, mismatches = 0;
  for (std::uint64_t n = 0; n < random; ++n) {
    PairOfQuadrics<BigInt> v;
    do v = random_pair_mod(rng, draw++, p);
    while (!nondegenerate_mod_p(reduce_mod(v, p)));
    const auto vp = reduce_mod(v, p);
    const std::int64_t s = stabilizer_by(method, vp);
    const std::int64_t e4 = pair_four_torsion(vp);
    mismatches += s != e4;
    csv += std::to_string(n) + "," + serialize_pair(v) + "," + std::to_string(s) + "," + std::to_string(e4) +
           "," + (s == e4 ? "1" : "0") + "\n";
  }
  run.emit("csv", csv);
  run.finish({{"pairs", random}, {"mismatches", mismatches}});
}

void cmd_qp_solve(Run& run, const std::string& pair_text, std::int64_t p, std::optional<int> depth,
                  std::size_t budget) {
  QpOptions o;
  o.depth = depth;
  o.branch_budget = budget;
  const SolubilityVerdict v = qp_soluble(parse_pair(pair_text), p, o);
  const json j = json::parse(v.to_json());
  run.emit("json", j.dump(2) + "\n");
  run.finish({{"verdict", to_string(v.verdict)}});
}

void cmd_selmer_bound(Run& run, const std::string& s2, const std::string& o4, const std::vector<int>& caps,
                      int pointwise) {
  MomentConstraints c;
  c.s2_avg = parse_rational(s2, "--s2-avg");
  c.order4_avg = parse_rational(o4, "--order4-avg");
  if (caps.size() != 2) throw CLI::ValidationError("--caps", "expects two integers");
  c.a_max = caps[0];
  c.b_max = caps[1];
  const LpResult r = solve_extremal_lp(c);
  if (!r.feasible) extremal_bound(c);  // raises Infeasible with the certificate
  json j;
  j["optimum"] = r.optimum.get_str();
  j["optimum_decimal"] = r.optimum.get_d();
  auto dist = json::array();
  for (const auto& e : r.distribution)
    dist.push_back({{"a", e.shape.a}, {"b", e.shape.b}, {"mass", e.mass.get_str()}});
  j["distribution"] = dist;
  j["dual"] = {r.dual[0].get_str(), r.dual[1].get_str(), r.dual[2].get_str()};
  if (pointwise > 0) {
    auto rows = json::array();
    for (const auto& row : pointwise_inequality_table(pointwise))
      rows.push_back({{"a", row.a}, {"lhs", num(row.lhs)}, {"rhs", num(row.rhs)}, {"equality", row.equality()}});
    j["pointwise"] = rows;
    j["pointwise_holds"] = pointwise_inequality_check(pointwise);
  }
  run.emit("json", j.dump(2) + "\n");
  run.finish({{"optimum", r.optimum.get_str()}});
}

// Exact property batch; every row is (identity, checked, failures).
struct IdentityRow {
  std::string name;
  std::uint64_t checked = 0;
  std::uint64_t failures = 0;
};

std::vector<IdentityRow> verify_batch(std::uint64_t n, std::uint64_t seed) {
  const CounterRng rng(seed);
  std::vector<IdentityRow> rows;

  IdentityRow twist{"twist"};
  for (std::uint64_t i = 0; i < n; ++i) {
    const auto v = random_pair_box(rng, 0, i, -5, 5);
    Mat2<BigInt> g2;
    Mat4<BigInt> g4;
    for (int r = 0; r < 2; ++r)
      for (int c = 0; c < 2; ++c) g2[r][c] = static_cast<long>(rng.uniform(100 + 2 * r + c, i, -5, 5));
    for (int r = 0; r < 4; ++r)
      for (int c = 0; c < 4; ++c) g4[r][c] = static_cast<long>(rng.uniform(200 + 4 * r + c, i, -5, 5));
    ++twist.checked;
    twist.failures += !twist_identity_holds(g2, g4, v);
  }
  rows.push_back(twist);

  IdentityRow disc{"discriminant"};
  for (std::uint64_t i = 0; i < n; ++i) {
    const auto v = random_pair_box(rng, 300, i, -5, 5);
    const InvariantPair inv = invariants(v);
    ++disc.checked;
    const bool divisible = mpz_divisible_ui_p(inv.scaled_disc.get_mpz_t(), 27) != 0;
    disc.failures += !divisible || BigInt(inv.scaled_disc / 27) != resultant_discriminant(resolvent_quartic(v));
  }
  rows.push_back(disc);

  IdentityRow weights{"weights"};
  weights.checked = 2;
  weights.failures += coordinate_weight("a11").to_string() != "s1^-1 s2^-6 s3^-2 s4^-2";
  weights.failures += !verify_sibound_products();
  rows.push_back(weights);

  IdentityRow lemma{"lemma34"};
  for (int c = 0; c < 4; ++c)
    for (std::uint64_t i = 0; i < n; ++i) {
      auto v = random_pair_box(rng, 400 + 20 * c, i, -5, 5);
      for (int k : reducibility_patterns()[c]) v.coord(k) = 0;
      ++lemma.checked;
      lemma.failures += is_strongly_irreducible(v);
    }
  rows.push_back(lemma);

  IdentityRow gamma{"gamma_p"};
  for (std::int64_t p : {5, 7})
    for (std::uint64_t i = 0; i < n; ++i) {
      const auto v = sieve_sample(rng, i + (p << 32), 6, p, true);
      const SievePrimeData d = sieve_data(v, p);
      if (!d.inWp2) continue;
      ++gamma.checked;
      gamma.failures += !d.image || discriminant(*d.image) != discriminant(v) || !in_Wp1(*d.image, p);
    }
  rows.push_back(gamma);
  return rows;
}

void cmd_verify(Run& run, const Global& g, std::uint64_t samples, int& status) {
  const auto rows = verify_batch(samples, g.seed);
  std::string csv = "identity,checked,failures\n";
  json totals = json::object();
  bool ok = true;
  for (const auto& r : rows) {
    csv += r.name + "," + std::to_string(r.checked) + "," + std::to_string(r.failures) + "\n";
    totals[r.name] = {{"checked", r.checked}, {"failures", r.failures}};
    ok = ok && r.failures == 0;
  }
  run.emit("csv", csv);
  run.finish(totals);
  if (!ok) status = kDomainError;
}

}  // namespace

int dispatch(const std::vector<std::string>& args, std::ostream& out, std::ostream& err, const EnvLookup& env) {
  CLI::App app{"qpl: pairs of quaternary quadratic forms, invariants, sieves and counts", "qpl"};
  app.require_subcommand(1);
  app.fallthrough();

  Global g;
  g.threads_opt = app.add_option("--threads", g.threads, "worker threads (env QPL_THREADS)");
  g.out_opt = app.add_option("--out-dir", g.out_dir, "output directory, '-' for none (env QPL_OUT_DIR)");
  g.seed_opt = app.add_option("--seed", g.seed, "sampling seed (env QPL_SEED)");

  std::string pair_text;
  auto* inv = app.add_subcommand("invariants", "resolvent and (I, J) of a pair");
  inv->add_option("--pair", pair_text, "20 coordinates a11..a44 b11..b44 (rationals allowed)")->required();

  auto* cls = app.add_subcommand("classify", "strong irreducibility, Lemma 3.4 case, real class");
  cls->add_option("--pair", pair_text, "20 integer coordinates")->required();

  CountIJArgs cij;
  auto* cnt = app.add_subcommand("count-ij", "exact counts of (I, J) with H(I, J) < X");
  cnt->add_option("--X", cij.X, "height bound")->required();
  cnt->add_option("--sign", cij.sign, "+, -, 0 or all")
      ->capture_default_str()
      ->check(CLI::IsMember({"+", "-", "0", "all"}));
  cnt->add_option("--chunk", cij.chunk, "grid cells per chunk (checkpoint granularity)")->capture_default_str();
  cnt->add_option("--resume", cij.resume, "manifest of an interrupted run");

  ScanArgs scan;
  std::uint64_t range_end = 0;
  auto* sb = app.add_subcommand("scan-box", "predicate frequencies over [-M, M]^20");
  sb->add_option("--M", scan.M, "coordinate bound")->capture_default_str();
  sb->add_option("--predicates", scan.predicates, "comma-separated predicate names")
      ->delimiter(',')
      ->capture_default_str();
  sb->add_option("--samples", scan.samples, "0 for an exhaustive scan")->capture_default_str();
  sb->add_option("--range-begin", scan.range_begin, "first box index (exhaustive mode)")->capture_default_str();
  auto* range_end_opt = sb->add_option("--range-end", range_end, "one past the last box index");
  sb->add_option("--chunk", scan.chunk, "items per chunk")->capture_default_str();

  std::string region_file;
  std::vector<std::int64_t> shear;
  int grid = 0;
  auto* dav = app.add_subcommand("davenport", "lattice count versus volume of a region");
  dav->add_option("--region-file", region_file, "region description");
  dav->add_option("--shear", shear, "N k: the shear of [0,N]^2 by (u, v) -> (u + k v, v)")->expected(2);
  dav->add_option("--grid", grid, "grid cells per axis for inexact volumes")->capture_default_str();

  std::int64_t curves_X = 0;
  std::string family_file;
  auto* cur = app.add_subcommand("curves", "minimal curves y^2 = x^3 + Ax + B with H' < X");
  cur->add_option("--X", curves_X, "height bound")->required();
  cur->add_option("--family-file", family_file, "congruence conditions");

  SieveArgs sv;
  auto* sie = app.add_subcommand("sieve-scan", "W_p, W_p^(1), W_p^(2) tallies and gamma_p checks");
  sie->add_option("--p", sv.primes, "primes > 3")->delimiter(',')->capture_default_str();
  sie->add_option("--M", sv.M, "coordinate bound")->capture_default_str();
  sie->add_option("--samples", sv.samples, "pairs per prime")->capture_default_str();
  sie->add_option("--mode", sv.mode, "random or normalized")
      ->capture_default_str()
      ->check(CLI::IsMember({"random", "normalized"}));

  std::int64_t prime = 0;
  std::string method = "resolvent";
  std::uint64_t random_pairs = 0;
  auto* stab = app.add_subcommand("stabilizer-fp", "stabilizer order over F_p versus #E(F_p)[4]");
  stab->add_option("--pair", pair_text, "20 integer coordinates, reduced mod p");
  stab->add_option("--p", prime, "prime")->required();
  stab->add_option("--method", method, "resolvent or scan")
      ->capture_default_str()
      ->check(CLI::IsMember({"resolvent", "scan"}));
  stab->add_option("--random", random_pairs, "number of random nondegenerate pairs instead of --pair");

  int depth = 0;
  std::size_t budget = 200000;
  auto* qp = app.add_subcommand("qp-solve", "three-valued Q_p-solubility by Hensel search");
  qp->add_option("--pair", pair_text, "20 integer coordinates")->required();
  qp->add_option("--p", prime, "prime")->required();
  auto* depth_opt = qp->add_option("--depth", depth, "search depth (default v_p(27 Delta) + 2)");
  qp->add_option("--budget", budget, "branch budget")->capture_default_str();

  std::string s2 = "3", o4 = "4";
  std::vector<int> caps{6, 10};
  int pointwise = 0;
  auto* sel = app.add_subcommand("selmer-bound", "exact LP bound on E[#S2 - 2^a]");
  sel->add_option("--s2-avg", s2, "target E[2^(a+b)]")->capture_default_str();
  sel->add_option("--order4-avg", o4, "target E[(4^a - 2^a) 2^b]")->capture_default_str();
  sel->add_option("--caps", caps, "a_max b_max")->expected(2)->capture_default_str();
  sel->add_option("--pointwise", pointwise, "also tabulate 5*2^a - 8 <= 4^a - 2^a for a = 1..n");

  std::uint64_t verify_samples = 1000;
  auto* ver = app.add_subcommand("verify-identities", "exact property batch; nonzero exit on any violation");
  ver->add_option("--samples", verify_samples, "random instances per identity")->capture_default_str();

  std::vector<std::string> reversed(args.rbegin(), args.rend());
  try {
    app.parse(reversed);
  } catch (const CLI::CallForHelp&) {
    out << app.help();
    return kOk;
  } catch (const CLI::CallForAllHelp&) {
    out << app.help("", CLI::AppFormatMode::All);
    return kOk;
  } catch (const CLI::ParseError& e) {
    err << "usage error: " << e.what() << "\n\n" << app.help("", CLI::AppFormatMode::All);
    return kUsageError;
  }

  CLI::App* sub = app.get_subcommands().front();
  int status = kOk;
  try {
    json sources = resolve(g, env);
    Run run(sub->get_name(), g, std::move(sources), out);
    run.record_params(*sub);
    const std::string name = sub->get_name();
    if (name == "invariants") {
      cmd_invariants(run, pair_text);
    } else if (name == "classify") {
      cmd_classify(run, pair_text);
    } else if (name == "count-ij") {
      cmd_count_ij(run, g, cij);
    } else if (name == "scan-box") {
      if (range_end_opt->count() > 0) scan.range_end = range_end;
      cmd_scan_box(run, g, scan);
    } else if (name == "davenport") {
      cmd_davenport(run, region_file, shear, grid);
    } else if (name == "curves") {
      cmd_curves(run, g, curves_X, family_file);
    } else if (name == "sieve-scan") {
      cmd_sieve_scan(run, g, sv);
    } else if (name == "stabilizer-fp") {
      cmd_stabilizer(run, g, pair_text, prime, method, random_pairs);
    } else if (name == "qp-solve") {
      cmd_qp_solve(run, pair_text, prime, depth_opt->count() ? std::optional<int>(depth) : std::nullopt, budget);
    } else if (name == "selmer-bound") {
      cmd_selmer_bound(run, s2, o4, caps, pointwise);
    } else if (name == "verify-identities") {
      cmd_verify(run, g, verify_samples, status);
    }
  } catch (const CLI::ParseError& e) {
    err << "usage error: " << e.what() << "\n\n" << sub->help();
    return kUsageError;
  } catch (const Error& e) {
    err << "error: " << e.what() << "\n";
    return kDomainError;
  } catch (const std::exception& e) {
    err << "error: " << e.what() << "\n";
    return kDomainError;
  }
  return status;
}

}  // namespace qpl::cli
