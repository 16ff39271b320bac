#include "sslp/cli.hpp"

#include <chrono>
#include <iostream>
#include <sstream>

#include <CLI11.hpp>

#include "sslp/first_stage.hpp"
#include "sslp/random.hpp"
#include "sslp/recourse.hpp"
#include "sslp/reductions.hpp"

namespace sslp {

namespace {

enum class Tag { exact, interval, statistical };

const char* tag_name(Tag t) {
  switch (t) {
    case Tag::exact: return "exact";
    case Tag::interval: return "certified-interval";
    case Tag::statistical: return "statistical";
  }
  return "exact";
}

struct Report {
  Json results = Json::object();
  Json exactness = Json::object();
  Json diagnostics = Json::object();

  void put(const std::string& key, Json value, Tag tag) {
    results[key] = std::move(value);
    exactness[key] = tag_name(tag);
  }
};

[[noreturn]] void wrong_kind(const std::string& command, InstanceKind kind) {
  throw SchemaError("command '" + command + "' does not accept kind '" + to_string(kind) + "'", "/kind");
}

RationalVector split_rationals(const std::string& text, const std::string& pointer) {
  RationalVector out;
  std::stringstream ss(text);
  std::string item;
  while (std::getline(ss, item, ',')) out.push_back(rational_from_json(Json(item), pointer));
  return out;
}

RationalVector first_stage_point(const CliOptions& o, const InstanceFile& inst, std::size_t n1) {
  RationalVector x;
  std::string pointer = "/metadata/x";
  if (o.x) {
    pointer = "--x";
    x = split_rationals(*o.x, pointer);
  } else if (auto it = inst.metadata.find("x"); it != inst.metadata.end()) {
    if (it->is_array()) {
      for (std::size_t i = 0; i < it->size(); ++i) x.push_back(rational_from_json((*it)[i], pointer + "/" + std::to_string(i)));
    } else {
      x.push_back(rational_from_json(*it, pointer));
    }
  } else {
    throw SchemaError("a first-stage point is required (--x or metadata.x)", pointer);
  }
  if (x.size() != n1) throw SchemaError("first-stage point needs " + std::to_string(n1) + " entries", pointer);
  return x;
}

const RationalVector& require_b(const IntegerInstance& s) {
  if (!s.b) throw SchemaError("integer-system needs a right-hand side b for this command", "/payload/b");
  return *s.b;
}

std::vector<long> integer_b(const IntegerInstance& s) {
  const RationalVector& b = require_b(s);
  std::vector<long> out;
  for (std::size_t i = 0; i < b.size(); ++i) {
    if (b[i].get_den() != 1 || !b[i].get_num().fits_slong_p()) {
      throw SchemaError("this command needs an integer b", "/payload/b/" + std::to_string(i));
    }
    out.push_back(b[i].get_num().get_si());
  }
  return out;
}

HPolytope integer_polytope(const IntegerInstance& s) {
  const RationalVector& b = require_b(s);
  HPolytope p = HPolytope::unit_cube(s.system.cols());
  for (std::size_t i = 0; i < s.system.rows(); ++i) {
    p.rows.push_back({RationalVector(s.system.A[i].begin(), s.system.A[i].end()), b[i]});
  }
  return p;
}

/// 1, xi_i and xi_i xi_j (i <= j).
std::vector<Polynomial> moment_integrands(std::size_t d) {
  std::vector<Polynomial> out{Polynomial::constant(d, Rational(1))};
  for (std::size_t i = 0; i < d; ++i) out.push_back(Polynomial::variable(d, i));
  for (std::size_t i = 0; i < d; ++i)
    for (std::size_t j = i; j < d; ++j) out.push_back(Polynomial::variable(d, i) * Polynomial::variable(d, j));
  return out;
}

void check_graph_size(const Graph& g, const CliOptions& o) {
  if (g.n > o.max_n) {
    throw UnsupportedError("graph has n = " + std::to_string(g.n) + " > --max-n = " + std::to_string(o.max_n));
  }
}

mpfr_prec_t precision_for(const Graph& g, const CliOptions& o) {
  if (o.precision_bits) {
    if (*o.precision_bits < 16) throw InvalidArgumentError("--precision-bits must be at least 16");
    return static_cast<mpfr_prec_t>(*o.precision_bits);
  }
  return default_precision(g.n);
}

int rational_bits_for(int n, const CliOptions& o) { return o.rational_bits > 0 ? o.rational_bits : 4 * n + 40; }

IntegrationBackend backend_of(const std::string& name) {
  if (name == "automatic") return IntegrationBackend::automatic;
  if (name == "volume-dp") return IntegrationBackend::volume_dp;
  if (name == "triangulation") return IntegrationBackend::triangulation;
  throw InvalidArgumentError("unknown backend '" + name + "'");
}

const StochasticProgram& loaded_program(const InstanceFile& inst) {
  const auto& sp = std::get<StochasticProgram>(inst.payload);
  sp.validate();
  sp.certify_first_stage();
  return sp;
}

void run_volume(const CliOptions&, const InstanceFile& inst, Report& r) {
  if (inst.kind() == InstanceKind::integer_system) {
    const auto& s = std::get<IntegerInstance>(inst.payload);
    VolumeTables tables(s.system);
    r.put("volume", to_json(tables.volume(require_b(s))), Tag::exact);
    r.diagnostics["norm_inf"] = s.system.norm_inf();
    r.diagnostics["fitted_chambers"] = tables.fitted_chambers();
    r.diagnostics["shortcut_chambers"] = tables.shortcut_chambers();
  } else if (inst.kind() == InstanceKind::polytope) {
    r.put("volume", to_json(lasserre_volume(std::get<HPolytope>(inst.payload))), Tag::exact);
  } else {
    wrong_kind("volume", inst.kind());
  }
}

void run_moments(const CliOptions&, const InstanceFile& inst, Report& r) {
  std::size_t d = 0;
  std::vector<Rational> m;
  if (inst.kind() == InstanceKind::integer_system) {
    const auto& s = std::get<IntegerInstance>(inst.payload);
    d = s.system.cols();
    m = quad_moments(s.system, require_b(s), moment_integrands(d));
    r.diagnostics["norm_inf"] = s.system.norm_inf();
  } else if (inst.kind() == InstanceKind::polytope) {
    const auto& p = std::get<HPolytope>(inst.payload);
    d = p.dim;
    m = integrate_triangulated(p, moment_integrands(d));
  } else {
    wrong_kind("moments", inst.kind());
  }
  r.put("volume", to_json(m[0]), Tag::exact);
  r.put("first", to_json(RationalVector(m.begin() + 1, m.begin() + 1 + static_cast<long>(d))), Tag::exact);
  std::vector<RationalVector> second(d, RationalVector(d));
  std::size_t k = 1 + d;
  for (std::size_t i = 0; i < d; ++i)
    for (std::size_t j = i; j < d; ++j) second[i][j] = second[j][i] = m[k++];
  Json s = Json::array();
  for (const auto& row : second) s.push_back(to_json(row));
  r.put("second", s, Tag::exact);
}

void run_expected_recourse(const CliOptions& o, const InstanceFile& inst, Report& r) {
  if (inst.kind() != InstanceKind::sslp) wrong_kind("expected-recourse", inst.kind());
  const StochasticProgram& sp = loaded_program(inst);
  const RationalVector x = first_stage_point(o, inst, sp.n1);
  if (!sp.first_stage_feasible(x)) throw InvalidArgumentError("x violates the first-stage constraints");
  RecourseOptions ro;
  ro.backend = backend_of(o.backend);
  ro.seed = o.seed;
  const RecourseEvaluation e = evaluate_recourse(sp, x, ro);
  r.put("x", to_json(x), Tag::exact);
  r.put("expected_recourse", to_json(e.value), Tag::exact);
  r.put("subgradient", to_json(e.subgradient), Tag::exact);
  r.put("coverage_deficit", to_json(e.coverage_deficit), Tag::exact);
  r.diagnostics["bases"] = e.bases;
  r.diagnostics["cells"] = e.cells;
  r.diagnostics["classes"] = e.classes;
  r.diagnostics["regions"] = e.regions;
  r.diagnostics["scaled_norm_inf"] = e.scaled_norm.get_str();
  r.diagnostics["coverage_residual"] = to_string(e.coverage_deficit);
}

void run_solve(const CliOptions& o, const InstanceFile& inst, Report& r) {
  if (inst.kind() != InstanceKind::sslp) wrong_kind("solve", inst.kind());
  const StochasticProgram& sp = loaded_program(inst);
  const Rational eps = rational_from_json(Json(o.epsilon), "--epsilon");
  if (sgn(eps) <= 0) throw InvalidArgumentError("--epsilon must be positive");
  const FirstStageSolution s = solve_first_stage(sp, eps);
  r.put("x", to_json(s.x), Tag::exact);
  r.put("value", to_json(s.value), Tag::exact);
  r.put("gap", to_json(s.gap), Tag::exact);
  r.diagnostics["iterations"] = s.iterations;
}

void run_count_is(const CliOptions& o, const InstanceFile& inst, Report& r) {
  if (inst.kind() != InstanceKind::graph) wrong_kind("count-is", inst.kind());
  const Graph& g = std::get<Graph>(inst.payload);
  check_graph_size(g, o);
  if (o.mode != "area" && o.mode != "brute" && o.mode != "both") throw InvalidArgumentError("unknown --mode '" + o.mode + "'");
  std::uint64_t count = 0;
  if (o.mode != "brute") count = count_is(g, CountMode::area, o.max_n);
  if (o.mode != "area") {
    const std::uint64_t brute = count_is(g, CountMode::brute, o.max_n);
    if (o.mode == "both" && brute != count) {
      throw InternalConsistencyError("count-is: area count " + std::to_string(count) + " != brute force " +
                                     std::to_string(brute));
    }
    if (o.mode == "both") r.put("count_brute", brute, Tag::exact);
    count = brute;
  }
  r.put("count", count, Tag::exact);
}

void run_gadget_area(const CliOptions& o, const InstanceFile& inst, Report& r) {
  if (inst.kind() != InstanceKind::graph) wrong_kind("gadget-area", inst.kind());
  const Graph& g = std::get<Graph>(inst.payload);
  check_graph_size(g, o);
  const mpfr_prec_t bits = precision_for(g, o);
  const Gadget gadget = build_gadget(g, bits);
  const std::vector<long> cut = cut_vertices(g, bits);
  std::string bitmap(static_cast<std::size_t>(1) << g.n, '0');
  for (long l : cut) bitmap[static_cast<std::size_t>(l)] = '1';
  r.put("area", to_json(area_via_gadget(g, bits)), Tag::interval);
  r.put("delta", to_json(gadget.delta), Tag::interval);
  r.put("cut_bitmap", bitmap, Tag::exact);
  r.put("cut_count", cut.size(), Tag::exact);
  r.put("count", (std::uint64_t{1} << g.n) - cut.size(), Tag::exact);
  r.diagnostics["precision_bits"] = bits;
}

void run_reduce_volume(const CliOptions& o, const InstanceFile& inst, Report& r) {
  if (inst.kind() != InstanceKind::integer_system) wrong_kind("reduce-volume", inst.kind());
  const auto& s = std::get<IntegerInstance>(inst.payload);
  const std::vector<long> b = integer_b(s);
  Rational x(1, 2);
  if (o.x) {
    const RationalVector xs = split_rationals(*o.x, "--x");
    if (xs.size() != 1) throw SchemaError("reduce-volume takes a single x", "--x");
    x = xs[0];
  }
  const RecourseVolume rv = volume_via_recourse_detailed(s.system, b, x);
  r.put("volume", to_json(rv.volume), Tag::exact);
  r.put("p", to_json(rv.p), Tag::exact);
  r.put("range", to_json(rv.range), Tag::exact);
  r.put("volume_dp", to_json(volume_dp(s.system, require_b(s))), Tag::exact);
  r.diagnostics["samples"] = to_json(rv.samples);
  r.diagnostics["p_degree"] = rv.p.total_degree();
}

void run_bisect(const CliOptions& o, const InstanceFile& inst, Report& r) {
  if (inst.kind() != InstanceKind::graph) wrong_kind("bisect-expectation", inst.kind());
  const Graph& g = std::get<Graph>(inst.payload);
  check_graph_size(g, o);
  BisectionResult b;
  if (o.oracle == "envelope") {
    b = bisection_expectation(g, envelope_oracle(g));
  } else if (o.oracle == "program") {
    const GraphProgram gp = sslp_from_graph(g, rational_bits_for(g.n, o));
    const Rational pert = program_perturbation(gp);
    b = bisection_expectation(g, program_oracle(gp), pert);
    r.diagnostics["rounding_radius"] = to_string(gp.rounding_radius);
    r.diagnostics["terminal_margin"] = to_string(gp.terminal_margin);
    r.diagnostics["perturbation"] = to_string(pert);
  } else {
    throw InvalidArgumentError("unknown --oracle '" + o.oracle + "'");
  }
  r.put("interval", to_json(b.interval), Tag::interval);
  r.put("calls", b.calls, Tag::exact);
  r.put("call_bound", 3 * g.n - 3, Tag::exact);
  r.put("bracket_held", b.bracket_held, Tag::exact);
  r.put("envelope_expectation", to_json(envelope_expectation(g, precision_for(g, o))), Tag::interval);
}

void run_mc_check(const CliOptions& o, const InstanceFile& inst, Report& r) {
  if (o.samples == 0) throw InvalidArgumentError("--samples must be positive");
  Rational exact, estimate, stderr_bound;
  if (inst.kind() == InstanceKind::sslp) {
    const StochasticProgram& sp = loaded_program(inst);
    const RationalVector x = first_stage_point(o, inst, sp.n1);
    if (!sp.first_stage_feasible(x)) throw InvalidArgumentError("x violates the first-stage constraints");
    RecourseOptions ro;
    ro.seed = o.seed;
    exact = expected_recourse(sp, x, ro);
    const McRecourse mc = mc_expected_recourse(sp, x, o.samples, o.seed);
    estimate = mc.estimate;
    stderr_bound = mc.stderr_bound;
  } else if (inst.kind() == InstanceKind::polytope || inst.kind() == InstanceKind::integer_system) {
    HPolytope p;
    if (inst.kind() == InstanceKind::polytope) {
      p = std::get<HPolytope>(inst.payload);
      exact = lasserre_volume(p);
    } else {
      const auto& s = std::get<IntegerInstance>(inst.payload);
      p = integer_polytope(s);
      exact = volume_dp(s.system, require_b(s));
    }
    const McEstimate mc = mc_volume(p, o.samples, o.seed);
    estimate = mc.estimate;
    stderr_bound = mc.stderr_bound;
  } else {
    wrong_kind("mc-check", inst.kind());
  }
  const Rational diff = abs(exact - estimate);
  r.put("exact", to_json(exact), Tag::exact);
  r.put("estimate", to_json(estimate), Tag::statistical);
  r.put("stderr", to_json(stderr_bound), Tag::statistical);
  r.put("abs_error", to_json(diff), Tag::statistical);
  r.put("within_4_stderr", diff <= 4 * stderr_bound, Tag::statistical);
  r.diagnostics["samples"] = o.samples;
}

Graph erdos_renyi(SplitMix64& rng, int n, const Rational& p) {
  Graph g;
  g.n = n;
  for (int i = 1; i <= n; ++i)
    for (int j = i + 1; j <= n; ++j)
      if (rng.unit_dyadic() < p) g.edges.push_back({i, j});
  g.validate();
  return g;
}

void put_error(Json& e, const Error& err) {
  if (const auto* s = dynamic_cast<const SchemaError*>(&err)) {
    e["reason"] = "schema-violation";
    e["pointer"] = s->pointer();
  } else if (dynamic_cast<const MalformedInputError*>(&err)) {
    e["reason"] = "malformed-json";
  } else if (const auto* ri = dynamic_cast<const RecourseIncompleteError*>(&err)) {
    e["reason"] = "recourse-incomplete";
    e["coverage_deficit"] = ri->deficit();
    e["witness"] = ri->witness();
  } else if (dynamic_cast<const UnboundedRecourseError*>(&err)) {
    e["reason"] = "recourse-unbounded";
  } else if (const auto* nc = dynamic_cast<const NonConvergenceError*>(&err)) {
    e["reason"] = "non-convergence";
    e["gap"] = nc->gap();
  } else if (dynamic_cast<const UnsupportedError*>(&err)) {
    e["reason"] = "unsupported";
  } else if (dynamic_cast<const PrecisionError*>(&err)) {
    e["reason"] = "precision-exhausted";
  } else if (dynamic_cast<const ProtocolError*>(&err)) {
    e["reason"] = "oracle-protocol";
  } else if (dynamic_cast<const InternalConsistencyError*>(&err)) {
    e["reason"] = "internal-consistency";
  } else if (dynamic_cast<const IllPosedError*>(&err)) {
    e["reason"] = "ill-posed";
  } else {
    e["reason"] = "invalid-argument";
  }
  e["message"] = err.what();
}

int exit_code_of(const Error& err) {
  if (dynamic_cast<const MalformedInputError*>(&err)) return exit_malformed;
  if (dynamic_cast<const SchemaError*>(&err)) return exit_schema;
  return exit_domain;
}

}  // namespace

Json execute(const CliOptions& o, const InstanceFile& inst) {
  using Runner = void (*)(const CliOptions&, const InstanceFile&, Report&);
  static const std::map<std::string, Runner> runners{
      {"volume", run_volume},
      {"moments", run_moments},
      {"expected-recourse", run_expected_recourse},
      {"solve", run_solve},
      {"count-is", run_count_is},
      {"gadget-area", run_gadget_area},
      {"reduce-volume", run_reduce_volume},
      {"bisect-expectation", run_bisect},
      {"mc-check", run_mc_check},
  };
  auto it = runners.find(o.command);
  if (it == runners.end()) throw InvalidArgumentError("command '" + o.command + "' takes no instance");
  Report r;
  const auto start = std::chrono::steady_clock::now();
  it->second(o, inst, r);
  if (o.timings) {
    r.diagnostics["seconds"] = std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();
  }
  Json flags{{"seed", o.seed}, {"threads", o.threads}, {"max_n", o.max_n}};
  if (o.precision_bits) flags["precision_bits"] = *o.precision_bits;
  return Json{{"command", o.command},
              {"inputs", {{"kind", to_string(inst.kind())}, {"digest", instance_digest(inst)}}},
              {"flags", flags},
              {"results", r.results},
              {"exactness", r.exactness},
              {"diagnostics", r.diagnostics}};
}

InstanceFile generate(const CliOptions& o) {
  SplitMix64 rng(o.seed);
  InstanceFile out;
  out.metadata = Json{{"generator", o.type}, {"seed", o.seed}};
  if (o.type == "graph" || o.type == "graph-sslp") {
    if (o.n < 2 || o.n > 30) throw InvalidArgumentError("--n must lie in 2..30");
    const Rational p = rational_from_json(Json(o.edge_probability), "--edge-probability");
    if (p < 0 || p > 1) throw InvalidArgumentError("--edge-probability must lie in [0, 1]");
    const Graph g = erdos_renyi(rng, o.n, p);
    out.metadata["edge_probability"] = to_string(p);
    if (o.type == "graph") {
      out.payload = g;
    } else {
      const int bits = rational_bits_for(g.n, o);
      const GraphProgram gp = sslp_from_graph(g, bits);
      out.payload = gp.program;
      out.metadata["graph"] = to_json(g);
      out.metadata["rational_bits"] = bits;
      out.metadata["rounding_radius"] = to_string(gp.rounding_radius);
      out.metadata["terminal_margin"] = to_string(gp.terminal_margin);
      out.metadata["formulation_rows"] = gp.formulation_rows;
    }
  } else if (o.type == "integer-system") {
    if (o.m == 0 || o.d == 0 || o.bound < 1) throw InvalidArgumentError("need --m, --d >= 1 and --bound >= 1");
    IntegerInstance s;
    s.system.A.assign(o.m, IntegerVector(o.d));
    bool nonzero = false;
    for (auto& row : s.system.A)
      for (auto& v : row) {
        v = static_cast<long>(rng.below(static_cast<std::uint64_t>(2 * o.bound + 1))) - o.bound;
        nonzero = nonzero || v != 0;
      }
    if (!nonzero) s.system.A[0][0] = 1;
    // b between the row minimum and maximum over the cube.
    s.b.emplace();
    for (const auto& row : s.system.A) {
      long lo = 0, hi = 0;
      for (long v : row) (v < 0 ? lo : hi) += v;
      s.b->push_back(Rational(lo + static_cast<long>(rng.below(static_cast<std::uint64_t>(hi - lo + 1)))));
    }
    out.metadata["bound"] = o.bound;
    out.payload = std::move(s);
  } else if (o.type == "newsvendor") {
    out.payload = newsvendor(rational_from_json(Json(o.cost), "--cost"));
  } else {
    throw InvalidArgumentError("unknown --type '" + o.type + "'");
  }
  return out;
}

int run_cli(int argc, const char* const* argv, std::istream& in, std::ostream& out, std::ostream& err) {
  CliOptions o;
  CLI::App app{"Exact two-stage stochastic LP and reduction toolkit"};
  app.add_option("command", o.command, "command to run")
      ->required()
      ->check(CLI::IsMember({"volume", "moments", "expected-recourse", "solve", "count-is", "gadget-area",
                             "reduce-volume", "bisect-expectation", "mc-check", "generate"}));
  app.add_option("instance", o.instance, "instance JSON file, '-' for stdin");
  app.add_option("--seed", o.seed, "seed for every random choice");
  app.add_option("--threads", o.threads, "worker-count hint")->check(CLI::PositiveNumber);
  app.add_option("--precision-bits", o.precision_bits, "interval precision for gadget commands");
  app.add_option("--max-n", o.max_n, "largest graph accepted by gadget commands");
  app.add_option("--x", o.x, "first-stage point, comma-separated rationals");
  app.add_option("--epsilon", o.epsilon, "optimality tolerance for solve");
  app.add_option("--samples", o.samples, "Monte Carlo samples for mc-check");
  app.add_option("--mode", o.mode, "count-is: area | brute | both");
  app.add_option("--oracle", o.oracle, "bisect-expectation: envelope | program");
  app.add_option("--backend", o.backend, "expected-recourse: automatic | volume-dp | triangulation");
  app.add_option("--rational-bits", o.rational_bits, "dyadic precision of the gadget program");
  app.add_flag("--timings", o.timings, "add wall-clock timings to diagnostics");
  app.add_option("--type", o.type, "generate: graph | integer-system | newsvendor | graph-sslp");
  app.add_option("--n", o.n, "generate: number of vertices");
  app.add_option("--edge-probability", o.edge_probability, "generate: edge probability");
  app.add_option("--m", o.m, "generate: rows of A");
  app.add_option("--d", o.d, "generate: columns of A");
  app.add_option("--bound", o.bound, "generate: largest |A_ij|");
  app.add_option("--cost", o.cost, "generate: newsvendor cost c");
  try {
    app.parse(argc, argv);
  } catch (const CLI::CallForHelp&) {
    out << app.help();
    return exit_ok;
  } catch (const CLI::ParseError& e) {
    out << Json{{"error", {{"exit_code", exit_schema}, {"reason", "usage"}, {"message", e.what()}}}}.dump(2) << "\n";
    err << "usage error: " << e.what() << "\n";
    return exit_schema;
  }

  try {
    if (o.command == "generate") {
      out << to_json(generate(o)).dump(2) << "\n";
      return exit_ok;
    }
    const InstanceFile inst = o.instance == "-" ? parse_instance(in) : parse_instance(o.instance);
    out << execute(o, inst).dump(2) << "\n";
    return exit_ok;
  } catch (const Error& e) {
    const int code = exit_code_of(e);
    Json body{{"exit_code", code}, {"command", o.command}};
    put_error(body, e);
    out << Json{{"error", body}}.dump(2) << "\n";
    err << "error: " << e.what() << "\n";
    return code;
  }
}

}  // namespace sslp
