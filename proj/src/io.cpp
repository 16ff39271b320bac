#include "sslp/io.hpp"

#include <cstdio>
#include <fstream>
#include <iostream>
#include <limits>
#include <set>
#include <sstream>

namespace sslp {

namespace {

std::string child(const std::string& pointer, std::string_view key) {
  std::string out = pointer + "/";
  for (char ch : key) {
    if (ch == '~') out += "~0";
    else if (ch == '/') out += "~1";
    else out += ch;
  }
  return out;
}

std::string child(const std::string& pointer, std::size_t index) { return pointer + "/" + std::to_string(index); }

[[noreturn]] void fail(const std::string& pointer, const std::string& what) {
  throw SchemaError(what + " at '" + (pointer.empty() ? "/" : pointer) + "'", pointer);
}

const Json& field(const Json& j, const std::string& pointer, const char* key) {
  if (!j.is_object()) fail(pointer, "expected an object");
  auto it = j.find(key);
  if (it == j.end()) fail(child(pointer, key), std::string("missing field '") + key + "'");
  return *it;
}

const Json* optional_field(const Json& j, const char* key) {
  auto it = j.find(key);
  return it == j.end() || it->is_null() ? nullptr : &*it;
}

long integer_from_json(const Json& v, const std::string& pointer) {
  if (v.is_number_integer()) {
    if (v.is_number_unsigned() && v.get<std::uint64_t>() > static_cast<std::uint64_t>(std::numeric_limits<long>::max())) {
      fail(pointer, "integer out of range");
    }
    return v.get<long>();
  }
  const Rational r = rational_from_json(v, pointer);
  if (r.get_den() != 1 || !r.get_num().fits_slong_p()) fail(pointer, "expected an integer");
  return r.get_num().get_si();
}

std::size_t positive_size(const Json& j, const std::string& pointer, const char* key) {
  const long v = integer_from_json(field(j, pointer, key), child(pointer, key));
  if (v <= 0) fail(child(pointer, key), std::string("'") + key + "' must be positive");
  return static_cast<std::size_t>(v);
}

const Json& array_of(const Json& v, const std::string& pointer, std::optional<std::size_t> size) {
  if (!v.is_array()) fail(pointer, "expected an array");
  if (size && v.size() != *size) {
    fail(pointer, "expected " + std::to_string(*size) + " entries, found " + std::to_string(v.size()));
  }
  return v;
}

RationalVector vector_from_json(const Json& v, const std::string& pointer, std::optional<std::size_t> size) {
  array_of(v, pointer, size);
  RationalVector out;
  out.reserve(v.size());
  for (std::size_t i = 0; i < v.size(); ++i) out.push_back(rational_from_json(v[i], child(pointer, i)));
  return out;
}

RationalMatrix matrix_from_json(const Json& v, const std::string& pointer, std::size_t rows, std::size_t cols) {
  array_of(v, pointer, rows);
  RationalMatrix out;
  for (std::size_t i = 0; i < rows; ++i) out.push_back(vector_from_json(v[i], child(pointer, i), cols));
  return out;
}

Json matrix_json(const RationalMatrix& m) {
  Json out = Json::array();
  for (const auto& row : m) out.push_back(to_json(row));
  return out;
}

const char* const kind_names[] = {"graph", "polytope", "integer-system", "sslp"};

}  // namespace

const char* to_string(InstanceKind kind) { return kind_names[static_cast<int>(kind)]; }

Rational rational_from_json(const Json& value, const std::string& pointer) {
  if (value.is_number_integer()) {
    if (value.is_number_unsigned()) return Rational(Integer(std::to_string(value.get<std::uint64_t>())));
    return Rational(Integer(std::to_string(value.get<std::int64_t>())));
  }
  if (value.is_number_float()) fail(pointer, "decimal numbers are not exact; write \"p/q\"");
  if (value.is_string()) {
    try {
      return parse_rational(value.get<std::string>());
    } catch (const InvalidArgumentError& e) {
      fail(pointer, e.what());
    }
  }
  if (value.is_object()) {
    const Rational num = rational_from_json(field(value, pointer, "numerator"), child(pointer, "numerator"));
    const Rational den = rational_from_json(field(value, pointer, "denominator"), child(pointer, "denominator"));
    if (num.get_den() != 1) fail(child(pointer, "numerator"), "numerator must be an integer");
    if (den.get_den() != 1) fail(child(pointer, "denominator"), "denominator must be an integer");
    if (sgn(den) <= 0) fail(child(pointer, "denominator"), "denominator must be positive");
    Rational r(num.get_num(), den.get_num());
    r.canonicalize();
    return r;
  }
  fail(pointer, "expected a rational");
}

Json to_json(const Rational& value) { return to_string(value); }

Json to_json(const IntervalScalar& value) {
  return Json{{"lo", value.lower_string()}, {"hi", value.upper_string()}, {"bits", value.precision()}};
}

Json to_json(const Polynomial& value) {
  Json out = Json::array();
  for (const auto& [e, c] : value.terms()) out.push_back(Json{{"exponents", e}, {"coeff", to_string(c)}});
  return out;
}

Json to_json(const RationalVector& values) {
  Json out = Json::array();
  for (const Rational& v : values) out.push_back(to_string(v));
  return out;
}

Json to_json(const Graph& g) {
  Json edges = Json::array();
  for (const Edge& e : g.edges) edges.push_back({e.i, e.j});
  return Json{{"n", g.n}, {"edges", edges}};
}

Json to_json(const HPolytope& p) {
  Json rows = Json::array();
  for (const HalfSpace& h : p.rows) rows.push_back(Json{{"a", to_json(h.a)}, {"rhs", to_string(h.rhs)}});
  Json out{{"dim", p.dim}, {"rows", rows}};
  if (p.box) out["box"] = Json{{"lower", to_json(p.box->lower)}, {"upper", to_json(p.box->upper)}};
  return out;
}

Json to_json(const IntegerInstance& s) {
  Json out{{"A", s.system.A}};
  if (s.b) out["b"] = to_json(*s.b);
  return out;
}

Json to_json(const StochasticProgram& sp) {
  Json tk = Json::array();
  for (const auto& t : sp.Tk) tk.push_back(matrix_json(t));
  return Json{{"n1", sp.n1},         {"m1", sp.m1},         {"n2", sp.n2},   {"m2", sp.m2},
              {"d", sp.d},           {"c", to_json(sp.c)},  {"A", matrix_json(sp.A)},
              {"b", to_json(sp.b)},  {"W", matrix_json(sp.W)}, {"q0", to_json(sp.q0)},
              {"Qmat", matrix_json(sp.Qmat)}, {"T0", matrix_json(sp.T0)}, {"Tk", tk},
              {"h0", to_json(sp.h0)}, {"Hmat", matrix_json(sp.Hmat)}, {"l", to_json(sp.l)},
              {"u", to_json(sp.u)}};
}

Json to_json(const InstanceFile& instance) {
  Json payload = std::visit([](const auto& p) { return to_json(p); }, instance.payload);
  return Json{{"kind", to_string(instance.kind())}, {"payload", payload}, {"metadata", instance.metadata}};
}

Graph graph_from_json(const Json& j, const std::string& pointer) {
  Graph g;
  const long n = integer_from_json(field(j, pointer, "n"), child(pointer, "n"));
  if (n < 2 || n > 30) fail(child(pointer, "n"), "n must lie in 2..30");
  g.n = static_cast<int>(n);
  const std::string ep = child(pointer, "edges");
  const Json& edges = array_of(field(j, pointer, "edges"), ep, std::nullopt);
  std::set<Edge> seen;
  for (std::size_t k = 0; k < edges.size(); ++k) {
    const std::string p = child(ep, k);
    array_of(edges[k], p, 2);
    int ends[2];
    for (std::size_t s = 0; s < 2; ++s) {
      const long v = integer_from_json(edges[k][s], child(p, s));
      if (v < 1 || v > n) fail(child(p, s), "edge endpoint outside 1..n");
      ends[s] = static_cast<int>(v);
    }
    if (ends[0] == ends[1]) fail(p, "loops are not allowed");
    Edge e{std::min(ends[0], ends[1]), std::max(ends[0], ends[1])};
    if (!seen.insert(e).second) fail(p, "duplicate edge");
    g.edges.push_back(e);
  }
  return g;
}

HPolytope polytope_from_json(const Json& j, const std::string& pointer) {
  HPolytope p;
  p.dim = positive_size(j, pointer, "dim");
  const std::string rp = child(pointer, "rows");
  const Json& rows = array_of(field(j, pointer, "rows"), rp, std::nullopt);
  for (std::size_t i = 0; i < rows.size(); ++i) {
    const std::string p_i = child(rp, i);
    RationalVector a = vector_from_json(field(rows[i], p_i, "a"), child(p_i, "a"), p.dim);
    Rational rhs = rational_from_json(field(rows[i], p_i, "rhs"), child(p_i, "rhs"));
    p.rows.push_back({std::move(a), std::move(rhs)});
  }
  if (const Json* box = j.is_object() ? optional_field(j, "box") : nullptr) {
    const std::string bp = child(pointer, "box");
    Box b;
    b.lower = vector_from_json(field(*box, bp, "lower"), child(bp, "lower"), p.dim);
    b.upper = vector_from_json(field(*box, bp, "upper"), child(bp, "upper"), p.dim);
    for (std::size_t i = 0; i < p.dim; ++i) {
      if (!(b.lower[i] < b.upper[i])) fail(child(child(bp, "upper"), i), "box requires lower < upper");
    }
    p.box = std::move(b);
  }
  return p;
}

IntegerInstance integer_instance_from_json(const Json& j, const std::string& pointer) {
  IntegerInstance s;
  const std::string ap = child(pointer, "A");
  const Json& a = array_of(field(j, pointer, "A"), ap, std::nullopt);
  if (a.empty()) fail(ap, "A needs at least one row");
  std::optional<std::size_t> cols;
  for (std::size_t i = 0; i < a.size(); ++i) {
    const std::string rp = child(ap, i);
    array_of(a[i], rp, cols);
    if (a[i].empty()) fail(rp, "A needs at least one column");
    cols = a[i].size();
    IntegerVector row;
    for (std::size_t k = 0; k < a[i].size(); ++k) row.push_back(integer_from_json(a[i][k], child(rp, k)));
    s.system.A.push_back(std::move(row));
  }
  if (const Json* b = optional_field(j, "b")) s.b = vector_from_json(*b, child(pointer, "b"), a.size());
  return s;
}

StochasticProgram sslp_from_json(const Json& j, const std::string& pointer) {
  StochasticProgram sp;
  sp.n1 = positive_size(j, pointer, "n1");
  sp.m1 = positive_size(j, pointer, "m1");
  sp.n2 = positive_size(j, pointer, "n2");
  sp.m2 = positive_size(j, pointer, "m2");
  sp.d = positive_size(j, pointer, "d");
  auto vec = [&](const char* key, std::size_t n) { return vector_from_json(field(j, pointer, key), child(pointer, key), n); };
  auto mat = [&](const char* key, std::size_t r, std::size_t c) {
    return matrix_from_json(field(j, pointer, key), child(pointer, key), r, c);
  };
  sp.c = vec("c", sp.n1);
  sp.A = mat("A", sp.m1, sp.n1);
  sp.b = vec("b", sp.m1);
  sp.W = mat("W", sp.m2, sp.n2);
  sp.q0 = vec("q0", sp.n2);
  sp.Qmat = mat("Qmat", sp.n2, sp.d);
  sp.T0 = mat("T0", sp.m2, sp.n1);
  const std::string tp = child(pointer, "Tk");
  const Json& tk = array_of(field(j, pointer, "Tk"), tp, sp.d);
  for (std::size_t k = 0; k < sp.d; ++k) sp.Tk.push_back(matrix_from_json(tk[k], child(tp, k), sp.m2, sp.n1));
  sp.h0 = vec("h0", sp.m2);
  sp.Hmat = mat("Hmat", sp.m2, sp.d);
  sp.l = vec("l", sp.d);
  sp.u = vec("u", sp.d);
  for (std::size_t k = 0; k < sp.d; ++k) {
    if (!(sp.l[k] < sp.u[k])) fail(child(child(pointer, "u"), k), "need l < u");
  }
  if (sp.m2 > sp.n2) fail(child(pointer, "m2"), "W needs at least as many columns as rows");
  return sp;
}

InstanceFile instance_from_json(const Json& j) {
  if (!j.is_object()) fail("", "instance must be an object");
  const Json& kind = field(j, "", "kind");
  if (!kind.is_string()) fail("/kind", "kind must be a string");
  InstanceFile out;
  const std::string k = kind.get<std::string>();
  const Json& payload = field(j, "", "payload");
  if (k == "graph") out.payload = graph_from_json(payload, "/payload");
  else if (k == "polytope") out.payload = polytope_from_json(payload, "/payload");
  else if (k == "integer-system") out.payload = integer_instance_from_json(payload, "/payload");
  else if (k == "sslp") out.payload = sslp_from_json(payload, "/payload");
  else fail("/kind", "unknown kind '" + k + "'");
  if (const Json* meta = optional_field(j, "metadata")) {
    if (!meta->is_object()) fail("/metadata", "metadata must be an object");
    out.metadata = *meta;
  }
  return out;
}

InstanceFile parse_instance(std::istream& in) {
  Json j;
  try {
    j = Json::parse(in);
  } catch (const Json::parse_error& e) {
    throw MalformedInputError(std::string("malformed JSON: ") + e.what());
  }
  return instance_from_json(j);
}

InstanceFile parse_instance(const std::string& path) {
  if (path == "-") return parse_instance(std::cin);
  std::ifstream f(path, std::ios::binary);
  if (!f) throw MalformedInputError("cannot read '" + path + "'");
  return parse_instance(f);
}

std::uint64_t fnv1a64(std::string_view bytes) {
  std::uint64_t h = 0xcbf29ce484222325ULL;
  for (unsigned char ch : bytes) {
    h ^= ch;
    h *= 0x100000001b3ULL;
  }
  return h;
}

std::string instance_digest(const InstanceFile& instance) {
  char buf[17];
  std::snprintf(buf, sizeof buf, "%016llx", static_cast<unsigned long long>(fnv1a64(to_json(instance).dump())));
  return std::string("fnv1a64:") + buf;
}

}  // namespace sslp
