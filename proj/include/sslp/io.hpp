#pragma once

#include <cstdint>
#include <iosfwd>
#include <optional>
#include <string>
#include <string_view>
#include <variant>

#include <json.hpp>

#include "sslp/errors.hpp"
#include "sslp/gadget.hpp"
#include "sslp/polytope.hpp"
#include "sslp/stochastic_program.hpp"
#include "sslp/volume_dp.hpp"

namespace sslp {

using Json = nlohmann::json;

/// Input that is not valid JSON (or cannot be read at all).
class MalformedInputError : public Error {
 public:
  using Error::Error;
};

/// Valid JSON that does not match the schema of its kind.
class SchemaError : public Error {
 public:
  SchemaError(const std::string& what, std::string pointer) : Error(what), pointer_(std::move(pointer)) {}
  /// RFC 6901 pointer to the first offending value.
  const std::string& pointer() const { return pointer_; }

 private:
  std::string pointer_;
};

enum class InstanceKind { graph, polytope, integer_system, sslp };

const char* to_string(InstanceKind kind);

/// Integer matrix with an optional right-hand side b.
struct IntegerInstance {
  IntegerSystem system;
  std::optional<RationalVector> b;
};

using Payload = std::variant<Graph, HPolytope, IntegerInstance, StochasticProgram>;

struct InstanceFile {
  Payload payload;
  Json metadata = Json::object();

  InstanceKind kind() const { return static_cast<InstanceKind>(payload.index()); }
};

/// Rationals are read from "p/q" strings, JSON integers, or
/// {"numerator": .., "denominator": ..}; floats are rejected.
Rational rational_from_json(const Json& value, const std::string& pointer);
Json to_json(const Rational& value);
/// {"lo": decimal, "hi": decimal, "bits": precision}
Json to_json(const IntervalScalar& value);
/// [{"exponents": [..], "coeff": "p/q"}, ..]
Json to_json(const Polynomial& value);
Json to_json(const RationalVector& values);

Json to_json(const Graph& g);
Json to_json(const HPolytope& p);
Json to_json(const IntegerInstance& s);
Json to_json(const StochasticProgram& sp);
Json to_json(const InstanceFile& instance);

Graph graph_from_json(const Json& j, const std::string& pointer = "");
HPolytope polytope_from_json(const Json& j, const std::string& pointer = "");
IntegerInstance integer_instance_from_json(const Json& j, const std::string& pointer = "");
StochasticProgram sslp_from_json(const Json& j, const std::string& pointer = "");

/// Throws SchemaError naming the first offending field.
InstanceFile instance_from_json(const Json& j);
/// Throws MalformedInputError for invalid JSON.
InstanceFile parse_instance(std::istream& in);
/// "-" reads standard input.
InstanceFile parse_instance(const std::string& path);

std::uint64_t fnv1a64(std::string_view bytes);
/// "fnv1a64:<16 hex digits>" over the canonical serialization.
std::string instance_digest(const InstanceFile& instance);

}  // namespace sslp
