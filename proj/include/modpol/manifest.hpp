#pragma once

#include <cstdint>
#include <optional>
#include <string>
#include <vector>

#include "modpol/result.hpp"
#include "modpol/value.hpp"

namespace modpol {

// The closed set of types a value crossing a module port may have.
enum class PortType { user_ref, resource_ref, org_ref, value, decision, policy_change };

const char* port_type_name(PortType t);
std::optional<PortType> port_type_from_name(std::string_view name);

struct PortDecl {
  std::string name;
  PortType type;

  bool operator==(const PortDecl&) const = default;
};

// An editable configuration option of a module. Bounds apply to numeric
// policies; `choices` constrains string policies to an enumerated set.
struct PolicyDecl {
  std::string name;
  Value::Kind type = Value::Kind::string;
  Value default_value;
  std::optional<Value> min;
  std::optional<Value> max;
  std::vector<std::string> choices;

  // Checks type and bounds. Integers are accepted where floats are declared.
  Status check(const Value& v) const;

  bool operator==(const PolicyDecl&) const = default;
};

struct ModuleManifest {
  std::string kind;
  std::string version;
  std::vector<PolicyDecl> policies;
  std::vector<PortDecl> inputs;
  std::vector<PortDecl> outputs;
  bool allow_external = false;
  std::string source_text;  // canonical behavior description
  uint64_t source_hash = 0; // fnv1a64 of source_text

  const PolicyDecl* find_policy(std::string_view name) const;
  const PortDecl* find_input(std::string_view name) const;
  const PortDecl* find_output(std::string_view name) const;

  void seal();  // recomputes source_hash

  // Module repository text form, the same line/indent style as govspec.
  std::string to_text() const;
  static Result<ModuleManifest> from_text(std::string_view text);

  bool operator==(const ModuleManifest&) const = default;
};

std::string hash_hex(uint64_t h);

}  // namespace modpol
