#pragma once

#include <cstdint>
#include <initializer_list>
#include <optional>
#include <string>
#include <string_view>
#include <utility>
#include <variant>
#include <vector>

#include "modpol/result.hpp"

namespace modpol {

// The engine's data model: scalars (string, i64, f64, bool) plus
// homogeneous lists and string-keyed insertion-ordered maps. Every event
// payload, module state and monitor report is a Value, and the canonical
// text form is byte-stable so logs can be diffed as golden files.
class Value {
 public:
  enum class Kind { string, integer, real, boolean, list, map };

  using List = std::vector<Value>;
  using Map = std::vector<std::pair<std::string, Value>>;

  Value() : v_(std::string{}) {}
  Value(std::string s) : v_(std::move(s)) {}
  Value(const char* s) : v_(std::string(s)) {}
  Value(std::string_view s) : v_(std::string(s)) {}
  Value(int64_t i) : v_(i) {}
  Value(int i) : v_(static_cast<int64_t>(i)) {}
  Value(uint64_t i) : v_(static_cast<int64_t>(i)) {}
  Value(size_t i) : v_(static_cast<int64_t>(i)) {}
  Value(double d) : v_(d) {}
  Value(bool b) : v_(b) {}

  static Value list(List items) { return Value(std::move(items), 0); }
  static Value map() { return Value(Map{}, 0); }
  static Value map(Map entries) { return Value(std::move(entries), 0); }

  Kind kind() const { return static_cast<Kind>(v_.index()); }
  bool is_string() const { return kind() == Kind::string; }
  bool is_integer() const { return kind() == Kind::integer; }
  bool is_real() const { return kind() == Kind::real; }
  bool is_boolean() const { return kind() == Kind::boolean; }
  bool is_list() const { return kind() == Kind::list; }
  bool is_map() const { return kind() == Kind::map; }
  bool is_numeric() const { return is_integer() || is_real(); }

  const std::string& as_string() const { return std::get<std::string>(v_); }
  int64_t as_integer() const { return std::get<int64_t>(v_); }
  double as_real() const { return std::get<double>(v_); }
  bool as_boolean() const { return std::get<bool>(v_); }
  const List& as_list() const { return std::get<List>(v_); }
  List& as_list() { return std::get<List>(v_); }
  const Map& as_map() const { return std::get<Map>(v_); }
  Map& as_map() { return std::get<Map>(v_); }

  // Numeric view: integers widen to double.
  double as_number() const { return is_integer() ? static_cast<double>(as_integer()) : as_real(); }

  // Map access. set() inserts at the end or overwrites in place, keeping
  // insertion order for unchanged keys.
  const Value* find(std::string_view key) const;
  Value* find(std::string_view key);
  void set(std::string_view key, Value v);
  bool erase(std::string_view key);
  Value& at(std::string_view key);  // inserts empty string value if absent

  void push_back(Value v) { as_list().push_back(std::move(v)); }

  bool operator==(const Value& other) const { return v_ == other.v_; }
  bool operator!=(const Value& other) const { return !(*this == other); }

  // Canonical serialization: compact JSON, map keys in insertion order,
  // floats via shortest round-trip with a forced decimal point.
  std::string to_text() const;
  void append_text(std::string& out) const;

  // Parses the canonical text form (strict JSON subset, no nulls).
  static Result<Value> from_text(std::string_view text);

  // Checks the homogeneity invariant recursively: list elements share one kind.
  bool homogeneous() const;

  uint64_t hash() const;

  // Parses a bare literal as written in govspec/scenario files:
  // true/false -> bool, integer/float forms -> numbers, else string.
  static Value literal(std::string_view token);

 private:
  Value(List l, int) : v_(std::move(l)) {}
  Value(Map m, int) : v_(std::move(m)) {}

  std::variant<std::string, int64_t, double, bool, List, Map> v_;
};

// Appends a JSON-escaped string (with surrounding quotes) to out.
void append_json_string(std::string& out, std::string_view s);

// Canonical float rendering: shortest round-trip, always carries '.' or 'e'.
std::string format_real(double d);

}  // namespace modpol
