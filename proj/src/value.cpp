#include "modpol/value.hpp"

#include <algorithm>
#include <charconv>
#include <cmath>
#include <cstdio>

#include "modpol/hash.hpp"

#include <json.hpp>

namespace modpol {

const char* errc_name(Errc code) {
  switch (code) {
    case Errc::rejection: return "Rejection";
    case Errc::permission_denied: return "PermissionDenied";
    case Errc::permission_restricted: return "PermissionDenied";
    case Errc::unknown_action: return "UnknownAction";
    case Errc::membership_precondition_failed: return "MembershipPreconditionFailed";
    case Errc::policy_bounds_violation: return "PolicyBoundsViolation";
    case Errc::port_type_error: return "PortTypeError";
    case Errc::composition_cycle: return "CompositionCycle";
    case Errc::integrity_error: return "IntegrityError";
    case Errc::not_closed: return "NotClosed";
    case Errc::already_tallied: return "AlreadyTallied";
    case Errc::jury_pool_too_small: return "JuryPoolTooSmall";
    case Errc::verdict_rejected: return "VerdictRejected";
    case Errc::term_not_expired: return "TermNotExpired";
    case Errc::vote_rejected: return "VoteRejected";
    case Errc::enforcement_blocked: return "EnforcementBlocked";
    case Errc::already_settled: return "AlreadySettled";
    case Errc::send_blocked: return "SendBlocked";
    case Errc::stale_response: return "StaleResponse";
    case Errc::spec_error: return "SpecError";
    case Errc::compare_unavailable: return "CompareUnavailable";
    case Errc::corrupt_log: return "CorruptLog";
    case Errc::unknown_target: return "UnknownTarget";
    case Errc::malformed: return "Malformed";
    case Errc::io_error: return "IoError";
  }
  return "Error";
}

const Value* Value::find(std::string_view key) const {
  for (const auto& [k, v] : as_map())
    if (k == key) return &v;
  return nullptr;
}

Value* Value::find(std::string_view key) {
  for (auto& [k, v] : as_map())
    if (k == key) return &v;
  return nullptr;
}

void Value::set(std::string_view key, Value v) {
  if (Value* slot = find(key)) {
    *slot = std::move(v);
    return;
  }
  as_map().emplace_back(std::string(key), std::move(v));
}

bool Value::erase(std::string_view key) {
  auto& m = as_map();
  for (auto it = m.begin(); it != m.end(); ++it) {
    if (it->first == key) {
      m.erase(it);
      return true;
    }
  }
  return false;
}

Value& Value::at(std::string_view key) {
  if (Value* slot = find(key)) return *slot;
  as_map().emplace_back(std::string(key), Value());
  return as_map().back().second;
}

void append_json_string(std::string& out, std::string_view s) {
  out.push_back('"');
  for (unsigned char c : s) {
    switch (c) {
      case '"': out += "\\\""; break;
      case '\\': out += "\\\\"; break;
      case '\n': out += "\\n"; break;
      case '\r': out += "\\r"; break;
      case '\t': out += "\\t"; break;
      case '\b': out += "\\b"; break;
      case '\f': out += "\\f"; break;
      default:
        if (c < 0x20) {
          char buf[8];
          std::snprintf(buf, sizeof buf, "\\u%04x", c);
          out += buf;
        } else {
          out.push_back(static_cast<char>(c));
        }
    }
  }
  out.push_back('"');
}

std::string format_real(double d) {
  char buf[64];
  auto [end, ec] = std::to_chars(buf, buf + sizeof buf, d);
  std::string s(buf, end);
  if (s.find('.') == std::string::npos && s.find('e') == std::string::npos &&
      s.find("inf") == std::string::npos && s.find("nan") == std::string::npos)
    s += ".0";
  return s;
}

void Value::append_text(std::string& out) const {
  switch (kind()) {
    case Kind::string:
      append_json_string(out, as_string());
      break;
    case Kind::integer: {
      char buf[24];
      auto [end, ec] = std::to_chars(buf, buf + sizeof buf, as_integer());
      out.append(buf, end);
      break;
    }
    case Kind::real:
      out += format_real(as_real());
      break;
    case Kind::boolean:
      out += as_boolean() ? "true" : "false";
      break;
    case Kind::list: {
      out.push_back('[');
      bool first = true;
      for (const auto& v : as_list()) {
        if (!first) out.push_back(',');
        first = false;
        v.append_text(out);
      }
      out.push_back(']');
      break;
    }
    case Kind::map: {
      out.push_back('{');
      bool first = true;
      for (const auto& [k, v] : as_map()) {
        if (!first) out.push_back(',');
        first = false;
        append_json_string(out, k);
        out.push_back(':');
        v.append_text(out);
      }
      out.push_back('}');
      break;
    }
  }
}

std::string Value::to_text() const {
  std::string out;
  append_text(out);
  return out;
}

namespace {

Result<Value> from_json(const nlohmann::ordered_json& j) {
  using nlohmann::ordered_json;
  switch (j.type()) {
    case ordered_json::value_t::string:
      return Value(j.get<std::string>());
    case ordered_json::value_t::number_integer:
    case ordered_json::value_t::number_unsigned:
      return Value(static_cast<int64_t>(j.get<int64_t>()));
    case ordered_json::value_t::number_float: {
      double d = j.get<double>();
      if (!std::isfinite(d)) return make_error(Errc::malformed, "non-finite number");
      return Value(d);
    }
    case ordered_json::value_t::boolean:
      return Value(j.get<bool>());
    case ordered_json::value_t::array: {
      Value::List items;
      for (const auto& e : j) {
        auto v = from_json(e);
        if (!v) return v;
        items.push_back(std::move(*v));
      }
      return Value::list(std::move(items));
    }
    case ordered_json::value_t::object: {
      Value out = Value::map();
      for (auto it = j.begin(); it != j.end(); ++it) {
        auto v = from_json(it.value());
        if (!v) return v;
        out.set(it.key(), std::move(*v));
      }
      return out;
    }
    default:
      return make_error(Errc::malformed, "unsupported value (null?)");
  }
}

}  // namespace

Result<Value> Value::from_text(std::string_view text) {
  auto j = nlohmann::ordered_json::parse(text, nullptr, false);
  if (j.is_discarded()) return make_error(Errc::malformed, "invalid value text");
  return from_json(j);
}

bool Value::homogeneous() const {
  switch (kind()) {
    case Kind::list: {
      const auto& l = as_list();
      for (size_t i = 0; i < l.size(); ++i) {
        if (!l[i].homogeneous()) return false;
        if (i > 0 && l[i].kind() != l[0].kind()) return false;
      }
      return true;
    }
    case Kind::map:
      for (const auto& [k, v] : as_map())
        if (!v.homogeneous()) return false;
      return true;
    default:
      return true;
  }
}

uint64_t Value::hash() const { return fnv1a64(to_text()); }

Value Value::literal(std::string_view token) {
  if (token == "true") return Value(true);
  if (token == "false") return Value(false);
  if (!token.empty()) {
    int64_t i = 0;
    auto [p, ec] = std::from_chars(token.data(), token.data() + token.size(), i);
    if (ec == std::errc() && p == token.data() + token.size()) return Value(i);
    double d = 0;
    auto [pd, ecd] = std::from_chars(token.data(), token.data() + token.size(), d);
    if (ecd == std::errc() && pd == token.data() + token.size() && std::isfinite(d))
      return Value(d);
  }
  return Value(std::string(token));
}

}  // namespace modpol
