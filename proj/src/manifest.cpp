#include "modpol/manifest.hpp"

#include <algorithm>
#include <cstdio>
#include <sstream>

#include "modpol/hash.hpp"

namespace modpol {

const char* port_type_name(PortType t) {
  switch (t) {
    case PortType::user_ref: return "user_ref";
    case PortType::resource_ref: return "resource_ref";
    case PortType::org_ref: return "org_ref";
    case PortType::value: return "value";
    case PortType::decision: return "decision";
    case PortType::policy_change: return "policy_change";
  }
  return "value";
}

std::optional<PortType> port_type_from_name(std::string_view name) {
  if (name == "user_ref") return PortType::user_ref;
  if (name == "resource_ref") return PortType::resource_ref;
  if (name == "org_ref") return PortType::org_ref;
  if (name == "value") return PortType::value;
  if (name == "decision") return PortType::decision;
  if (name == "policy_change") return PortType::policy_change;
  return std::nullopt;
}

namespace {
const char* kind_name(Value::Kind k) {
  switch (k) {
    case Value::Kind::string: return "string";
    case Value::Kind::integer: return "int";
    case Value::Kind::real: return "float";
    case Value::Kind::boolean: return "bool";
    case Value::Kind::list: return "list";
    case Value::Kind::map: return "map";
  }
  return "string";
}

std::optional<Value::Kind> kind_from_name(std::string_view name) {
  if (name == "string") return Value::Kind::string;
  if (name == "int") return Value::Kind::integer;
  if (name == "float") return Value::Kind::real;
  if (name == "bool") return Value::Kind::boolean;
  if (name == "list") return Value::Kind::list;
  if (name == "map") return Value::Kind::map;
  return std::nullopt;
}
}  // namespace

Status PolicyDecl::check(const Value& v) const {
  bool type_ok = v.kind() == type ||
                 (type == Value::Kind::real && v.kind() == Value::Kind::integer);
  if (!type_ok)
    return make_error(Errc::policy_bounds_violation,
                      "policy " + name + " expects " + kind_name(type));
  if (v.is_numeric()) {
    double d = v.as_number();
    if (min && d < min->as_number())
      return make_error(Errc::policy_bounds_violation,
                        "policy " + name + " below minimum " + min->to_text());
    if (max && d > max->as_number())
      return make_error(Errc::policy_bounds_violation,
                        "policy " + name + " above maximum " + max->to_text());
  }
  if (!choices.empty() && v.is_string() &&
      std::find(choices.begin(), choices.end(), v.as_string()) == choices.end())
    return make_error(Errc::policy_bounds_violation,
                      "policy " + name + " not one of its allowed choices: " + v.as_string());
  return ok_status();
}

const PolicyDecl* ModuleManifest::find_policy(std::string_view name) const {
  for (const auto& p : policies)
    if (p.name == name) return &p;
  return nullptr;
}

const PortDecl* ModuleManifest::find_input(std::string_view name) const {
  for (const auto& p : inputs)
    if (p.name == name) return &p;
  return nullptr;
}

const PortDecl* ModuleManifest::find_output(std::string_view name) const {
  for (const auto& p : outputs)
    if (p.name == name) return &p;
  return nullptr;
}

void ModuleManifest::seal() { source_hash = fnv1a64(source_text); }

std::string hash_hex(uint64_t h) {
  char buf[17];
  std::snprintf(buf, sizeof buf, "%016llx", static_cast<unsigned long long>(h));
  return buf;
}

std::string ModuleManifest::to_text() const {
  std::string out;
  out += "module " + kind + "\n";
  out += "version " + version + "\n";
  out += std::string("allow_external ") + (allow_external ? "on" : "off") + "\n";
  for (const auto& p : policies) {
    out += "policy " + p.name + " " + kind_name(p.type) + " default " + p.default_value.to_text();
    if (p.min) out += " min " + p.min->to_text();
    if (p.max) out += " max " + p.max->to_text();
    if (!p.choices.empty()) {
      out += " choices";
      for (const auto& c : p.choices) out += " " + c;
    }
    out += "\n";
  }
  for (const auto& p : inputs) out += "input " + p.name + " " + std::string(port_type_name(p.type)) + "\n";
  for (const auto& p : outputs) out += "output " + p.name + " " + std::string(port_type_name(p.type)) + "\n";
  out += "source\n";
  std::istringstream src(source_text);
  std::string line;
  while (std::getline(src, line)) out += "  " + line + "\n";
  return out;
}

Result<ModuleManifest> ModuleManifest::from_text(std::string_view text) {
  ModuleManifest m;
  bool in_source = false;
  std::vector<std::string> source_lines;
  size_t pos = 0;
  int lineno = 0;
  auto fail = [&](const std::string& msg) {
    return make_error(Errc::malformed, "manifest line " + std::to_string(lineno) + ": " + msg);
  };
  while (pos <= text.size()) {
    size_t nl = text.find('\n', pos);
    std::string_view line = text.substr(pos, nl == std::string_view::npos ? text.size() - pos : nl - pos);
    pos = nl == std::string_view::npos ? text.size() + 1 : nl + 1;
    ++lineno;
    if (!line.empty() && line.back() == '\r') line.remove_suffix(1);
    if (in_source) {
      if (line.substr(0, 2) == "  ")
        source_lines.emplace_back(line.substr(2));
      else if (line.empty())
        source_lines.emplace_back("");
      else
        return fail("unexpected content after source block");
      continue;
    }
    if (line.empty() || line[0] == '#') continue;
    std::istringstream ss{std::string(line)};
    std::string word;
    ss >> word;
    if (word == "module") {
      ss >> m.kind;
    } else if (word == "version") {
      ss >> m.version;
    } else if (word == "allow_external") {
      std::string v;
      ss >> v;
      m.allow_external = (v == "on" || v == "true");
    } else if (word == "policy") {
      PolicyDecl p;
      std::string type_word, kw;
      ss >> p.name >> type_word >> kw;
      auto k = kind_from_name(type_word);
      if (!k || kw != "default") return fail("bad policy declaration");
      std::string def;
      ss >> def;
      p.type = *k;
      p.default_value = Value::literal(def);
      if (p.type == Value::Kind::real && p.default_value.is_integer())
        p.default_value = Value(p.default_value.as_number());
      while (ss >> kw) {
        if (kw == "min" || kw == "max") {
          std::string v;
          ss >> v;
          auto lit = Value::literal(v);
          if (p.type == Value::Kind::real && lit.is_integer()) lit = Value(lit.as_number());
          (kw == "min" ? p.min : p.max) = lit;
        } else if (kw == "choices") {
          std::string c;
          while (ss >> c) p.choices.push_back(c);
        } else {
          return fail("unknown policy attribute " + kw);
        }
      }
      m.policies.push_back(std::move(p));
    } else if (word == "input" || word == "output") {
      PortDecl p;
      std::string type_word;
      ss >> p.name >> type_word;
      auto t = port_type_from_name(type_word);
      if (!t) return fail("unknown port type " + type_word);
      p.type = *t;
      (word == "input" ? m.inputs : m.outputs).push_back(std::move(p));
    } else if (word == "source") {
      in_source = true;
    } else {
      return fail("unknown keyword " + word);
    }
  }
  if (m.kind.empty()) return make_error(Errc::malformed, "manifest missing module kind");
  while (!source_lines.empty() && source_lines.back().empty()) source_lines.pop_back();
  std::string src;
  for (size_t i = 0; i < source_lines.size(); ++i) {
    if (i) src += "\n";
    src += source_lines[i];
  }
  m.source_text = std::move(src);
  m.seal();
  return m;
}

}  // namespace modpol
