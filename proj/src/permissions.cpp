#include "modpol/permissions.hpp"

#include <algorithm>

namespace modpol {

SubjectSelector SubjectSelector::user(std::string id) {
  SubjectSelector s;
  s.kind = Kind::user;
  s.id = std::move(id);
  return s;
}

SubjectSelector SubjectSelector::members_of(OrgPath path) {
  SubjectSelector s;
  s.kind = Kind::members_of;
  s.id = std::move(path);
  return s;
}

SubjectSelector SubjectSelector::holders_of(std::string attr, Value v) {
  SubjectSelector s;
  s.kind = Kind::holders_of;
  s.attr = std::move(attr);
  s.attr_value = std::move(v);
  return s;
}

std::string SubjectSelector::canonical() const {
  switch (kind) {
    case Kind::everyone: return "everyone";
    case Kind::user: return "user:" + id;
    case Kind::members_of: return "members_of:" + id;
    case Kind::holders_of: {
      std::string v = attr_value.is_string() ? attr_value.as_string() : attr_value.to_text();
      return "holders_of:" + attr + "=" + v;
    }
  }
  return "everyone";
}

Result<SubjectSelector> SubjectSelector::parse(std::string_view text) {
  if (text == "everyone") return everyone();
  auto starts = [&](std::string_view p) { return text.substr(0, p.size()) == p; };
  if (starts("user:")) return user(std::string(text.substr(5)));
  if (starts("members_of:")) return members_of(OrgPath(text.substr(11)));
  if (starts("holders_of:")) {
    auto rest = text.substr(11);
    size_t eq = rest.find('=');
    if (eq == std::string_view::npos || eq == 0)
      return make_error(Errc::malformed, "holders_of needs attr=value");
    return holders_of(std::string(rest.substr(0, eq)), Value::literal(rest.substr(eq + 1)));
  }
  return make_error(Errc::malformed, "bad subject selector: " + std::string(text));
}

std::string Grant::canonical() const {
  return subject.canonical() + " " + action + " at " + scope;
}

std::string Restriction::canonical() const { return action + " at " + scope; }

namespace {
template <typename T>
void sorted_insert(std::vector<T>& entries, T entry) {
  auto key = entry.canonical();
  auto it = std::lower_bound(entries.begin(), entries.end(), key,
                             [](const T& a, const std::string& k) { return a.canonical() < k; });
  if (it != entries.end() && *it == entry) return;
  entries.insert(it, std::move(entry));
}

template <typename T>
bool sorted_remove(std::vector<T>& entries, const T& entry) {
  auto it = std::find(entries.begin(), entries.end(), entry);
  if (it == entries.end()) return false;
  entries.erase(it);
  return true;
}
}  // namespace

void PermissionTable::add(Grant g) { sorted_insert(grants, std::move(g)); }
void PermissionTable::add(Restriction r) { sorted_insert(restrictions, std::move(r)); }
bool PermissionTable::remove(const Grant& g) { return sorted_remove(grants, g); }
bool PermissionTable::remove(const Restriction& r) { return sorted_remove(restrictions, r); }

Value PermissionTable::to_value() const {
  Value out = Value::map();
  Value gl = Value::list({});
  for (const auto& g : grants) {
    Value e = Value::map();
    e.set("subject", g.subject.canonical());
    e.set("action", g.action);
    e.set("scope", g.scope);
    gl.push_back(std::move(e));
  }
  Value rl = Value::list({});
  for (const auto& r : restrictions) {
    Value e = Value::map();
    e.set("action", r.action);
    e.set("scope", r.scope);
    rl.push_back(std::move(e));
  }
  out.set("grants", std::move(gl));
  out.set("restrictions", std::move(rl));
  return out;
}

Result<PermissionTable> PermissionTable::from_value(const Value& v) {
  PermissionTable table;
  if (!v.is_map()) return make_error(Errc::malformed, "permission table must be a map");
  if (const Value* gl = v.find("grants")) {
    if (!gl->is_list()) return make_error(Errc::malformed, "grants must be a list");
    for (const auto& e : gl->as_list()) {
      const Value* subject = e.find("subject");
      const Value* act = e.find("action");
      const Value* scope = e.find("scope");
      if (!subject || !act || !scope)
        return make_error(Errc::malformed, "grant entry incomplete");
      auto sel = SubjectSelector::parse(subject->as_string());
      if (!sel) return sel.error();
      table.add(Grant{*sel, act->as_string(), scope->as_string()});
    }
  }
  if (const Value* rl = v.find("restrictions")) {
    if (!rl->is_list()) return make_error(Errc::malformed, "restrictions must be a list");
    for (const auto& e : rl->as_list()) {
      const Value* act = e.find("action");
      const Value* scope = e.find("scope");
      if (!act || !scope) return make_error(Errc::malformed, "restriction entry incomplete");
      table.add(Restriction{act->as_string(), scope->as_string()});
    }
  }
  return table;
}

std::string PermissionDecision::reason() const {
  switch (outcome) {
    case PermissionOutcome::allowed: return "allowed";
    case PermissionOutcome::denied_no_grant: return "no-grant";
    case PermissionOutcome::denied_restricted: return "ancestor-restriction at " + blocking_scope;
    case PermissionOutcome::unknown_action: return "unknown-action";
  }
  return "denied";
}

bool is_known_action(std::string_view action_id) {
  using namespace action;
  if (action_id == org_create || action_id == org_add_member || action_id == org_remove_member ||
      action_id == org_view || action_id == module_install || action_id == resource_write ||
      action_id == user_write || action_id == monitor_query)
    return true;
  return action_id.size() > invoke_prefix.size() &&
         action_id.substr(0, invoke_prefix.size()) == invoke_prefix;
}

}  // namespace modpol
