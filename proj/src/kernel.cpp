#include "modpol/kernel.hpp"

#include <algorithm>

#include "modpol/builtins.hpp"

namespace modpol {

const Value& GovModuleSlot::policy(std::string_view name) const {
  if (const Value* v = policy_values.find(name)) return *v;
  static const Value empty;
  const PolicyDecl* decl = manifest.find_policy(name);
  return decl ? decl->default_value : empty;
}

bool Org::has_member(const Actor& a) const {
  return std::find(members.begin(), members.end(), a) != members.end();
}

Org* Org::child(std::string_view org_id) {
  for (auto& c : children)
    if (c->org_id == org_id) return c.get();
  return nullptr;
}

Instance::Instance(std::string instance_id, uint64_t seed, PlatformBinding binding,
                   bool external_api)
    : instance_id_(std::move(instance_id)),
      seed_(seed),
      binding_(std::move(binding)),
      external_api_(external_api) {
  root_ = std::make_unique<Org>();
  root_->org_id = kRootOrgId;
  root_->path = kRootOrgId;
}

void Instance::advance_clock(uint64_t tick) {
  if (tick > clock_) clock_ = tick;
}

Org* Instance::org_at(std::string_view path) {
  auto parts = split_path(path);
  if (parts.empty() || parts[0] != root_->org_id) return nullptr;
  Org* cur = root_.get();
  for (size_t i = 1; i < parts.size(); ++i) {
    cur = cur->child(parts[i]);
    if (!cur) return nullptr;
  }
  return cur;
}

const Org* Instance::org_at(std::string_view path) const {
  return const_cast<Instance*>(this)->org_at(path);
}

const Event& Instance::append_event(std::string_view kind, const Actor& actor, Value payload,
                                    std::optional<uint64_t> caused_by) {
  Event ev;
  ev.seq = log_.size();
  ev.tick = clock_;
  ev.actor = actor.to_string();
  ev.kind = std::string(kind);
  ev.payload = std::move(payload);
  ev.caused_by = caused_by;
  log_.push_back(std::move(ev));
  return log_.back();
}

Result<User*> Instance::create_user(std::string user_id, User::Kind kind, Value attributes,
                                    const Actor& actor, std::optional<uint64_t> caused_by) {
  if (find_user(user_id) || find_resource(user_id))
    return make_error(Errc::rejection, "duplicate entity id: " + user_id);
  User u;
  u.user_id = user_id;
  u.kind = kind;
  u.attributes = attributes;
  users_.push_back(std::move(u));
  Value payload = Value::map();
  payload.set("user", user_id);
  payload.set("user_kind", kind == User::Kind::bot ? "bot" : "human");
  payload.set("attributes", std::move(attributes));
  append_event(event_kind::user_created, actor, std::move(payload), caused_by);
  return &users_.back();
}

Result<Resource*> Instance::create_resource(std::string resource_id, std::string type, Value state,
                                            std::optional<std::string> handle, const Actor& actor,
                                            std::optional<uint64_t> caused_by) {
  if (find_user(resource_id) || find_resource(resource_id))
    return make_error(Errc::rejection, "duplicate entity id: " + resource_id);
  for (const auto& [k, v] : state.as_map()) {
    if (k.empty()) return make_error(Errc::rejection, "resource state key must be an identifier");
  }
  Resource r;
  r.resource_id = resource_id;
  r.resource_type = type;
  r.state = state;
  r.platform_handle = handle;
  resources_.push_back(std::move(r));
  Value payload = Value::map();
  payload.set("resource", resource_id);
  payload.set("resource_type", std::move(type));
  payload.set("state", std::move(state));
  if (handle) payload.set("handle", *handle);
  append_event(event_kind::resource_created, actor, std::move(payload), caused_by);
  return &resources_.back();
}

User* Instance::find_user(std::string_view id) {
  for (auto& u : users_)
    if (u.user_id == id) return &u;
  return nullptr;
}

const User* Instance::find_user(std::string_view id) const {
  return const_cast<Instance*>(this)->find_user(id);
}

Resource* Instance::find_resource(std::string_view id) {
  for (auto& r : resources_)
    if (r.resource_id == id) return &r;
  return nullptr;
}

const Resource* Instance::find_resource(std::string_view id) const {
  return const_cast<Instance*>(this)->find_resource(id);
}

namespace {
// Subject matching for grants. Remote principals are matched through the
// user selector with their "remote:<instance>" rendering, so scenario
// authors can grant them like any local actor.
bool subject_matches(const Instance& inst, const SubjectSelector& sel, const Actor& actor) {
  switch (sel.kind) {
    case SubjectSelector::Kind::everyone:
      return true;
    case SubjectSelector::Kind::user:
      if (actor.kind == Actor::Kind::user) return actor.id == sel.id;
      if (actor.kind == Actor::Kind::remote) return "remote:" + actor.id == sel.id;
      return false;
    case SubjectSelector::Kind::members_of: {
      const Org* org = inst.org_at(sel.id);
      return org && org->has_member(actor);
    }
    case SubjectSelector::Kind::holders_of: {
      if (actor.kind != Actor::Kind::user) return false;
      const User* u = inst.find_user(actor.id);
      if (!u) return false;
      const Value* v = u->attributes.find(sel.attr);
      return v && *v == sel.attr_value;
    }
  }
  return false;
}
}  // namespace

PermissionDecision Instance::resolve_permission(const Actor& actor, std::string_view action_id,
                                                const OrgPath& target_path) const {
  PermissionDecision decision;
  if (!is_known_action(action_id)) {
    decision.outcome = PermissionOutcome::unknown_action;
    return decision;
  }
  // Collect the tables on the root->target path; the instance-level table
  // sits above root. Entries match when their scope covers the target.
  std::vector<const PermissionTable*> tables;
  tables.push_back(&instance_table_);
  {
    auto parts = split_path(target_path);
    const Org* cur = root_.get();
    if (parts.empty() || parts[0] != cur->org_id) return decision;
    tables.push_back(&cur->table);
    for (size_t i = 1; i < parts.size(); ++i) {
      cur = const_cast<Org*>(cur)->child(parts[i]);
      if (!cur) return decision;
      tables.push_back(&cur->table);
    }
  }
  bool granted = false;
  for (const PermissionTable* table : tables) {
    for (const auto& g : table->grants) {
      if (g.action != action_id) continue;
      if (!path_is_prefix(g.scope, target_path)) continue;
      if (subject_matches(*this, g.subject, actor)) {
        granted = true;
        break;
      }
    }
    if (granted) break;
  }
  for (const PermissionTable* table : tables) {
    for (const auto& r : table->restrictions) {
      if (r.action != action_id) continue;
      if (!path_is_prefix(r.scope, target_path)) continue;
      decision.outcome = PermissionOutcome::denied_restricted;
      decision.blocking_scope = r.scope;
      return decision;
    }
  }
  decision.outcome = granted ? PermissionOutcome::allowed : PermissionOutcome::denied_no_grant;
  return decision;
}

namespace {
Status permission_error(const PermissionDecision& d, std::string_view action,
                        const OrgPath& path) {
  Errc code = d.outcome == PermissionOutcome::unknown_action ? Errc::unknown_action
              : d.outcome == PermissionOutcome::denied_restricted ? Errc::permission_restricted
                                                                  : Errc::permission_denied;
  return make_error(code, std::string(action) + " on " + path + ": " + d.reason());
}
}  // namespace

Result<Org*> Instance::create_org(const OrgPath& parent, const std::string& org_id,
                                  const Actor& actor, const PermissionTable& initial,
                                  std::optional<uint64_t> caused_by) {
  Org* parent_org = org_at(parent);
  if (!parent_org) return make_error(Errc::rejection, "no such org: " + parent);
  if (!replaying_ && !actor.is_system()) {
    auto d = resolve_permission(actor, action::org_create, parent);
    if (!d.allowed()) {
      auto err = permission_error(d, action::org_create, parent);
      return err.error();
    }
  }
  if (org_id.empty() || org_id.find('/') != std::string::npos)
    return make_error(Errc::rejection, "bad org id: " + org_id);
  if (parent_org->child(org_id))
    return make_error(Errc::rejection, "duplicate sibling org id: " + org_id);
  auto org = std::make_unique<Org>();
  org->org_id = org_id;
  org->path = parent_org->path + "/" + org_id;
  org->parent = parent_org;
  org->table = initial;
  Org* out = org.get();
  parent_org->children.push_back(std::move(org));
  Value payload = Value::map();
  payload.set("org", org_id);
  payload.set("parent", parent);
  payload.set("path", out->path);
  payload.set("permissions", initial.to_value());
  append_event(event_kind::org_created, actor, std::move(payload), caused_by);
  return out;
}

Status Instance::add_member(const OrgPath& org_path, const Actor& entity, const Actor& actor,
                            std::optional<uint64_t> caused_by) {
  Org* org = org_at(org_path);
  if (!org) return make_error(Errc::rejection, "no such org: " + org_path);
  if (entity.kind != Actor::Kind::user && entity.kind != Actor::Kind::resource)
    return make_error(Errc::rejection, "only users and resources can be members");
  bool known = entity.kind == Actor::Kind::user ? find_user(entity.id) != nullptr
                                                : find_resource(entity.id) != nullptr;
  if (!known) return make_error(Errc::rejection, "unknown entity: " + entity.to_string());
  if (!replaying_ && !actor.is_system()) {
    auto d = resolve_permission(actor, action::org_add_member, org_path);
    if (!d.allowed()) return permission_error(d, action::org_add_member, org_path);
  }
  if (org->parent && !org->parent->has_member(entity))
    return make_error(Errc::membership_precondition_failed,
                      entity.to_string() + " is not a member of " + org->parent->path);
  if (org->has_member(entity))
    return make_error(Errc::rejection, entity.to_string() + " already a member of " + org_path);
  org->members.push_back(entity);
  Value payload = Value::map();
  payload.set("org", org_path);
  payload.set("entity", entity.to_string());
  append_event(event_kind::member_added, actor, std::move(payload), caused_by);
  return ok_status();
}

Status Instance::remove_member(const OrgPath& org_path, const Actor& entity, const Actor& actor,
                               std::optional<uint64_t> caused_by) {
  Org* org = org_at(org_path);
  if (!org) return make_error(Errc::rejection, "no such org: " + org_path);
  if (!replaying_ && !actor.is_system()) {
    auto d = resolve_permission(actor, action::org_remove_member, org_path);
    if (!d.allowed()) return permission_error(d, action::org_remove_member, org_path);
  }
  auto it = std::find(org->members.begin(), org->members.end(), entity);
  if (it == org->members.end())
    return make_error(Errc::rejection, entity.to_string() + " not a member of " + org_path);
  // Removing from a parent while a child still holds the entity would break
  // the membership closure, so it is rejected.
  for (const auto& child : org->children)
    if (child->has_member(entity))
      return make_error(Errc::membership_precondition_failed,
                        entity.to_string() + " still a member of " + child->path);
  org->members.erase(it);
  Value payload = Value::map();
  payload.set("org", org_path);
  payload.set("entity", entity.to_string());
  append_event(event_kind::member_removed, actor, std::move(payload), caused_by);
  return ok_status();
}

bool Instance::in_scope(const Actor& entity, const OrgPath& path) const {
  const Org* base = org_at(path);
  if (!base) return false;
  std::vector<const Org*> stack{base};
  while (!stack.empty()) {
    const Org* org = stack.back();
    stack.pop_back();
    if (org->has_member(entity)) return true;
    for (const auto& c : org->children) stack.push_back(c.get());
  }
  return false;
}

Result<uint64_t> Instance::set_resource_state(const std::string& resource_id,
                                              const std::string& key, Value value,
                                              const Actor& actor, const std::string& via_module,
                                              Value detail, std::optional<uint64_t> caused_by) {
  Resource* res = find_resource(resource_id);
  if (!res) return make_error(Errc::rejection, "unknown resource: " + resource_id);
  if (key.empty()) return make_error(Errc::rejection, "state key must be an identifier");
  const Actor target = Actor::resource(resource_id);
  if (!replaying_ && !actor.is_system()) {
    bool authorized = false;
    if (!via_module.empty()) {
      const GovModuleSlot* slot = find_module(via_module);
      authorized = slot && in_scope(target, slot->host_org);
    } else {
      // The write is resolved against every org holding the resource
      // (root when it belongs to none); any allowance suffices.
      std::vector<OrgPath> holders;
      for (const Org* org : orgs_preorder())
        if (org->has_member(target)) holders.push_back(org->path);
      if (holders.empty()) holders.push_back(root_->path);
      PermissionDecision last;
      for (const auto& p : holders) {
        last = resolve_permission(actor, action::resource_write, p);
        if (last.allowed()) {
          authorized = true;
          break;
        }
      }
      if (!authorized) return permission_error(last, action::resource_write, holders.front());
    }
    if (!authorized)
      return make_error(Errc::permission_denied,
                        "module " + via_module + " does not govern " + resource_id);
  }
  Value old = res->state.find(key) ? *res->state.find(key) : Value("");
  bool had_old = res->state.find(key) != nullptr;
  res->state.set(key, value);
  Value payload = Value::map();
  payload.set("resource", resource_id);
  payload.set("key", key);
  if (had_old) payload.set("old", std::move(old));
  payload.set("new", std::move(value));
  if (!via_module.empty()) payload.set("via_module", via_module);
  if (!detail.as_map().empty()) payload.set("detail", std::move(detail));
  const Event& ev =
      append_event(event_kind::resource_state_changed, actor, std::move(payload), caused_by);
  return ev.seq;
}

Result<uint64_t> Instance::set_user_attribute(const std::string& user_id, const std::string& key,
                                              Value value, const Actor& actor,
                                              const std::string& via_module,
                                              std::optional<uint64_t> caused_by) {
  User* user = find_user(user_id);
  if (!user) return make_error(Errc::rejection, "unknown user: " + user_id);
  const Actor target = Actor::user(user_id);
  if (!replaying_ && !actor.is_system()) {
    bool authorized = false;
    if (!via_module.empty()) {
      const GovModuleSlot* slot = find_module(via_module);
      authorized = slot && in_scope(target, slot->host_org);
    } else {
      auto d = resolve_permission(actor, action::user_write, root_->path);
      if (!d.allowed()) return permission_error(d, action::user_write, root_->path);
      authorized = true;
    }
    if (!authorized)
      return make_error(Errc::permission_denied,
                        "module " + via_module + " does not govern " + user_id);
  }
  Value old = user->attributes.find(key) ? *user->attributes.find(key) : Value("");
  bool had_old = user->attributes.find(key) != nullptr;
  user->attributes.set(key, value);
  Value payload = Value::map();
  payload.set("user", user_id);
  payload.set("key", key);
  if (had_old) payload.set("old", std::move(old));
  payload.set("new", std::move(value));
  if (!via_module.empty()) payload.set("via_module", via_module);
  const Event& ev =
      append_event(event_kind::user_attribute_changed, actor, std::move(payload), caused_by);
  return ev.seq;
}

std::vector<std::string> Instance::governing_modules(const Actor& entity) const {
  return governing_modules_recomputed(entity);
}

std::vector<std::string> Instance::governing_modules_recomputed(const Actor& entity) const {
  std::vector<std::string> out;
  for (const Org* org : orgs_preorder()) {
    if (!org->has_member(entity)) continue;
    for (const auto& slot : org->installed)
      if (std::find(out.begin(), out.end(), slot.module_id) == out.end())
        out.push_back(slot.module_id);
  }
  std::sort(out.begin(), out.end());
  return out;
}

GovModuleSlot* Instance::find_module(std::string_view module_id) {
  for (Org* org : orgs_preorder())
    for (auto& slot : org->installed)
      if (slot.module_id == module_id) return &slot;
  return nullptr;
}

const GovModuleSlot* Instance::find_module(std::string_view module_id) const {
  return const_cast<Instance*>(this)->find_module(module_id);
}

Org* Instance::module_host(std::string_view module_id) {
  for (Org* org : orgs_preorder())
    for (auto& slot : org->installed)
      if (slot.module_id == module_id) return org;
  return nullptr;
}

std::vector<Org*> Instance::orgs_preorder() {
  std::vector<Org*> out;
  std::vector<Org*> stack{root_.get()};
  while (!stack.empty()) {
    Org* org = stack.back();
    stack.pop_back();
    out.push_back(org);
    for (auto it = org->children.rbegin(); it != org->children.rend(); ++it)
      stack.push_back(it->get());
  }
  return out;
}

std::vector<const Org*> Instance::orgs_preorder() const {
  auto mut = const_cast<Instance*>(this)->orgs_preorder();
  return std::vector<const Org*>(mut.begin(), mut.end());
}

Value Instance::state_value() const {
  Value out = Value::map();
  out.set("instance", instance_id_);
  out.set("seed", static_cast<int64_t>(seed_));
  Value platform = Value::map();
  platform.set("name", binding_.name);
  platform.set("version", binding_.version);
  out.set("platform", std::move(platform));
  out.set("external_api", external_api_);
  out.set("clock", static_cast<int64_t>(clock_));
  out.set("permissions", instance_table_.to_value());
  Value orgs = Value::list({});
  for (const Org* org : orgs_preorder()) {
    Value o = Value::map();
    o.set("org", org->org_id);
    o.set("path", org->path);
    Value members = Value::list({});
    for (const auto& m : org->members) members.push_back(m.to_string());
    o.set("members", std::move(members));
    o.set("permissions", org->table.to_value());
    Value modules = Value::list({});
    for (const auto& slot : org->installed) {
      Value m = Value::map();
      m.set("module", slot.module_id);
      m.set("module_kind", slot.manifest.kind);
      m.set("version", slot.manifest.version);
      m.set("source_hash", hash_hex(slot.manifest.source_hash));
      m.set("allow_external", slot.manifest.allow_external);
      m.set("policies", slot.policy_values);
      Value wiring = Value::list({});
      for (const auto& w : slot.wiring) wiring.push_back(w.canonical());
      m.set("wiring", std::move(wiring));
      if (slot.is_composite()) {
        Value parts = Value::list({});
        for (const auto& p : slot.parts) parts.push_back(p);
        m.set("parts", std::move(parts));
        Value iw = Value::list({});
        for (const auto& w : slot.internal_wiring) iw.push_back(w.canonical());
        m.set("internal_wiring", std::move(iw));
      }
      m.set("state", slot.state);
      modules.push_back(std::move(m));
    }
    o.set("modules", std::move(modules));
    orgs.push_back(std::move(o));
  }
  out.set("orgs", std::move(orgs));
  Value users = Value::list({});
  for (const auto& u : users_) {
    Value v = Value::map();
    v.set("user", u.user_id);
    v.set("user_kind", u.kind == User::Kind::bot ? "bot" : "human");
    v.set("attributes", u.attributes);
    users.push_back(std::move(v));
  }
  out.set("users", std::move(users));
  Value resources = Value::list({});
  for (const auto& r : resources_) {
    Value v = Value::map();
    v.set("resource", r.resource_id);
    v.set("resource_type", r.resource_type);
    if (r.platform_handle) v.set("handle", *r.platform_handle);
    v.set("state", r.state);
    resources.push_back(std::move(v));
  }
  out.set("resources", std::move(resources));
  return out;
}

uint64_t Instance::state_digest() const { return fnv1a64(state_value().to_text()); }

SplitMix64 Instance::stream(std::string_view name, uint64_t position) const {
  SplitMix64 s = substream(seed_, name);
  s.skip(position);
  return s;
}

// --- replay ---

struct ReplayGuard {
  explicit ReplayGuard(Instance& inst) : inst_(inst) { inst_.replaying_ = true; }
  ~ReplayGuard() { inst_.replaying_ = false; }
  Instance& inst_;
};

namespace {
Result<std::string> payload_string(const Event& ev, std::string_view key) {
  const Value* v = ev.payload.find(key);
  if (!v || !v->is_string())
    return make_error(Errc::corrupt_log,
                      ev.kind + " event " + std::to_string(ev.seq) + " missing " + std::string(key));
  return v->as_string();
}
}  // namespace

Status apply_event(Instance& inst, const Event& ev) {
  ReplayGuard guard(inst);
  inst.advance_clock(ev.tick);
  auto actor = Actor::parse(ev.actor);
  if (!actor) return make_error(Errc::corrupt_log, "bad actor at seq " + std::to_string(ev.seq));
  const std::string& kind = ev.kind;

  auto expect_seq = [&](const Event& appended) -> Status {
    if (appended.seq + 1 != inst.next_seq() || appended.seq != ev.seq)
      return make_error(Errc::corrupt_log, "replay produced seq " + std::to_string(appended.seq) +
                                               " for event " + std::to_string(ev.seq));
    return ok_status();
  };

  if (kind == event_kind::instance_created) {
    return make_error(Errc::corrupt_log, "instance.created after seq 0");
  } else if (kind == event_kind::org_created) {
    auto org_id = payload_string(ev, "org");
    auto parent = payload_string(ev, "parent");
    if (!org_id || !parent) return make_error(Errc::corrupt_log, "bad org.created payload");
    PermissionTable table;
    if (const Value* perms = ev.payload.find("permissions")) {
      auto t = PermissionTable::from_value(*perms);
      if (!t) return t.error();
      table = std::move(*t);
    }
    auto created = inst.create_org(*parent, *org_id, *actor, table, ev.caused_by);
    if (!created) return created.error();
    return expect_seq(inst.log().back());
  } else if (kind == event_kind::user_created) {
    auto id = payload_string(ev, "user");
    auto k = payload_string(ev, "user_kind");
    if (!id || !k) return make_error(Errc::corrupt_log, "bad user.created payload");
    const Value* attrs = ev.payload.find("attributes");
    auto created = inst.create_user(*id, *k == "bot" ? User::Kind::bot : User::Kind::human,
                                    attrs ? *attrs : Value::map(), *actor, ev.caused_by);
    if (!created) return created.error();
    return expect_seq(inst.log().back());
  } else if (kind == event_kind::resource_created) {
    auto id = payload_string(ev, "resource");
    auto type = payload_string(ev, "resource_type");
    if (!id || !type) return make_error(Errc::corrupt_log, "bad resource.created payload");
    const Value* state = ev.payload.find("state");
    std::optional<std::string> handle;
    if (const Value* h = ev.payload.find("handle")) handle = h->as_string();
    auto created = inst.create_resource(*id, *type, state ? *state : Value::map(), handle, *actor,
                                        ev.caused_by);
    if (!created) return created.error();
    return expect_seq(inst.log().back());
  } else if (kind == event_kind::member_added) {
    auto org = payload_string(ev, "org");
    auto entity = payload_string(ev, "entity");
    if (!org || !entity) return make_error(Errc::corrupt_log, "bad member_added payload");
    auto parsed = Actor::parse(*entity);
    if (!parsed) return parsed.error();
    auto st = inst.add_member(*org, *parsed, *actor, ev.caused_by);
    if (!st) return st;
    return expect_seq(inst.log().back());
  } else if (kind == event_kind::member_removed) {
    auto org = payload_string(ev, "org");
    auto entity = payload_string(ev, "entity");
    if (!org || !entity) return make_error(Errc::corrupt_log, "bad member_removed payload");
    auto parsed = Actor::parse(*entity);
    if (!parsed) return parsed.error();
    auto st = inst.remove_member(*org, *parsed, *actor, ev.caused_by);
    if (!st) return st;
    return expect_seq(inst.log().back());
  } else if (kind == event_kind::module_installed) {
    auto st = builtins::apply_install_event(inst, ev, *actor);
    if (!st) return st;
    return expect_seq(inst.log().back());
  } else if (kind == event_kind::module_state_changed) {
    auto module_id = payload_string(ev, "module");
    if (!module_id) return make_error(Errc::corrupt_log, "bad module.state_changed payload");
    GovModuleSlot* slot = inst.find_module(*module_id);
    if (!slot) return make_error(Errc::corrupt_log, "state change for unknown module " + *module_id);
    const Value* state = ev.payload.find("state");
    if (!state) return make_error(Errc::corrupt_log, "module.state_changed missing state");
    slot->state = *state;
    inst.append_event(kind, *actor, ev.payload, ev.caused_by);
    return expect_seq(inst.log().back());
  } else if (kind == event_kind::policy_changed) {
    auto module_id = payload_string(ev, "module");
    auto policy = payload_string(ev, "policy");
    if (!module_id || !policy) return make_error(Errc::corrupt_log, "bad policy.changed payload");
    GovModuleSlot* slot = inst.find_module(*module_id);
    if (!slot) return make_error(Errc::corrupt_log, "policy change for unknown module " + *module_id);
    const Value* new_value = ev.payload.find("new");
    if (!new_value) return make_error(Errc::corrupt_log, "policy.changed missing new value");
    slot->policy_values.set(*policy, *new_value);
    inst.append_event(kind, *actor, ev.payload, ev.caused_by);
    return expect_seq(inst.log().back());
  } else if (kind == event_kind::resource_state_changed) {
    auto id = payload_string(ev, "resource");
    auto key = payload_string(ev, "key");
    if (!id || !key) return make_error(Errc::corrupt_log, "bad resource.state_changed payload");
    const Value* new_value = ev.payload.find("new");
    if (!new_value) return make_error(Errc::corrupt_log, "resource.state_changed missing new");
    Resource* res = inst.find_resource(*id);
    if (!res) return make_error(Errc::corrupt_log, "state change for unknown resource " + *id);
    res->state.set(*key, *new_value);
    inst.append_event(kind, *actor, ev.payload, ev.caused_by);
    return expect_seq(inst.log().back());
  } else if (kind == event_kind::user_attribute_changed) {
    auto id = payload_string(ev, "user");
    auto key = payload_string(ev, "key");
    if (!id || !key) return make_error(Errc::corrupt_log, "bad user.attribute_changed payload");
    const Value* new_value = ev.payload.find("new");
    if (!new_value) return make_error(Errc::corrupt_log, "user.attribute_changed missing new");
    User* user = inst.find_user(*id);
    if (!user) return make_error(Errc::corrupt_log, "attribute change for unknown user " + *id);
    user->attributes.set(*key, *new_value);
    inst.append_event(kind, *actor, ev.payload, ev.caused_by);
    return expect_seq(inst.log().back());
  } else {
    // Audit-only events (module.invoked, monitor.queried, federation.*)
    // carry no state delta; they are re-appended verbatim.
    inst.append_event(kind, *actor, ev.payload, ev.caused_by);
    return expect_seq(inst.log().back());
  }
}

Result<std::unique_ptr<Instance>> replay_events(const std::vector<Event>& events) {
  if (events.empty()) return make_error(Errc::corrupt_log, "empty event log");
  const Event& first = events[0];
  if (first.seq != 0 || first.kind != event_kind::instance_created)
    return make_error(Errc::corrupt_log, "log must start with instance.created at seq 0");
  for (size_t i = 0; i < events.size(); ++i) {
    if (events[i].seq != i)
      return make_error(Errc::corrupt_log, "seq gap at " + std::to_string(i));
    if (events[i].caused_by && *events[i].caused_by >= events[i].seq)
      return make_error(Errc::corrupt_log, "caused_by must precede event " + std::to_string(i));
  }
  auto id = first.payload.find("instance");
  auto seed = first.payload.find("seed");
  if (!id || !seed)
    return make_error(Errc::corrupt_log, "instance.created payload incomplete");
  PlatformBinding binding;
  if (const Value* p = first.payload.find("platform")) {
    if (const Value* n = p->find("name")) binding.name = n->as_string();
    if (const Value* v = p->find("version")) binding.version = v->as_string();
  }
  bool external = false;
  if (const Value* e = first.payload.find("external_api")) external = e->as_boolean();
  auto inst = std::make_unique<Instance>(id->as_string(), static_cast<uint64_t>(seed->as_integer()),
                                         binding, external);
  inst->advance_clock(first.tick);
  if (const Value* perms = first.payload.find("permissions")) {
    auto t = PermissionTable::from_value(*perms);
    if (!t) return t.error();
    inst->instance_table() = std::move(*t);
  }
  {
    auto actor = Actor::parse(first.actor);
    if (!actor) return actor.error();
    inst->append_event(event_kind::instance_created, *actor, first.payload, first.caused_by);
  }
  for (size_t i = 1; i < events.size(); ++i) {
    auto st = apply_event(*inst, events[i]);
    if (!st) return st.error();
  }
  return inst;
}

}  // namespace modpol
