#pragma once

#include <cstdint>
#include <memory>
#include <optional>
#include <string>
#include <vector>

#include "modpol/event.hpp"
#include "modpol/manifest.hpp"
#include "modpol/permissions.hpp"
#include "modpol/rng.hpp"
#include "modpol/value.hpp"

namespace modpol {

struct PlatformBinding {
  std::string name = "none";
  std::string version = "0";

  bool operator==(const PlatformBinding&) const = default;
};

struct User {
  enum class Kind { human, bot };
  std::string user_id;
  Kind kind = Kind::human;
  Value attributes = Value::map();
};

struct Resource {
  std::string resource_id;
  std::string resource_type = "object";
  Value state = Value::map();
  std::optional<std::string> platform_handle;
};

struct EntityRef {
  Actor::Kind kind = Actor::Kind::user;  // user or resource only
  std::string id;
  std::string home_instance;

  Actor actor() const {
    return kind == Actor::Kind::user ? Actor::user(id) : Actor::resource(id);
  }
  bool operator==(const EntityRef&) const = default;
};

struct WireEdge {
  std::string from_port;
  std::string to_module;
  std::string to_port;

  std::string canonical() const { return from_port + "->" + to_module + "." + to_port; }
  bool operator==(const WireEdge&) const = default;
};

// An installed, policy-configured module instance. Composites carry their
// part ids and internal wiring; atomic modules leave those empty.
struct GovModuleSlot {
  std::string module_id;
  ModuleManifest manifest;
  Value policy_values = Value::map();
  OrgPath host_org;
  std::vector<WireEdge> wiring;
  Value state = Value::map();
  std::vector<std::string> parts;
  std::vector<WireEdge> internal_wiring;

  bool is_composite() const { return !parts.empty(); }
  const Value& policy(std::string_view name) const;
};

struct Org {
  std::string org_id;
  OrgPath path;
  Org* parent = nullptr;
  std::vector<std::unique_ptr<Org>> children;  // creation order
  std::vector<Actor> members;                  // insertion order, unique
  std::vector<GovModuleSlot> installed;        // install order
  PermissionTable table;

  bool has_member(const Actor& a) const;
  Org* child(std::string_view org_id);
};

// One governance domain: the root of the org tree, the entity registry,
// the permission policy and the append-only event log. A single-writer
// state machine; all mutations are serialized in event order.
class Instance {
 public:
  Instance(std::string instance_id, uint64_t seed, PlatformBinding binding, bool external_api);

  const std::string& id() const { return instance_id_; }
  uint64_t seed() const { return seed_; }
  const PlatformBinding& binding() const { return binding_; }
  bool external_api_enabled() const { return external_api_; }
  uint64_t clock() const { return clock_; }
  void advance_clock(uint64_t tick);  // never decreases

  Org& root() { return *root_; }
  const Org& root() const { return *root_; }
  Org* org_at(std::string_view path);
  const Org* org_at(std::string_view path) const;

  PermissionTable& instance_table() { return instance_table_; }
  const PermissionTable& instance_table() const { return instance_table_; }

  const std::vector<Event>& log() const { return log_; }
  uint64_t next_seq() const { return log_.size(); }
  const Event& append_event(std::string_view kind, const Actor& actor, Value payload,
                            std::optional<uint64_t> caused_by = std::nullopt);

  // --- entities ---
  Result<User*> create_user(std::string user_id, User::Kind kind, Value attributes,
                            const Actor& actor, std::optional<uint64_t> caused_by = std::nullopt);
  Result<Resource*> create_resource(std::string resource_id, std::string type, Value state,
                                    std::optional<std::string> handle, const Actor& actor,
                                    std::optional<uint64_t> caused_by = std::nullopt);
  User* find_user(std::string_view id);
  const User* find_user(std::string_view id) const;
  Resource* find_resource(std::string_view id);
  const Resource* find_resource(std::string_view id) const;
  const std::vector<User>& users() const { return users_; }
  const std::vector<Resource>& resources() const { return resources_; }

  // --- kernel operations ---
  Result<Org*> create_org(const OrgPath& parent, const std::string& org_id, const Actor& actor,
                          const PermissionTable& initial = {},
                          std::optional<uint64_t> caused_by = std::nullopt);
  Status add_member(const OrgPath& org, const Actor& entity, const Actor& actor,
                    std::optional<uint64_t> caused_by = std::nullopt);
  Status remove_member(const OrgPath& org, const Actor& entity, const Actor& actor,
                       std::optional<uint64_t> caused_by = std::nullopt);
  PermissionDecision resolve_permission(const Actor& actor, std::string_view action_id,
                                        const OrgPath& target_path) const;
  // Writes one key of a resource's state. Module-mediated writes are
  // authorized by module scope (resource governed by the module's org
  // subtree) instead of an actor grant.
  Result<uint64_t> set_resource_state(const std::string& resource_id, const std::string& key,
                                      Value value, const Actor& actor,
                                      const std::string& via_module = "",
                                      Value detail = Value::map(),
                                      std::optional<uint64_t> caused_by = std::nullopt);
  Result<uint64_t> set_user_attribute(const std::string& user_id, const std::string& key,
                                      Value value, const Actor& actor,
                                      const std::string& via_module = "",
                                      std::optional<uint64_t> caused_by = std::nullopt);

  // Modules governing an entity: the union of modules installed on every
  // org the entity belongs to. Maintained incrementally; tests compare
  // against a from-scratch recomputation.
  std::vector<std::string> governing_modules(const Actor& entity) const;
  std::vector<std::string> governing_modules_recomputed(const Actor& entity) const;

  GovModuleSlot* find_module(std::string_view module_id);
  const GovModuleSlot* find_module(std::string_view module_id) const;
  Org* module_host(std::string_view module_id);

  // Orgs in preorder (root first, children in creation order).
  std::vector<Org*> orgs_preorder();
  std::vector<const Org*> orgs_preorder() const;

  // True when the resource/user is governed by org `path`'s subtree, i.e.
  // a member of some org at or below it.
  bool in_scope(const Actor& entity, const OrgPath& path) const;

  // Canonical state serialization and digest. Excludes the event log and
  // seq counter so read-only operations keep the digest stable.
  Value state_value() const;
  uint64_t state_digest() const;

  // PRNG stream for a named consumer, positioned at `position`.
  SplitMix64 stream(std::string_view name, uint64_t position) const;

 private:
  friend struct ReplayGuard;

  std::string instance_id_;
  uint64_t seed_ = 0;
  PlatformBinding binding_;
  bool external_api_ = false;
  uint64_t clock_ = 0;
  std::unique_ptr<Org> root_;
  PermissionTable instance_table_;
  std::vector<User> users_;
  std::vector<Resource> resources_;
  std::vector<Event> log_;
  bool replaying_ = false;
};

// Rebuilds an instance from its event log alone. The first event must be
// instance.created; seq numbers must be dense from 0.
Result<std::unique_ptr<Instance>> replay_events(const std::vector<Event>& events);

// Applies a single event to an instance under reconstruction.
Status apply_event(Instance& inst, const Event& ev);

Value permission_entry_payload(const PermissionTable& table);

}  // namespace modpol
