#pragma once

#include <cstdint>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

#include "modpol/result.hpp"
#include "modpol/value.hpp"

namespace modpol {

// Org addresses are slash-joined paths from the root org, e.g.
// "root/guild/officers". The root org of every instance is named "root".
using OrgPath = std::string;

inline constexpr std::string_view kRootOrgId = "root";

std::vector<std::string> split_path(std::string_view path);
OrgPath parent_path(std::string_view path);  // "" for root
bool path_is_prefix(std::string_view ancestor, std::string_view path);

// Who did something. Users and resources are the governable entities;
// "system" is the scenario runner / module machinery; "remote:<instance>"
// is the synthetic principal federation maps remote callers onto.
struct Actor {
  enum class Kind { user, resource, system, remote };

  Kind kind = Kind::system;
  std::string id;  // user id, resource id, or remote instance id

  static Actor system() { return Actor{Kind::system, ""}; }
  static Actor user(std::string id) { return Actor{Kind::user, std::move(id)}; }
  static Actor resource(std::string id) { return Actor{Kind::resource, std::move(id)}; }
  static Actor remote(std::string instance_id) { return Actor{Kind::remote, std::move(instance_id)}; }

  bool is_user() const { return kind == Kind::user; }
  bool is_system() const { return kind == Kind::system; }

  std::string to_string() const;
  static Result<Actor> parse(std::string_view text);

  bool operator==(const Actor&) const = default;
};

// One immutable record in an instance's append-only log. The log is the
// audit and replay substrate: replaying it against a fresh instance
// rebuilds the exact final state.
struct Event {
  uint64_t seq = 0;
  uint64_t tick = 0;
  std::string actor;  // Actor::to_string form
  std::string kind;
  Value payload = Value::map();
  std::optional<uint64_t> caused_by;

  // One line, fixed key order (seq, tick, actor, kind, payload, caused_by).
  std::string to_line() const;
  static Result<Event> from_line(std::string_view line);
};

// Event kind strings used by the engine.
namespace event_kind {
inline constexpr std::string_view instance_created = "instance.created";
inline constexpr std::string_view org_created = "org.created";
inline constexpr std::string_view user_created = "user.created";
inline constexpr std::string_view resource_created = "resource.created";
inline constexpr std::string_view member_added = "org.member_added";
inline constexpr std::string_view member_removed = "org.member_removed";
inline constexpr std::string_view module_installed = "module.installed";
inline constexpr std::string_view module_invoked = "module.invoked";
inline constexpr std::string_view module_state_changed = "module.state_changed";
inline constexpr std::string_view policy_changed = "policy.changed";
inline constexpr std::string_view resource_state_changed = "resource.state_changed";
inline constexpr std::string_view user_attribute_changed = "user.attribute_changed";
inline constexpr std::string_view monitor_queried = "monitor.queried";
inline constexpr std::string_view federation_sent = "federation.sent";
inline constexpr std::string_view federation_received = "federation.received";
}  // namespace event_kind

// Reads a newline-delimited event log, enforcing dense seq numbering.
Result<std::vector<Event>> read_event_log(const std::string& path);
Status write_event_log(const std::string& path, const std::vector<Event>& events);

}  // namespace modpol
