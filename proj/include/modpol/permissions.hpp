#pragma once

#include <optional>
#include <string>
#include <string_view>
#include <vector>

#include "modpol/event.hpp"
#include "modpol/value.hpp"

namespace modpol {

class Instance;

// Who a grant applies to.
struct SubjectSelector {
  enum class Kind { everyone, user, members_of, holders_of };

  Kind kind = Kind::everyone;
  std::string id;     // user id (user) or org path (members_of)
  std::string attr;   // holders_of
  Value attr_value;   // holders_of

  static SubjectSelector everyone() { return {}; }
  static SubjectSelector user(std::string id);
  static SubjectSelector members_of(OrgPath path);
  static SubjectSelector holders_of(std::string attr, Value v);

  // "everyone" | "user:x" | "members_of:root/g" | "holders_of:rank=3"
  std::string canonical() const;
  static Result<SubjectSelector> parse(std::string_view text);

  bool operator==(const SubjectSelector&) const = default;
};

// A grant allows (subject, action) at `scope` and everything beneath it.
// A restriction vetoes an action at `scope` and everything beneath it,
// defeating any grant further down. Scope is an absolute org path; by
// default it is the path of the org whose table holds the entry.
struct Grant {
  SubjectSelector subject;
  std::string action;
  OrgPath scope;

  std::string canonical() const;
  bool operator==(const Grant&) const = default;
};

struct Restriction {
  std::string action;
  OrgPath scope;

  std::string canonical() const;
  bool operator==(const Restriction&) const = default;
};

// Entries are kept sorted by canonical form and deduplicated, so equal
// policies serialize identically regardless of declaration order.
struct PermissionTable {
  std::vector<Grant> grants;
  std::vector<Restriction> restrictions;

  void add(Grant g);
  void add(Restriction r);
  bool remove(const Grant& g);
  bool remove(const Restriction& r);

  Value to_value() const;
  static Result<PermissionTable> from_value(const Value& v);

  bool operator==(const PermissionTable&) const = default;
};

enum class PermissionOutcome { allowed, denied_no_grant, denied_restricted, unknown_action };

struct PermissionDecision {
  PermissionOutcome outcome = PermissionOutcome::denied_no_grant;
  OrgPath blocking_scope;  // scope of the vetoing restriction, when restricted

  bool allowed() const { return outcome == PermissionOutcome::allowed; }
  std::string reason() const;
};

// Actions the permission system knows about. Anything else resolves to
// UnknownAction, which is a distinct outcome from denial.
namespace action {
inline constexpr std::string_view org_create = "org.create";
inline constexpr std::string_view org_add_member = "org.add_member";
inline constexpr std::string_view org_remove_member = "org.remove_member";
inline constexpr std::string_view org_view = "org.view";
inline constexpr std::string_view module_install = "module.install";
inline constexpr std::string_view resource_write = "resource.write";
inline constexpr std::string_view user_write = "user.write";
inline constexpr std::string_view monitor_query = "monitor.query";
inline constexpr std::string_view invoke_prefix = "module.invoke:";
}  // namespace action

bool is_known_action(std::string_view action_id);

}  // namespace modpol
