#pragma once

#include <string>
#include <utility>
#include <variant>

namespace modpol {

// Error vocabulary of the engine. Codes are part of the public contract:
// callers branch on them and the CLI prints them verbatim.
enum class Errc {
  rejection,            // generic precondition/config rejection
  permission_denied,    // no grant on the ancestry path
  permission_restricted,// grant defeated by an ancestor restriction
  unknown_action,
  membership_precondition_failed,
  policy_bounds_violation,
  port_type_error,
  composition_cycle,
  integrity_error,
  not_closed,
  already_tallied,
  jury_pool_too_small,
  verdict_rejected,
  term_not_expired,
  vote_rejected,
  enforcement_blocked,
  already_settled,
  send_blocked,
  stale_response,
  spec_error,
  compare_unavailable,
  corrupt_log,
  unknown_target,
  malformed,
  io_error,
};

const char* errc_name(Errc code);

struct Error {
  Errc code;
  std::string message;
};

inline Error make_error(Errc code, std::string message) {
  return Error{code, std::move(message)};
}

// Minimal expected-style result. The engine never throws for domain
// failures; exceptions are reserved for programming errors.
template <typename T>
class Result {
 public:
  Result(T value) : v_(std::move(value)) {}
  Result(Error err) : v_(std::move(err)) {}

  bool ok() const { return std::holds_alternative<T>(v_); }
  explicit operator bool() const { return ok(); }

  T& value() { return std::get<T>(v_); }
  const T& value() const { return std::get<T>(v_); }
  T& operator*() { return value(); }
  const T& operator*() const { return value(); }
  T* operator->() { return &value(); }
  const T* operator->() const { return &value(); }

  const Error& error() const { return std::get<Error>(v_); }

 private:
  std::variant<T, Error> v_;
};

struct Unit {};
using Status = Result<Unit>;

inline Status ok_status() { return Status(Unit{}); }

}  // namespace modpol
