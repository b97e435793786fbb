#include "modpol/event.hpp"

#include <charconv>
#include <fstream>

#include <json.hpp>

namespace modpol {

std::vector<std::string> split_path(std::string_view path) {
  std::vector<std::string> parts;
  size_t start = 0;
  while (start <= path.size()) {
    size_t slash = path.find('/', start);
    if (slash == std::string_view::npos) {
      parts.emplace_back(path.substr(start));
      break;
    }
    parts.emplace_back(path.substr(start, slash - start));
    start = slash + 1;
  }
  return parts;
}

OrgPath parent_path(std::string_view path) {
  size_t slash = path.rfind('/');
  if (slash == std::string_view::npos) return "";
  return OrgPath(path.substr(0, slash));
}

bool path_is_prefix(std::string_view ancestor, std::string_view path) {
  if (ancestor.size() > path.size()) return false;
  if (path.substr(0, ancestor.size()) != ancestor) return false;
  return path.size() == ancestor.size() || path[ancestor.size()] == '/';
}

std::string Actor::to_string() const {
  switch (kind) {
    case Kind::system: return "system";
    case Kind::user: return "user:" + id;
    case Kind::resource: return "resource:" + id;
    case Kind::remote: return "remote:" + id;
  }
  return "system";
}

Result<Actor> Actor::parse(std::string_view text) {
  if (text == "system") return Actor::system();
  auto starts = [&](std::string_view p) { return text.substr(0, p.size()) == p; };
  if (starts("user:")) return Actor::user(std::string(text.substr(5)));
  if (starts("resource:")) return Actor::resource(std::string(text.substr(9)));
  if (starts("remote:")) return Actor::remote(std::string(text.substr(7)));
  return make_error(Errc::malformed, "bad actor: " + std::string(text));
}

std::string Event::to_line() const {
  std::string out = "{\"seq\":";
  out += std::to_string(seq);
  out += ",\"tick\":";
  out += std::to_string(tick);
  out += ",\"actor\":";
  append_json_string(out, actor);
  out += ",\"kind\":";
  append_json_string(out, kind);
  out += ",\"payload\":";
  payload.append_text(out);
  out += ",\"caused_by\":";
  out += caused_by ? std::to_string(*caused_by) : "null";
  out += "}";
  return out;
}

Result<Event> Event::from_line(std::string_view line) {
  auto j = nlohmann::ordered_json::parse(line, nullptr, false);
  if (j.is_discarded() || !j.is_object())
    return make_error(Errc::corrupt_log, "unparseable event line");
  Event ev;
  if (!j.contains("seq") || !j["seq"].is_number_unsigned())
    return make_error(Errc::corrupt_log, "event missing seq");
  ev.seq = j["seq"].get<uint64_t>();
  if (!j.contains("tick") || !j["tick"].is_number_unsigned())
    return make_error(Errc::corrupt_log, "event missing tick");
  ev.tick = j["tick"].get<uint64_t>();
  if (!j.contains("actor") || !j["actor"].is_string())
    return make_error(Errc::corrupt_log, "event missing actor");
  ev.actor = j["actor"].get<std::string>();
  if (!j.contains("kind") || !j["kind"].is_string())
    return make_error(Errc::corrupt_log, "event missing kind");
  ev.kind = j["kind"].get<std::string>();
  if (!j.contains("payload")) return make_error(Errc::corrupt_log, "event missing payload");
  auto payload = Value::from_text(j["payload"].dump());
  if (!payload) return make_error(Errc::corrupt_log, "bad payload: " + payload.error().message);
  ev.payload = std::move(*payload);
  if (j.contains("caused_by") && !j["caused_by"].is_null()) {
    if (!j["caused_by"].is_number_unsigned())
      return make_error(Errc::corrupt_log, "bad caused_by");
    ev.caused_by = j["caused_by"].get<uint64_t>();
  }
  return ev;
}

Result<std::vector<Event>> read_event_log(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) return make_error(Errc::io_error, "cannot read " + path);
  std::vector<Event> events;
  std::string line;
  while (std::getline(in, line)) {
    if (!line.empty() && line.back() == '\r') line.pop_back();
    if (line.empty()) continue;
    auto ev = Event::from_line(line);
    if (!ev) return ev.error();
    uint64_t expected = events.size();
    if (ev->seq != expected)
      return make_error(Errc::corrupt_log,
                        "seq gap: expected " + std::to_string(expected) + ", found " +
                            std::to_string(ev->seq));
    events.push_back(std::move(*ev));
  }
  return events;
}

Status write_event_log(const std::string& path, const std::vector<Event>& events) {
  std::ofstream out(path, std::ios::binary | std::ios::trunc);
  if (!out) return make_error(Errc::io_error, "cannot write " + path);
  for (const auto& ev : events) out << ev.to_line() << '\n';
  out.flush();
  if (!out) return make_error(Errc::io_error, "write failed: " + path);
  return ok_status();
}

}  // namespace modpol
