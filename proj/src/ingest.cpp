#include "notimind/ingest.hpp"

#include <algorithm>
#include <cctype>
#include <set>
#include <tuple>

#include <json.hpp>

#include "notimind/error.hpp"

namespace notimind {

namespace {

using json = nlohmann::json;
using ordered_json = nlohmann::ordered_json;

bool read_digits(std::string_view text, std::size_t pos, std::size_t count, int& out) {
  if (pos + count > text.size()) return false;
  int value = 0;
  for (std::size_t i = 0; i < count; ++i) {
    const char c = text[pos + i];
    if (c < '0' || c > '9') return false;
    value = value * 10 + (c - '0');
  }
  out = value;
  return true;
}

ParseError make_error(ParseErrorKind kind, std::size_t line, std::string field, std::string value = {}) {
  return ParseError{kind, line, std::move(field), std::move(value)};
}

// Reads a required string field, or reports why it could not.
std::variant<std::string, ParseError> string_field(const json& obj, const char* key, std::size_t line) {
  const auto it = obj.find(key);
  if (it == obj.end() || it->is_null()) return make_error(ParseErrorKind::kMissingField, line, key);
  if (!it->is_string()) return make_error(ParseErrorKind::kBadValue, line, key, it->dump());
  return it->get<std::string>();
}

std::variant<json, ParseError> parse_object(std::string_view line, std::size_t line_number) {
  json obj = json::parse(line, nullptr, /*allow_exceptions=*/false);
  if (obj.is_discarded() || !obj.is_object()) {
    return make_error(ParseErrorKind::kMalformed, line_number, "", std::string(line.substr(0, 80)));
  }
  return obj;
}

template <typename Record, typename LineParser>
void read_lines(std::istream& in, LineParser parse, std::vector<Record>& records, std::vector<ParseError>& errors) {
  std::string line;
  std::size_t line_number = 0;
  while (std::getline(in, line)) {
    ++line_number;
    if (!line.empty() && line.back() == '\r') line.pop_back();
    if (std::all_of(line.begin(), line.end(), [](unsigned char c) { return std::isspace(c) != 0; })) continue;
    auto result = parse(line, line_number);
    if (auto* record = std::get_if<Record>(&result)) {
      records.push_back(std::move(*record));
    } else {
      errors.push_back(std::get<ParseError>(std::move(result)));
    }
  }
  if (in.bad()) throw Error(ErrorCode::kIo, "read failure after line " + std::to_string(line_number));
}

}  // namespace

std::optional<Timestamp> parse_timestamp(std::string_view text) {
  using namespace std::chrono;
  // YYYY-MM-DDTHH:MM:SS
  int y, mo, d, h, mi, s;
  if (text.size() < 20) return std::nullopt;
  if (!read_digits(text, 0, 4, y) || text[4] != '-' || !read_digits(text, 5, 2, mo) || text[7] != '-' ||
      !read_digits(text, 8, 2, d) || text[10] != 'T' || !read_digits(text, 11, 2, h) || text[13] != ':' ||
      !read_digits(text, 14, 2, mi) || text[16] != ':' || !read_digits(text, 17, 2, s)) {
    return std::nullopt;
  }
  std::size_t pos = 19;
  int millis = 0;
  if (pos < text.size() && text[pos] == '.') {
    ++pos;
    std::size_t digits = 0;
    while (pos < text.size() && std::isdigit(static_cast<unsigned char>(text[pos]))) {
      if (digits == 3) return std::nullopt;
      millis = millis * 10 + (text[pos] - '0');
      ++digits;
      ++pos;
    }
    if (digits == 0) return std::nullopt;
    for (std::size_t i = digits; i < 3; ++i) millis *= 10;
  }
  const std::string_view zone = text.substr(pos);
  if (zone != "Z" && zone != "+00:00") return std::nullopt;
  if (h > 23 || mi > 59 || s > 59) return std::nullopt;
  const year_month_day ymd{year{y}, month{static_cast<unsigned>(mo)}, day{static_cast<unsigned>(d)}};
  if (!ymd.ok()) return std::nullopt;
  return Timestamp{sys_days{ymd} + hours{h} + minutes{mi} + seconds{s} + milliseconds{millis}};
}

std::string format_timestamp(Timestamp ts) {
  using namespace std::chrono;
  const auto day_point = floor<days>(ts);
  const year_month_day ymd{day_point};
  auto rest = ts - day_point;
  const auto h = duration_cast<hours>(rest);
  rest -= h;
  const auto mi = duration_cast<minutes>(rest);
  rest -= mi;
  const auto s = duration_cast<seconds>(rest);
  rest -= s;
  char buf[32];
  std::snprintf(buf, sizeof(buf), "%04d-%02u-%02uT%02d:%02d:%02d.%03dZ", static_cast<int>(ymd.year()),
                static_cast<unsigned>(ymd.month()), static_cast<unsigned>(ymd.day()), static_cast<int>(h.count()),
                static_cast<int>(mi.count()), static_cast<int>(s.count()), static_cast<int>(rest.count()));
  return buf;
}

std::string_view to_string(EventState state) {
  switch (state) {
    case EventState::kPosted: return "Posted";
    case EventState::kRemoved: return "Removed";
    case EventState::kScreenOn: return "ScreenOn";
    case EventState::kScreenOff: return "ScreenOff";
    case EventState::kUnlock: return "Unlock";
    case EventState::kKeyboardOut: return "KeyboardOut";
  }
  return "?";
}

std::string_view to_string(RingerMode mode) {
  switch (mode) {
    case RingerMode::kNormal: return "Normal";
    case RingerMode::kVibrate: return "Vibrate";
    case RingerMode::kSilent: return "Silent";
    case RingerMode::kUnknown: return "Unknown";
  }
  return "?";
}

std::optional<EventState> parse_event_state(std::string_view text) {
  for (std::size_t i = 0; i < kEventStateCount; ++i) {
    const auto state = static_cast<EventState>(i);
    if (text == to_string(state)) return state;
  }
  return std::nullopt;
}

RingerMode parse_ringer_mode(std::string_view text) {
  if (text == "Normal") return RingerMode::kNormal;
  if (text == "Vibrate") return RingerMode::kVibrate;
  if (text == "Silent") return RingerMode::kSilent;
  return RingerMode::kUnknown;
}

std::string_view to_string(ParseErrorKind kind) {
  switch (kind) {
    case ParseErrorKind::kMalformed: return "Malformed";
    case ParseErrorKind::kMissingField: return "MissingField";
    case ParseErrorKind::kBadValue: return "BadValue";
    case ParseErrorKind::kBadTimestamp: return "BadTimestamp";
    case ParseErrorKind::kBadState: return "BadState";
    case ParseErrorKind::kBadItemRange: return "BadItemRange";
    case ParseErrorKind::kDuplicateEntry: return "DuplicateEntry";
  }
  return "?";
}

std::string ParseError::message() const {
  std::string out = "line " + std::to_string(line) + ": " + std::string(to_string(kind));
  if (!field.empty() || !value.empty()) {
    out += "(";
    out += field;
    if (!field.empty() && !value.empty()) out += ", ";
    out += value;
    out += ")";
  }
  return out;
}

std::variant<NotificationEvent, ParseError> parse_event_line(std::string_view line, std::size_t line_number) {
  auto parsed = parse_object(line, line_number);
  if (auto* err = std::get_if<ParseError>(&parsed)) return *err;
  const json& obj = std::get<json>(parsed);

  NotificationEvent event;

  auto ts = string_field(obj, "ts", line_number);
  if (auto* err = std::get_if<ParseError>(&ts)) return *err;
  const auto timestamp = parse_timestamp(std::get<std::string>(ts));
  if (!timestamp) return make_error(ParseErrorKind::kBadTimestamp, line_number, "ts", std::get<std::string>(ts));
  event.timestamp = *timestamp;

  auto user = string_field(obj, "user", line_number);
  if (auto* err = std::get_if<ParseError>(&user)) return *err;
  event.user_id = std::get<std::string>(std::move(user));
  if (event.user_id.empty()) return make_error(ParseErrorKind::kMissingField, line_number, "user");

  auto state = string_field(obj, "state", line_number);
  if (auto* err = std::get_if<ParseError>(&state)) return *err;
  const auto parsed_state = parse_event_state(std::get<std::string>(state));
  if (!parsed_state) return make_error(ParseErrorKind::kBadState, line_number, "state", std::get<std::string>(state));
  event.state = *parsed_state;

  // name, msg and vol may be omitted (screen events carry neither name nor text).
  for (auto [key, target] : {std::pair{"name", &event.event_name}, std::pair{"msg", &event.message}}) {
    if (const auto it = obj.find(key); it != obj.end() && !it->is_null()) {
      if (!it->is_string()) return make_error(ParseErrorKind::kBadValue, line_number, key, it->dump());
      *target = it->get<std::string>();
    }
  }
  if (const auto it = obj.find("vol"); it != obj.end() && it->is_string()) {
    event.volume = parse_ringer_mode(it->get<std::string>());
  }
  return event;
}

std::variant<PanasEntry, ParseError> parse_panas_line(std::string_view line, std::size_t line_number) {
  auto parsed = parse_object(line, line_number);
  if (auto* err = std::get_if<ParseError>(&parsed)) return *err;
  const json& obj = std::get<json>(parsed);

  PanasEntry entry;
  auto ts = string_field(obj, "ts", line_number);
  if (auto* err = std::get_if<ParseError>(&ts)) return *err;
  const auto timestamp = parse_timestamp(std::get<std::string>(ts));
  if (!timestamp) return make_error(ParseErrorKind::kBadTimestamp, line_number, "ts", std::get<std::string>(ts));
  entry.timestamp = *timestamp;

  auto user = string_field(obj, "user", line_number);
  if (auto* err = std::get_if<ParseError>(&user)) return *err;
  entry.user_id = std::get<std::string>(std::move(user));
  if (entry.user_id.empty()) return make_error(ParseErrorKind::kMissingField, line_number, "user");

  for (std::size_t i = 0; i < kPanasItemCount; ++i) {
    const std::string key(kPanasItemNames[i]);
    const auto it = obj.find(key);
    if (it == obj.end() || it->is_null()) return make_error(ParseErrorKind::kMissingField, line_number, key);
    if (!it->is_number_integer()) return make_error(ParseErrorKind::kBadItemRange, line_number, key, it->dump());
    const auto value = it->get<long long>();
    if (value < 1 || value > 5) {
      return make_error(ParseErrorKind::kBadItemRange, line_number, key, std::to_string(value));
    }
    entry.items[i] = static_cast<int>(value);
  }
  return entry;
}

bool event_less(const NotificationEvent& a, const NotificationEvent& b) {
  return std::tie(a.user_id, a.timestamp, a.state, a.event_name, a.message, a.volume) <
         std::tie(b.user_id, b.timestamp, b.state, b.event_name, b.message, b.volume);
}

EventLog parse_event_log(std::istream& in) {
  EventLog log;
  read_lines<NotificationEvent>(
      in, [](std::string_view line, std::size_t n) { return parse_event_line(line, n); }, log.events, log.errors);
  std::sort(log.events.begin(), log.events.end(), event_less);
  return log;
}

PanasLog parse_panas_log(std::istream& in) {
  PanasLog log;
  std::set<std::pair<std::string, Timestamp>> seen;
  read_lines<PanasEntry>(
      in,
      [&](std::string_view text, std::size_t n) -> std::variant<PanasEntry, ParseError> {
        auto result = parse_panas_line(text, n);
        if (auto* entry = std::get_if<PanasEntry>(&result)) {
          if (!seen.emplace(entry->user_id, entry->timestamp).second) {
            return make_error(ParseErrorKind::kDuplicateEntry, n, "ts",
                              entry->user_id + "@" + format_timestamp(entry->timestamp));
          }
        }
        return result;
      },
      log.entries, log.errors);
  std::sort(log.entries.begin(), log.entries.end(), [](const PanasEntry& a, const PanasEntry& b) {
    return std::tie(a.user_id, a.timestamp) < std::tie(b.user_id, b.timestamp);
  });
  return log;
}

std::string to_json_line(const NotificationEvent& event) {
  ordered_json obj;
  obj["ts"] = format_timestamp(event.timestamp);
  obj["user"] = event.user_id;
  obj["name"] = event.event_name;
  obj["state"] = std::string(to_string(event.state));
  obj["msg"] = event.message;
  obj["vol"] = std::string(to_string(event.volume));
  return obj.dump(-1, ' ', false, json::error_handler_t::replace);
}

std::string to_json_line(const PanasEntry& entry) {
  ordered_json obj;
  obj["ts"] = format_timestamp(entry.timestamp);
  obj["user"] = entry.user_id;
  for (std::size_t i = 0; i < kPanasItemCount; ++i) obj[std::string(kPanasItemNames[i])] = entry.items[i];
  return obj.dump(-1, ' ', false, json::error_handler_t::replace);
}

}  // namespace notimind
