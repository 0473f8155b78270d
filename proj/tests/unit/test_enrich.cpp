#include <doctest.h>

#include <fstream>
#include <regex>
#include <sstream>
#include <string>
#include <vector>

#include "notimind/enrich.hpp"
#include "notimind/error.hpp"
#include "notimind/rng.hpp"

using namespace notimind;

namespace {

NotificationEvent posted(std::string name, std::string msg) {
  NotificationEvent e;
  e.user_id = "u1";
  e.state = EventState::kPosted;
  e.event_name = std::move(name);
  e.message = std::move(msg);
  return e;
}

// Minimal UTF-8 decoder for well-formed input.
std::vector<char32_t> codepoints(const std::string& s) {
  std::vector<char32_t> out;
  for (std::size_t i = 0; i < s.size();) {
    unsigned char c = s[i];
    int len = c < 0x80 ? 1 : c < 0xE0 ? 2 : c < 0xF0 ? 3 : 4;
    char32_t cp = len == 1 ? c : len == 2 ? (c & 0x1F) : len == 3 ? (c & 0x0F) : (c & 0x07);
    for (int k = 1; k < len; ++k) cp = (cp << 6) | (static_cast<unsigned char>(s[i + k]) & 0x3F);
    out.push_back(cp);
    i += len;
  }
  return out;
}

struct RangeLine {
  char32_t lo, hi;
};

std::vector<RangeLine> bundled_ranges() {
  std::vector<RangeLine> out;
  std::istringstream in{std::string(EmojiTable::bundled_text())};
  std::string line;
  while (std::getline(in, line)) {
    if (line.empty() || line[0] == '#') continue;
    std::string key = line.substr(0, line.find('\t'));
    auto dots = key.find("..");
    char32_t lo = std::stoul(key.substr(0, dots), nullptr, 16);
    char32_t hi = dots == std::string::npos ? lo : std::stoul(key.substr(dots + 2), nullptr, 16);
    out.push_back({lo, hi});
  }
  return out;
}

int scan_count(const std::string& s, const std::vector<RangeLine>& ranges) {
  int n = 0;
  for (char32_t cp : codepoints(s)) {
    for (const auto& r : ranges) {
      if (cp >= r.lo && cp <= r.hi) {
        ++n;
        break;
      }
    }
  }
  return n;
}

std::vector<std::string> split_tabs(const std::string& line) {
  std::vector<std::string> out;
  std::size_t start = 0;
  for (;;) {
    auto tab = line.find('\t', start);
    out.push_back(line.substr(start, tab - start));
    if (tab == std::string::npos) return out;
    start = tab + 1;
  }
}

}  // namespace

TEST_CASE("group detection") {
  CHECK(detect_group(posted("whatsapp : William @ Friendship-Group", "")));
  CHECK_FALSE(detect_group(posted("whatsapp : William", "")));
  CHECK_FALSE(detect_group(posted("", "")));
}

TEST_CASE("work detection") {
  CHECK(detect_work(posted("com.google.android.gm : boss", "")));
  CHECK_FALSE(detect_work(posted("whatsapp : Mum", "dinner?")));
  CHECK(detect_work(posted("linkedin : recruiter", "")));
  CHECK(detect_work(posted("LinkedIn : recruiter", "")));
  CHECK(detect_work(posted("sms : x", "Re: budget")));
  CHECK(detect_work(posted("sms : x", "contact bob@corp.example")));
  CHECK_FALSE(detect_work(posted("sms : x", "meet @ noon")));

  DetectorConfig cfg;
  cfg.work_originators = {"slack"};
  cfg.originator_aliases.clear();
  CHECK(detect_work(posted("slack : channel", ""), cfg));
  CHECK_FALSE(detect_work(posted("com.google.android.gm : boss", ""), cfg));
}

TEST_CASE("system detection") {
  CHECK(detect_system(posted("com.android.systemui : Cable charging", "")));
  CHECK(detect_system(posted("x : y", "WIFI networks available")));
  CHECK(detect_system(posted("x : y", "usb connected")));
  CHECK(detect_system(posted("Updating : store", "")));
  CHECK_FALSE(detect_system(posted("x : y", "see you at 5")));
}

TEST_CASE("emoji counting") {
  auto two = count_emojis("hi 😀😀");
  CHECK(two.count == 2);
  CHECK(two.descriptions == std::vector<std::string>{"GRINNING FACE", "GRINNING FACE"});
  auto none = count_emojis("plain text");
  CHECK(none.count == 0);
  CHECK(none.descriptions.empty());
  auto movie = count_emojis("\U0001F3A5 0:42");
  CHECK(movie.count == 1);
  CHECK(movie.descriptions == std::vector<std::string>{"MOVIE CAMERA"});
  auto unknown = count_emojis("\U0001F6F8");
  CHECK(unknown.count == 1);
  CHECK(unknown.descriptions == std::vector<std::string>{"UNKNOWN"});
}

TEST_CASE("emoji counts match an independent scan of the range table and add over splits") {
  const auto ranges = bundled_ranges();
  REQUIRE_FALSE(ranges.empty());
  const std::vector<std::string> pieces = {"a", " ", "😀", "🎉", "👍", "é", "中", "\U0001F3A5", "\U0001F4F7", "☀", "✈", "7", "🇩🇪"};
  Rng rng(3);
  for (int trial = 0; trial < 300; ++trial) {
    std::vector<std::string> parts;
    std::string whole;
    std::size_t len = rng.below(12);
    for (std::size_t i = 0; i < len; ++i) {
      parts.push_back(pieces[rng.below(pieces.size())]);
      whole += parts.back();
    }
    const auto counted = count_emojis(whole);
    CHECK(counted.count == scan_count(whole, ranges));
    CHECK(counted.count == static_cast<int>(counted.descriptions.size()));
    std::size_t cut = parts.empty() ? 0 : rng.below(parts.size() + 1);
    std::string a, b;
    for (std::size_t i = 0; i < parts.size(); ++i) (i < cut ? a : b) += parts[i];
    CHECK(count_emojis(a).count + count_emojis(b).count == counted.count);
  }
}

TEST_CASE("custom emoji table") {
  auto table = EmojiTable::parse("# test\n2764\tHEAVY BLACK HEART\n1F600..1F601\tFACES\n");
  CHECK(table.is_emoji(0x2764));
  CHECK(table.is_emoji(0x1F601));
  CHECK_FALSE(table.is_emoji(0x1F602));
  auto c = count_emojis("❤\U0001F601\U0001F602", table);
  CHECK(c.count == 2);
  CHECK(c.descriptions == std::vector<std::string>{"HEAVY BLACK HEART", "UNKNOWN"});
}

TEST_CASE("media detection") {
  auto video = detect_media("\U0001F3A5 0:42");
  CHECK(video.has_video);
  REQUIRE(video.video_length_seconds);
  CHECK(*video.video_length_seconds == 0 * 60 + 42);
  CHECK_FALSE(video.has_image);

  auto camcorder = detect_media("\U0001F4F9 1:02:03");
  CHECK(camcorder.has_video);
  CHECK(camcorder.video_length_seconds == 3600 + 2 * 60 + 3);

  auto image = detect_media("\U0001F4F7");
  CHECK_FALSE(image.has_video);
  CHECK_FALSE(image.video_length_seconds);
  CHECK(image.has_image);

  auto plain = detect_media("no media");
  CHECK_FALSE(plain.has_video);
  CHECK_FALSE(plain.video_length_seconds);
  CHECK_FALSE(plain.has_image);

  auto unparsed = detect_media("\U0001F3A5 soon 9:75");
  CHECK(unparsed.has_video);
  CHECK_FALSE(unparsed.video_length_seconds);
}

TEST_CASE("durations") {
  const std::regex pattern(R"((?:(\d+):([0-5]\d):([0-5]\d))|(?:(\d+):([0-5]\d)))");
  for (const char* token : {"0:42", "12:05", "1:00:00", "0:60", "1:2", "a:bc", "10", "1:02:03", "::", "3:59"}) {
    std::cmatch m;
    std::optional<int> expected;
    if (std::regex_match(token, m, pattern)) {
      expected = m[1].matched ? std::stoi(m[1]) * 3600 + std::stoi(m[2]) * 60 + std::stoi(m[3])
                              : std::stoi(m[4]) * 60 + std::stoi(m[5]);
    }
    CHECK_MESSAGE(parse_duration(token) == expected, token);
  }
}

TEST_CASE("multi notifications") {
  CHECK(detect_multi(posted("whatsapp : WhatsApp", "5 new messages")));
  CHECK_FALSE(detect_multi(posted("whatsapp : WhatsApp", "1 message")));
  CHECK_FALSE(detect_multi(posted("sms : x", "I sent you 5 messages yesterday")));
  CHECK(detect_multi(posted("x", "12 Messages")));
  CHECK(detect_multi(posted("x", "2 message")));

  const std::regex oracle(R"(^\s*0*([2-9]|[1-9][0-9]+)\s+(new\s+)?messages?\s*$)", std::regex::icase);
  const std::vector<std::string> words = {"0", "1", "2", "5", "10", "007", " ", "  ", "new", "New", "message",
                                          "messages", "MESSAGES", "from", "x", "newmessages", "\t"};
  Rng rng(17);
  for (int trial = 0; trial < 3000; ++trial) {
    std::string msg;
    std::size_t len = 1 + rng.below(5);
    for (std::size_t i = 0; i < len; ++i) msg += words[rng.below(words.size())];
    CHECK_MESSAGE(detect_multi(posted("x", msg)) == std::regex_match(msg, oracle), msg);
  }
}

TEST_CASE("enrich composes the detectors") {
  auto group = enrich(posted("whatsapp : a @ b", "😀"));
  CHECK(group.is_group);
  CHECK(group.emoji_count == 1);
  CHECK(group.message_length == 1);

  NotificationEvent screen;
  screen.state = EventState::kScreenOn;
  screen.event_name = "whatsapp : a @ b";
  screen.message = "5 new messages 😀";
  auto s = enrich(screen);
  CHECK_FALSE(s.is_group);
  CHECK_FALSE(s.is_multi);
  CHECK_FALSE(s.is_work);
  CHECK_FALSE(s.is_system);
  CHECK(s.emoji_count == 0);
  CHECK(s.message_length == 0);

  auto multi = enrich(posted("whatsapp : WhatsApp", "3 new messages"));
  CHECK(multi.is_multi);
  CHECK(multi.emoji_count == 0);

  auto once = enrich(posted("messenger : x", "🎉 📹 0:10"));
  CHECK(once == enrich(posted("messenger : x", "🎉 📹 0:10")));
  CHECK(once.emoji_count == static_cast<int>(once.emoji_descriptions.size()));
}

TEST_CASE("detector configuration text") {
  auto cfg = DetectorConfig::parse(
      "work_originators = slack, jira\n"
      "work_tags = [EXT]\n"
      "system_keywords = battery\n"
      "multi_pattern = false\n"
      "work_email_address = false\n");
  CHECK(cfg.work_originators == std::vector<std::string>{"slack", "jira"});
  Enricher enricher(cfg);
  auto e = enricher(posted("jira : board", "battery low, 5 new messages"));
  CHECK(e.is_work);
  CHECK(e.is_system);
  CHECK_FALSE(enricher(posted("x", "5 new messages")).is_multi);
  CHECK_FALSE(enricher(posted("x", "a@b.com")).is_work);
  CHECK_THROWS_AS(DetectorConfig::parse("no_such_key = 1\n"), Error);
}

TEST_CASE("hand-labeled corpus") {
  std::ifstream in(std::string(NOTIMIND_FIXTURE_DIR) + "/labeled_messages.tsv");
  REQUIRE(in);
  std::string line;
  std::getline(in, line);
  int rows = 0;
  while (std::getline(in, line)) {
    if (line.empty()) continue;
    auto f = split_tabs(line);
    REQUIRE(f.size() == 8);
    NotificationEvent e = posted(f[1], f[2]);
    e.state = *parse_event_state(f[0]);
    auto r = enrich(e);
    INFO(line);
    CHECK(r.is_group == (f[3] == "1"));
    CHECK(r.is_work == (f[4] == "1"));
    CHECK(r.is_system == (f[5] == "1"));
    CHECK(r.is_multi == (f[6] == "1"));
    CHECK(r.emoji_count == std::stoi(f[7]));
    ++rows;
  }
  CHECK(rows == 20);
}
