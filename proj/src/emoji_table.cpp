#include <algorithm>

#include "notimind/enrich.hpp"
#include "notimind/error.hpp"
#include "notimind/text.hpp"

namespace notimind {

namespace {

// Skin-tone modifiers (1F3FB..1F3FF) are deliberately left out of the
// ranges: they modify the preceding emoji rather than add one.
constexpr std::string_view kBundled = R"(# ranges
1F1E6..1F1FF	REGIONAL INDICATOR SYMBOLS
1F300..1F3FA	MISCELLANEOUS SYMBOLS AND PICTOGRAPHS
1F400..1F5FF	MISCELLANEOUS SYMBOLS AND PICTOGRAPHS
1F600..1F64F	EMOTICONS
1F680..1F6FF	TRANSPORT AND MAP SYMBOLS
1F900..1F9FF	SUPPLEMENTAL SYMBOLS AND PICTOGRAPHS
1FA70..1FAFF	SYMBOLS AND PICTOGRAPHS EXTENDED-A
2600..26FF	MISCELLANEOUS SYMBOLS
2700..27BF	DINGBATS
# names
1F319	CRESCENT MOON
1F31E	SUN WITH FACE
1F338	CHERRY BLOSSOM
1F339	ROSE
1F355	SLICE OF PIZZA
1F37B	CLINKING BEER MUGS
1F381	WRAPPED PRESENT
1F382	BIRTHDAY CAKE
1F389	PARTY POPPER
1F3A5	MOVIE CAMERA
1F440	EYES
1F44B	WAVING HAND SIGN
1F44C	OK HAND SIGN
1F44D	THUMBS UP SIGN
1F44E	THUMBS DOWN SIGN
1F44F	CLAPPING HANDS SIGN
1F48B	KISS MARK
1F494	BROKEN HEART
1F495	TWO HEARTS
1F496	SPARKLING HEART
1F499	BLUE HEART
1F49A	GREEN HEART
1F49B	YELLOW HEART
1F49C	PURPLE HEART
1F4A4	SLEEPING SYMBOL
1F4A9	PILE OF POO
1F4AA	FLEXED BICEPS
1F4AF	HUNDRED POINTS SYMBOL
1F4F7	CAMERA
1F4F8	CAMERA WITH FLASH
1F4F9	VIDEO CAMERA
1F525	FIRE
1F600	GRINNING FACE
1F601	GRINNING FACE WITH SMILING EYES
1F602	FACE WITH TEARS OF JOY
1F603	SMILING FACE WITH OPEN MOUTH
1F604	SMILING FACE WITH OPEN MOUTH AND SMILING EYES
1F605	SMILING FACE WITH OPEN MOUTH AND COLD SWEAT
1F606	SMILING FACE WITH OPEN MOUTH AND TIGHTLY-CLOSED EYES
1F607	SMILING FACE WITH HALO
1F608	SMILING FACE WITH HORNS
1F609	WINKING FACE
1F60A	SMILING FACE WITH SMILING EYES
1F60B	FACE SAVOURING DELICIOUS FOOD
1F60C	RELIEVED FACE
1F60D	SMILING FACE WITH HEART-SHAPED EYES
1F60E	SMILING FACE WITH SUNGLASSES
1F60F	SMIRKING FACE
1F610	NEUTRAL FACE
1F611	EXPRESSIONLESS FACE
1F612	UNAMUSED FACE
1F613	FACE WITH COLD SWEAT
1F614	PENSIVE FACE
1F615	CONFUSED FACE
1F616	CONFOUNDED FACE
1F617	KISSING FACE
1F618	FACE THROWING A KISS
1F619	KISSING FACE WITH SMILING EYES
1F61A	KISSING FACE WITH CLOSED EYES
1F61B	FACE WITH STUCK-OUT TONGUE
1F61C	FACE WITH STUCK-OUT TONGUE AND WINKING EYE
1F61D	FACE WITH STUCK-OUT TONGUE AND TIGHTLY-CLOSED EYES
1F61E	DISAPPOINTED FACE
1F61F	WORRIED FACE
1F620	ANGRY FACE
1F621	POUTING FACE
1F622	CRYING FACE
1F623	PERSEVERING FACE
1F624	FACE WITH LOOK OF TRIUMPH
1F625	DISAPPOINTED BUT RELIEVED FACE
1F626	FROWNING FACE WITH OPEN MOUTH
1F627	ANGUISHED FACE
1F628	FEARFUL FACE
1F629	WEARY FACE
1F62A	SLEEPY FACE
1F62B	TIRED FACE
1F62C	GRIMACING FACE
1F62D	LOUDLY CRYING FACE
1F62E	FACE WITH OPEN MOUTH
1F62F	HUSHED FACE
1F630	FACE WITH OPEN MOUTH AND COLD SWEAT
1F631	FACE SCREAMING IN FEAR
1F632	ASTONISHED FACE
1F633	FLUSHED FACE
1F634	SLEEPING FACE
1F635	DIZZY FACE
1F636	FACE WITHOUT MOUTH
1F637	FACE WITH MEDICAL MASK
1F641	SLIGHTLY FROWNING FACE
1F642	SLIGHTLY SMILING FACE
1F643	UPSIDE-DOWN FACE
1F644	FACE WITH ROLLING EYES
1F648	SEE-NO-EVIL MONKEY
1F64B	HAPPY PERSON RAISING ONE HAND
1F64C	PERSON RAISING BOTH HANDS IN CELEBRATION
1F64F	PERSON WITH FOLDED HANDS
1F680	ROCKET
1F697	AUTOMOBILE
1F914	THINKING FACE
1F917	HUGGING FACE
1F923	ROLLING ON THE FLOOR LAUGHING
1F92A	GRINNING FACE WITH ONE LARGE AND ONE SMALL EYE
1F92F	SHOCKED FACE WITH EXPLODING HEAD
1F970	SMILING FACE WITH SMILING EYES AND THREE HEARTS
1F973	FACE WITH PARTY HORN AND PARTY HAT
1F97A	FACE WITH PLEADING EYES
2600	BLACK SUN WITH RAYS
2601	CLOUD
2614	UMBRELLA WITH RAIN DROPS
2615	HOT BEVERAGE
2639	WHITE FROWNING FACE
263A	WHITE SMILING FACE
26A1	HIGH VOLTAGE SIGN
26BD	SOCCER BALL
2705	WHITE HEAVY CHECK MARK
270C	VICTORY HAND
2728	SPARKLES
274C	CROSS MARK
2764	HEAVY BLACK HEART
2B50	WHITE MEDIUM STAR
)";

char32_t parse_hex(std::string_view text, std::size_t line) {
  text = trim(text);
  if (text.empty() || text.size() > 6) {
    throw Error(ErrorCode::kBadFormat, "emoji table line " + std::to_string(line) + ": bad codepoint");
  }
  unsigned long value = 0;
  for (char c : text) {
    value <<= 4;
    if (c >= '0' && c <= '9') value |= static_cast<unsigned long>(c - '0');
    else if (c >= 'A' && c <= 'F') value |= static_cast<unsigned long>(c - 'A' + 10);
    else if (c >= 'a' && c <= 'f') value |= static_cast<unsigned long>(c - 'a' + 10);
    else throw Error(ErrorCode::kBadFormat, "emoji table line " + std::to_string(line) + ": bad hex digit");
  }
  if (value > 0x10FFFF) throw Error(ErrorCode::kBadFormat, "emoji table line " + std::to_string(line) + ": out of range");
  return static_cast<char32_t>(value);
}

}  // namespace

EmojiTable EmojiTable::parse(std::string_view text) {
  EmojiTable table;
  std::size_t line_no = 0;
  for (std::string_view line : split(text, '\n')) {
    ++line_no;
    if (!line.empty() && line.back() == '\r') line.remove_suffix(1);
    if (trim(line).empty() || trim(line).front() == '#') continue;
    const auto tab = line.find('\t');
    if (tab == std::string_view::npos) {
      throw Error(ErrorCode::kBadFormat, "emoji table line " + std::to_string(line_no) + ": missing tab");
    }
    const std::string_view key = line.substr(0, tab);
    const std::string name(trim(line.substr(tab + 1)));
    if (const auto dots = key.find(".."); dots != std::string_view::npos) {
      const char32_t first = parse_hex(key.substr(0, dots), line_no);
      const char32_t last = parse_hex(key.substr(dots + 2), line_no);
      if (last < first) throw Error(ErrorCode::kBadFormat, "emoji table line " + std::to_string(line_no) + ": empty range");
      table.ranges_.push_back({first, last, name});
    } else {
      table.names_[parse_hex(key, line_no)] = name;
    }
  }
  std::sort(table.ranges_.begin(), table.ranges_.end(), [](const Range& a, const Range& b) { return a.first < b.first; });
  return table;
}

const EmojiTable& EmojiTable::bundled() {
  static const EmojiTable table = parse(kBundled);
  return table;
}

std::string_view EmojiTable::bundled_text() { return kBundled; }

bool EmojiTable::is_emoji(char32_t cp) const {
  auto it = std::upper_bound(ranges_.begin(), ranges_.end(), cp, [](char32_t v, const Range& r) { return v < r.first; });
  if (it != ranges_.begin() && cp <= std::prev(it)->last) return true;
  return names_.count(cp) != 0;
}

std::string_view EmojiTable::name(char32_t cp) const {
  if (auto it = names_.find(cp); it != names_.end()) return it->second;
  return "UNKNOWN";
}

}  // namespace notimind
