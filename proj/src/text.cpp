#include <clocale>
#include <cwctype>
#include <locale.h>

#include <algorithm>
#include <string>
#include <string_view>
#include <vector>

#include "parallel.hpp"
#include "topicmine/corpus.hpp"

namespace topicmine {
namespace {

// Character classification for non-ASCII code points comes from glibc's
// built-in C.UTF-8 tables. If that locale is missing, non-ASCII letters are
// treated as separators.
class UnicodeCtype {
 public:
  UnicodeCtype() : locale_(newlocale(LC_CTYPE_MASK, "C.UTF-8", static_cast<locale_t>(nullptr))) {}
  ~UnicodeCtype() {
    if (locale_ != static_cast<locale_t>(nullptr)) freelocale(locale_);
  }
  UnicodeCtype(const UnicodeCtype&) = delete;
  UnicodeCtype& operator=(const UnicodeCtype&) = delete;

  bool is_alpha(char32_t cp) const {
    if (cp < 0x80) return (cp >= 'a' && cp <= 'z') || (cp >= 'A' && cp <= 'Z');
    if (locale_ == static_cast<locale_t>(nullptr)) return false;
    return iswalpha_l(static_cast<wint_t>(cp), locale_) != 0;
  }

  bool is_digit(char32_t cp) const {
    if (cp < 0x80) return cp >= '0' && cp <= '9';
    if (locale_ == static_cast<locale_t>(nullptr)) return false;
    // Non-ASCII decimal digits (Arabic-Indic etc.) are alnum but not alpha.
    return iswalnum_l(static_cast<wint_t>(cp), locale_) != 0 &&
           iswalpha_l(static_cast<wint_t>(cp), locale_) == 0;
  }

  char32_t to_lower(char32_t cp) const {
    if (cp < 0x80) return (cp >= 'A' && cp <= 'Z') ? cp + 32 : cp;
    if (locale_ == static_cast<locale_t>(nullptr)) return cp;
    return static_cast<char32_t>(towlower_l(static_cast<wint_t>(cp), locale_));
  }

 private:
  locale_t locale_;
};

const UnicodeCtype& ctype() {
  static const UnicodeCtype instance;
  return instance;
}

constexpr char32_t kReplacement = 0xFFFD;

// Decodes one code point starting at text[pos] and advances pos. Invalid
// sequences decode to U+FFFD, one byte at a time.
char32_t next_code_point(std::string_view text, std::size_t& pos) {
  const auto lead = static_cast<unsigned char>(text[pos]);
  int extra = 0;
  char32_t cp = 0;
  if (lead < 0x80) {
    ++pos;
    return lead;
  } else if ((lead & 0xE0) == 0xC0) {
    extra = 1;
    cp = lead & 0x1F;
  } else if ((lead & 0xF0) == 0xE0) {
    extra = 2;
    cp = lead & 0x0F;
  } else if ((lead & 0xF8) == 0xF0) {
    extra = 3;
    cp = lead & 0x07;
  } else {
    ++pos;
    return kReplacement;
  }
  if (pos + static_cast<std::size_t>(extra) >= text.size()) {
    ++pos;
    return kReplacement;
  }
  for (int i = 1; i <= extra; ++i) {
    const auto cont = static_cast<unsigned char>(text[pos + static_cast<std::size_t>(i)]);
    if ((cont & 0xC0) != 0x80) {
      ++pos;
      return kReplacement;
    }
    cp = (cp << 6) | (cont & 0x3F);
  }
  pos += static_cast<std::size_t>(extra) + 1;
  return cp;
}

void append_utf8(std::string& out, char32_t cp) {
  if (cp < 0x80) {
    out.push_back(static_cast<char>(cp));
  } else if (cp < 0x800) {
    out.push_back(static_cast<char>(0xC0 | (cp >> 6)));
    out.push_back(static_cast<char>(0x80 | (cp & 0x3F)));
  } else if (cp < 0x10000) {
    out.push_back(static_cast<char>(0xE0 | (cp >> 12)));
    out.push_back(static_cast<char>(0x80 | ((cp >> 6) & 0x3F)));
    out.push_back(static_cast<char>(0x80 | (cp & 0x3F)));
  } else {
    out.push_back(static_cast<char>(0xF0 | (cp >> 18)));
    out.push_back(static_cast<char>(0x80 | ((cp >> 12) & 0x3F)));
    out.push_back(static_cast<char>(0x80 | ((cp >> 6) & 0x3F)));
    out.push_back(static_cast<char>(0x80 | (cp & 0x3F)));
  }
}

constexpr std::size_t kMinTokenLength = 3;

}  // namespace

const std::vector<std::string>& default_extra_stopwords() {
  static const std::vector<std::string> words = {
      "appendix", "area", "australia", "fax",     "figure", "ltd",   "map",
      "page",     "phone", "project",  "report", "year",   "within"};
  return words;
}

StopwordList StopwordList::defaults() {
  StopwordList list;
  list.base.insert(english_stopwords().begin(), english_stopwords().end());
  list.extra.insert(default_extra_stopwords().begin(), default_extra_stopwords().end());
  return list;
}

bool StopwordList::contains(std::string_view word) const {
  return base.find(word) != base.end() || extra.find(word) != extra.end();
}

std::vector<std::string> tokenize(std::string_view text) {
  const UnicodeCtype& ct = ctype();
  std::vector<std::string> tokens;
  std::string current;
  std::size_t letters = 0;
  bool has_digit = false;

  auto flush = [&] {
    if (!has_digit && letters >= kMinTokenLength) tokens.push_back(current);
    current.clear();
    letters = 0;
    has_digit = false;
  };

  std::size_t pos = 0;
  while (pos < text.size()) {
    const char32_t cp = next_code_point(text, pos);
    if (ct.is_alpha(cp)) {
      append_utf8(current, ct.to_lower(cp));
      ++letters;
    } else if (ct.is_digit(cp)) {
      has_digit = true;
    } else if (letters > 0 || has_digit) {
      flush();
    }
  }
  flush();
  return tokens;
}

std::vector<std::string> remove_stopwords(std::span<const std::string> tokens,
                                          const StopwordList& stops) {
  std::vector<std::string> kept;
  kept.reserve(tokens.size());
  std::copy_if(tokens.begin(), tokens.end(), std::back_inserter(kept),
               [&](const std::string& t) { return !stops.contains(t); });
  return kept;
}

TokenizedDocument preprocess(const RawDocument& doc, const StopwordList& stops) {
  TokenizedDocument out;
  out.doc_id = doc.doc_id;
  const auto kept = remove_stopwords(tokenize(doc.text), stops);
  out.tokens.reserve(kept.size());
  for (const auto& token : kept) out.tokens.push_back(stem(token));
  out.empty = out.tokens.empty();
  return out;
}

std::vector<TokenizedDocument> preprocess_all(std::span<const RawDocument> docs,
                                              const StopwordList& stops, std::size_t jobs) {
  std::vector<TokenizedDocument> out(docs.size());
  detail::parallel_for(docs.size(), jobs, [&](std::size_t i) { out[i] = preprocess(docs[i], stops); });
  return out;
}

}  // namespace topicmine
