#include "scriptkit/subword.hpp"

#include <algorithm>
#include <fstream>
#include <map>
#include <set>
#include <sstream>

#include "scriptkit/error.hpp"
#include "scriptkit/utf8.hpp"

namespace scriptkit {

namespace {

constexpr const char* kSpecialNames[] = {"[PAD]", "[UNK]", "[CLS]", "[BOS]", "[EOS]"};
constexpr std::string_view kHeaderTag = "#scriptkit-vocab";

std::string escape(std::u32string_view token) {
  std::string out;
  for (char32_t c : token) {
    switch (c) {
      case U'\\':
        out += "\\\\";
        break;
      case U'\t':
        out += "\\t";
        break;
      case U'\n':
        out += "\\n";
        break;
      case U'\r':
        out += "\\r";
        break;
      default:
        out += utf8::encode(c);
    }
  }
  return out;
}

std::u32string unescape(std::string_view text, std::size_t line) {
  const std::u32string raw = utf8::decode(text);
  std::u32string out;
  for (std::size_t i = 0; i < raw.size(); ++i) {
    if (raw[i] != U'\\') {
      out.push_back(raw[i]);
      continue;
    }
    if (++i == raw.size()) throw ParseError("dangling escape", line);
    switch (raw[i]) {
      case U'\\':
        out.push_back(U'\\');
        break;
      case U't':
        out.push_back(U'\t');
        break;
      case U'n':
        out.push_back(U'\n');
        break;
      case U'r':
        out.push_back(U'\r');
        break;
      default:
        throw ParseError("unknown escape", line);
    }
  }
  return out;
}

// Whitespace-separated words of every line, with whitespace characters
// recorded separately for the base inventory.
std::map<std::u32string, std::size_t> count_words(const std::vector<std::u32string>& corpus,
                                                  std::set<char32_t>& chars) {
  std::map<std::u32string, std::size_t> words;
  for (const auto& line : corpus) {
    std::u32string word;
    for (char32_t c : line) {
      chars.insert(c);
      if (utf8::is_whitespace(c)) {
        if (!word.empty()) ++words[word];
        word.clear();
      } else {
        word.push_back(c);
      }
    }
    if (!word.empty()) ++words[word];
  }
  return words;
}

}  // namespace

const char* to_string(VocabMode mode) {
  switch (mode) {
    case VocabMode::BpeLite:
      return "bpe-lite";
    case VocabMode::WordList:
      return "wordlist";
    case VocabMode::CharList:
      return "charlist";
  }
  return "?";
}

std::optional<VocabMode> parse_vocab_mode(std::string_view name) {
  for (VocabMode m : {VocabMode::BpeLite, VocabMode::WordList, VocabMode::CharList}) {
    if (name == to_string(m)) return m;
  }
  return std::nullopt;
}

// ---------------------------------------------------------------------------
// BoundaryMap

void BoundaryMap::validate(std::size_t char_count, bool allow_empty) const {
  std::size_t next = 0;
  for (std::size_t j = 0; j < ranges.size(); ++j) {
    const auto& r = ranges[j];
    if (r.empty()) {
      if (!allow_empty) throw AlignmentError("unit " + std::to_string(j) + " covers no characters");
      continue;
    }
    if (r.begin != next || r.end < r.begin) {
      throw AlignmentError("unit " + std::to_string(j) + " does not start at character " +
                           std::to_string(next));
    }
    next = r.end;
  }
  if (next != char_count) {
    throw AlignmentError("boundary map covers " + std::to_string(next) + " characters, sequence has " +
                         std::to_string(char_count));
  }
}

BoundaryMap BoundaryMap::characters(std::size_t char_count) {
  BoundaryMap map;
  map.ranges.reserve(char_count);
  for (std::size_t i = 0; i < char_count; ++i) map.ranges.push_back({i, i + 1});
  return map;
}

BoundaryMap BoundaryMap::words(std::u32string_view text) {
  BoundaryMap map;
  std::size_t i = 0;
  while (i < text.size()) {
    if (utf8::is_whitespace(text[i])) {
      map.ranges.push_back({i, i + 1});
      ++i;
      continue;
    }
    std::size_t j = i;
    while (j < text.size() && !utf8::is_whitespace(text[j])) ++j;
    map.ranges.push_back({i, j});
    i = j;
  }
  return map;
}

// ---------------------------------------------------------------------------
// SubwordVocab

SubwordVocab::SubwordVocab() {
  for (const char* name : kSpecialNames) tokens_.push_back(utf8::decode(name));
}

void SubwordVocab::push(std::u32string token) {
  if (index_.contains(token)) return;
  max_len_ = std::max(max_len_, token.size());
  index_.emplace(token, static_cast<int>(tokens_.size()));
  tokens_.push_back(std::move(token));
}

SubwordVocab SubwordVocab::train(const std::vector<std::u32string>& corpus, std::size_t target_size,
                                 VocabMode mode, bool add_cls) {
  std::set<char32_t> chars;
  const auto words = count_words(corpus, chars);
  if (chars.empty()) throw ConfigError("cannot train a vocabulary on an empty corpus");
  const std::size_t base = kSpecialCount + chars.size();
  if (target_size < base) {
    throw ConfigError("target size " + std::to_string(target_size) + " is below the base inventory of " +
                      std::to_string(base));
  }

  SubwordVocab vocab;
  vocab.mode_ = mode;
  vocab.add_cls_ = add_cls;
  for (char32_t c : chars) vocab.push(std::u32string(1, c));
  if (mode == VocabMode::CharList) return vocab;

  if (mode == VocabMode::WordList) {
    std::vector<std::pair<std::u32string, std::size_t>> ranked(words.begin(), words.end());
    std::stable_sort(ranked.begin(), ranked.end(),
                     [](const auto& a, const auto& b) { return a.second > b.second; });
    for (const auto& [word, _] : ranked) {
      if (vocab.size() >= target_size) break;
      vocab.push(word);
    }
    return vocab;
  }

  // bpe-lite: merge the most frequent adjacent pair inside words; ties go
  // to the lexicographically smallest pair.
  std::vector<std::pair<std::vector<std::u32string>, std::size_t>> segmented;
  for (const auto& [word, count] : words) {
    std::vector<std::u32string> pieces;
    for (char32_t c : word) pieces.emplace_back(1, c);
    segmented.emplace_back(std::move(pieces), count);
  }
  while (vocab.size() < target_size) {
    std::map<std::pair<std::u32string, std::u32string>, std::size_t> pairs;
    for (const auto& [pieces, count] : segmented) {
      for (std::size_t i = 0; i + 1 < pieces.size(); ++i) pairs[{pieces[i], pieces[i + 1]}] += count;
    }
    if (pairs.empty()) break;
    auto best = pairs.begin();
    for (auto it = pairs.begin(); it != pairs.end(); ++it) {
      if (it->second > best->second) best = it;
    }
    const auto [left, right] = best->first;
    for (auto& [pieces, _] : segmented) {
      std::vector<std::u32string> merged;
      merged.reserve(pieces.size());
      for (std::size_t i = 0; i < pieces.size(); ++i) {
        if (i + 1 < pieces.size() && pieces[i] == left && pieces[i + 1] == right) {
          merged.push_back(left + right);
          ++i;
        } else {
          merged.push_back(pieces[i]);
        }
      }
      pieces = std::move(merged);
    }
    vocab.push(left + right);
  }
  return vocab;
}

std::string SubwordVocab::to_text() const {
  std::string out(kHeaderTag);
  out += "\tmode=" + std::string(to_string(mode_));
  out += "\tsize=" + std::to_string(tokens_.size());
  out += "\tcls=" + std::string(add_cls_ ? "1" : "0");
  out += '\n';
  for (std::size_t i = 0; i < tokens_.size(); ++i) {
    out += escape(tokens_[i]);
    out += '\t';
    out += std::to_string(i);
    out += '\n';
  }
  return out;
}

SubwordVocab SubwordVocab::parse(std::string_view text) {
  std::vector<std::string_view> lines;
  std::size_t pos = 0;
  while (pos < text.size()) {
    std::size_t end = text.find('\n', pos);
    if (end == std::string_view::npos) end = text.size();
    lines.push_back(text.substr(pos, end - pos));
    pos = end + 1;
  }
  if (lines.empty() || !lines[0].starts_with(kHeaderTag)) throw ParseError("missing vocabulary header", 1);

  SubwordVocab vocab;
  std::optional<std::size_t> declared_size;
  {
    std::string header(lines[0].substr(kHeaderTag.size()));
    std::istringstream fields(header);
    std::string field;
    while (fields >> field) {
      const auto eq = field.find('=');
      if (eq == std::string::npos) throw ParseError("malformed header field " + field, 1);
      const std::string key = field.substr(0, eq);
      const std::string value = field.substr(eq + 1);
      if (key == "mode") {
        auto m = parse_vocab_mode(value);
        if (!m) throw ParseError("unknown vocabulary mode " + value, 1);
        vocab.mode_ = *m;
      } else if (key == "size") {
        declared_size = std::stoul(value);
      } else if (key == "cls") {
        vocab.add_cls_ = value == "1";
      } else {
        throw ParseError("unknown header field " + key, 1);
      }
    }
  }
  std::size_t expected_id = 0;
  for (std::size_t n = 1; n < lines.size(); ++n) {
    std::string_view line = lines[n];
    if (!line.empty() && line.back() == '\r') line.remove_suffix(1);
    if (line.empty()) continue;
    const std::size_t tab = line.rfind('\t');
    if (tab == std::string_view::npos) throw ParseError("expected <token> TAB <id>", n + 1);
    const std::size_t id = std::stoul(std::string(line.substr(tab + 1)));
    if (id != expected_id) throw ParseError("ids must be consecutive from 0", n + 1);
    ++expected_id;
    if (id < kSpecialCount) continue;
    std::u32string token = unescape(line.substr(0, tab), n + 1);
    if (token.empty() || vocab.index_.contains(token)) throw ParseError("empty or duplicate token", n + 1);
    vocab.push(std::move(token));
  }
  if (expected_id < kSpecialCount) throw ParseError("vocabulary lacks special tokens", lines.size());
  if (declared_size && *declared_size != vocab.size()) {
    throw ParseError("header size does not match entry count", 1);
  }
  return vocab;
}

SubwordVocab SubwordVocab::load(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw ConfigError("cannot open vocabulary " + path.string());
  std::ostringstream buf;
  buf << in.rdbuf();
  return parse(buf.str());
}

std::optional<int> SubwordVocab::find(std::u32string_view token) const {
  auto it = index_.find(std::u32string(token));
  if (it == index_.end()) return std::nullopt;
  return it->second;
}

int SubwordVocab::id_or_unk(std::u32string_view token) const { return find(token).value_or(kUnk); }

std::u32string SubwordVocab::token(int id) const {
  if (id < 0 || static_cast<std::size_t>(id) >= tokens_.size()) {
    throw IndexError("subword id out of range: " + std::to_string(id));
  }
  return tokens_[static_cast<std::size_t>(id)];
}

// ---------------------------------------------------------------------------

Encoding encode(std::u32string_view text, const SubwordVocab& vocab, bool add_cls) {
  Encoding enc;
  if (add_cls) {
    enc.ids.push_back(SubwordVocab::kCls);
    enc.boundary.ranges.push_back({0, 0});
    enc.has_cls = true;
  }
  std::size_t i = 0;
  while (i < text.size()) {
    if (utf8::is_whitespace(text[i])) {
      enc.ids.push_back(vocab.id_or_unk(text.substr(i, 1)));
      enc.boundary.ranges.push_back({i, i + 1});
      ++i;
      continue;
    }
    std::size_t limit = i;
    while (limit < text.size() && limit - i < vocab.max_token_length() && !utf8::is_whitespace(text[limit])) {
      ++limit;
    }
    std::size_t len = limit - i;
    int id = SubwordVocab::kUnk;
    for (; len > 0; --len) {
      if (auto found = vocab.find(text.substr(i, len))) {
        id = *found;
        break;
      }
    }
    if (len == 0) len = 1;
    enc.ids.push_back(id);
    enc.boundary.ranges.push_back({i, i + len});
    i += len;
  }
  return enc;
}

std::vector<std::size_t> align_last_chars(const BoundaryMap& boundary, std::size_t char_count) {
  boundary.validate(char_count, false);
  std::vector<std::size_t> last;
  last.reserve(boundary.unit_count());
  for (const auto& r : boundary.ranges) last.push_back(r.end - 1);
  return last;
}

std::vector<std::size_t> align_last_chars(const BoundaryMap& boundary, const SubcharSequence& seq) {
  return align_last_chars(boundary, seq.char_count());
}

}  // namespace scriptkit
