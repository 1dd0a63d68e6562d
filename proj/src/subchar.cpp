#include "scriptkit/subchar.hpp"

#include <algorithm>
#include <cctype>
#include <fstream>
#include <set>
#include <sstream>

#include "scriptkit/error.hpp"
#include "scriptkit/hangul.hpp"
#include "scriptkit/utf8.hpp"

namespace scriptkit {

namespace {

const char kBuiltinTable[] =
#include "default_decomp_table.inc"
    ;

std::string_view trim(std::string_view s) {
  while (!s.empty() && (s.front() == ' ' || s.front() == '\r')) s.remove_prefix(1);
  while (!s.empty() && (s.back() == ' ' || s.back() == '\r')) s.remove_suffix(1);
  return s;
}

}  // namespace

const char* to_string(Scheme scheme) {
  switch (scheme) {
    case Scheme::Jamo:
      return "jamo";
    case Scheme::Stroke:
      return "stroke";
    case Scheme::Cji:
      return "cji";
    case Scheme::Bts:
      return "bts";
  }
  return "?";
}

std::optional<Scheme> parse_scheme(std::string_view name) {
  std::string lower(name);
  std::transform(lower.begin(), lower.end(), lower.begin(),
                 [](unsigned char c) { return static_cast<char>(std::tolower(c)); });
  for (Scheme s : kAllSchemes) {
    if (lower == to_string(s)) return s;
  }
  return std::nullopt;
}

SlotWidths slot_widths(Scheme scheme) {
  switch (scheme) {
    case Scheme::Jamo:
      return {1, 1, 1};
    case Scheme::Stroke:
      return {4, 1, 4};
    case Scheme::Cji:
      return {1, 5, 1};
    case Scheme::Bts:
      return {4, 5, 4};
  }
  return {1, 1, 1};
}

char role_label(Role role) {
  switch (role) {
    case Role::Initial:
      return 'I';
    case Role::Vowel:
      return 'V';
    case Role::Final:
      return 'F';
    case Role::Other:
      return 'O';
  }
  return '?';
}

// ---------------------------------------------------------------------------
// DecompTable

DecompTable DecompTable::parse(std::string_view text) {
  DecompTable table;
  std::size_t line_no = 0;
  std::size_t pos = 0;
  while (pos <= text.size()) {
    const std::size_t end = std::min(text.find('\n', pos), text.size());
    std::string_view line = trim(text.substr(pos, end - pos));
    pos = end + 1;
    ++line_no;
    if (line.empty() || line.front() == '#') {
      if (end == text.size()) break;
      continue;
    }
    const std::size_t tab = line.find('\t');
    if (tab == std::string_view::npos) throw ParseError("expected <letter> TAB <atoms>", line_no);
    const std::u32string letter = utf8::decode(trim(line.substr(0, tab)));
    if (letter.size() != 1 || !hangul::is_compat_jamo(letter[0])) {
      throw ParseError("entry key must be a single compatibility jamo letter", line_no);
    }
    std::u32string atoms;
    std::string_view rest = line.substr(tab + 1);
    while (true) {
      const std::size_t comma = rest.find(',');
      const std::u32string atom = utf8::decode(trim(rest.substr(0, comma)));
      if (atom.size() != 1) throw ParseError("each atom must be a single character", line_no);
      if (atom[0] == kPadSymbol || atom[0] == kEmptyFinalSymbol || atom[0] == kClsSymbol) {
        throw ParseError("reserved symbol used as an atom", line_no);
      }
      atoms.push_back(atom[0]);
      if (comma == std::string_view::npos) break;
      rest.remove_prefix(comma + 1);
    }
    const bool consonant = hangul::is_compat_consonant(letter[0]);
    const std::size_t limit = consonant ? kMaxConsonantAtoms : kMaxVowelAtoms;
    if (atoms.size() > limit) throw ParseError("entry exceeds its slot width", line_no);
    auto& map = consonant ? table.consonants_ : table.vowels_;
    auto& lookup = consonant ? table.consonant_lookup_ : table.vowel_lookup_;
    if (!map.emplace(letter[0], atoms).second) throw ParseError("duplicate entry", line_no);
    if (!lookup.emplace(atoms, letter[0]).second) {
      throw ParseError("atom sequence already used by another letter", line_no);
    }
    if (end == text.size()) break;
  }
  for (char32_t c = 0x3131; c <= 0x314E; ++c) {
    if (!table.consonants_.contains(c)) {
      throw ConfigError("decomposition table is missing consonant " + utf8::encode(c));
    }
  }
  for (char32_t v : hangul::inventory().jungseong) {
    if (!table.vowels_.contains(v)) {
      throw ConfigError("decomposition table is missing vowel " + utf8::encode(v));
    }
  }
  return table;
}

DecompTable DecompTable::load(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw ConfigError("cannot open decomposition table " + path.string());
  std::ostringstream buf;
  buf << in.rdbuf();
  return parse(buf.str());
}

const DecompTable& DecompTable::builtin() {
  static const DecompTable table = parse(kBuiltinTable);
  return table;
}

const std::u32string& DecompTable::consonant(char32_t letter) const {
  auto it = consonants_.find(letter);
  if (it == consonants_.end()) throw ConfigError("no consonant entry for " + utf8::encode(letter));
  return it->second;
}

const std::u32string& DecompTable::vowel(char32_t letter) const {
  auto it = vowels_.find(letter);
  if (it == vowels_.end()) throw ConfigError("no vowel entry for " + utf8::encode(letter));
  return it->second;
}

std::optional<char32_t> DecompTable::consonant_from_atoms(const std::u32string& atoms) const {
  auto it = consonant_lookup_.find(atoms);
  if (it == consonant_lookup_.end()) return std::nullopt;
  return it->second;
}

std::optional<char32_t> DecompTable::vowel_from_atoms(const std::u32string& atoms) const {
  auto it = vowel_lookup_.find(atoms);
  if (it == vowel_lookup_.end()) return std::nullopt;
  return it->second;
}

std::vector<char32_t> DecompTable::atoms() const {
  std::set<char32_t> all;
  for (const auto& [_, a] : consonants_) all.insert(a.begin(), a.end());
  for (const auto& [_, a] : vowels_) all.insert(a.begin(), a.end());
  return {all.begin(), all.end()};
}

std::string DecompTable::to_text() const {
  std::string out;
  auto emit = [&out](const std::map<char32_t, std::u32string>& map) {
    for (const auto& [letter, atoms] : map) {
      out += utf8::encode(letter);
      out += '\t';
      for (std::size_t i = 0; i < atoms.size(); ++i) {
        if (i) out += ',';
        out += utf8::encode(atoms[i]);
      }
      out += '\n';
    }
  };
  emit(consonants_);
  emit(vowels_);
  return out;
}

// ---------------------------------------------------------------------------
// SubcharVocab

SubcharVocab::SubcharVocab(const DecompTable& table) {
  names_ = {"[PAD]", "[EMPTY]", "[CLS]", "[OTHER]"};
  std::set<char32_t> structural;
  for (char32_t c = 0x3131; c <= 0x3163; ++c) structural.insert(c);
  for (char32_t a : table.atoms()) structural.insert(a);
  for (char32_t s : structural) {
    structural_.emplace(s, static_cast<int>(names_.size()));
    names_.push_back(utf8::encode(s));
  }
  for (char32_t c = 0x20; c <= 0x7E; ++c) {
    passthrough_.emplace(c, static_cast<int>(names_.size()));
    names_.push_back("'" + utf8::encode(c) + "'");
  }
}

int SubcharVocab::structural_id(char32_t symbol) const {
  auto it = structural_.find(symbol);
  if (it == structural_.end()) throw ConfigError("symbol not in subcharacter vocabulary: " + utf8::encode(symbol));
  return it->second;
}

int SubcharVocab::passthrough_id(char32_t ch) const {
  auto it = passthrough_.find(ch);
  return it == passthrough_.end() ? kOther : it->second;
}

const std::string& SubcharVocab::name(int id) const {
  if (id < 0 || static_cast<std::size_t>(id) >= names_.size()) {
    throw IndexError("subcharacter id out of range: " + std::to_string(id));
  }
  return names_[static_cast<std::size_t>(id)];
}

// ---------------------------------------------------------------------------
// SubcharSequence helpers

SubcharSequence::Span SubcharSequence::char_span(std::size_t k) const {
  if (k >= char_count()) {
    throw IndexError("character index " + std::to_string(k) + " out of range for " +
                     std::to_string(char_count()) + " characters");
  }
  return {k * width(), width()};
}

CharKind char_kind(const SubcharSequence& seq, std::size_t k) {
  const auto span = seq.char_span(k);
  if (seq.roles[span.begin] != Role::Initial) return CharKind::Passthrough;
  if (span.length > 1 && seq.roles[span.begin + 1] == Role::Other) return CharKind::BareJamo;
  return CharKind::Syllable;
}

RoleGroups group_roles(const SubcharSequence& seq, std::size_t k) {
  const auto span = seq.char_span(k);
  const auto& w = seq.widths;
  return {{span.begin, w.initial},
          {span.begin + w.initial, w.vowel},
          {span.begin + w.initial + w.vowel, w.final_}};
}

// ---------------------------------------------------------------------------
// SubcharTokenizer

SubcharTokenizer::SubcharTokenizer() : SubcharTokenizer(DecompTable::builtin()) {}

SubcharTokenizer::SubcharTokenizer(DecompTable table) : table_(std::move(table)), vocab_(table_) {}

std::u32string SubcharTokenizer::consonant_atoms(char32_t letter, Scheme scheme) const {
  if (scheme == Scheme::Stroke || scheme == Scheme::Bts) return table_.consonant(letter);
  return std::u32string(1, letter);
}

std::u32string SubcharTokenizer::vowel_atoms(char32_t letter, Scheme scheme) const {
  if (scheme == Scheme::Cji || scheme == Scheme::Bts) return table_.vowel(letter);
  return std::u32string(1, letter);
}

void SubcharTokenizer::push_slot(SubcharSequence& seq, std::u32string_view atoms, std::size_t width,
                                 Role role) const {
  for (std::size_t i = 0; i < width; ++i) {
    if (i < atoms.size()) {
      const char32_t a = atoms[i];
      seq.ids.push_back(a == kEmptyFinalSymbol ? SubcharVocab::kEmptyFinal : vocab_.structural_id(a));
      seq.symbols.push_back(a);
    } else {
      seq.ids.push_back(SubcharVocab::kPad);
      seq.symbols.push_back(kPadSymbol);
    }
    seq.roles.push_back(role);
  }
}

SubcharSequence SubcharTokenizer::tokenize(std::string_view utf8_text, Scheme scheme) const {
  return tokenize(utf8::decode(utf8_text), scheme);
}

SubcharSequence SubcharTokenizer::tokenize(std::u32string_view text, Scheme scheme) const {
  SubcharSequence seq;
  seq.scheme = scheme;
  seq.widths = slot_widths(scheme);
  const std::size_t w = seq.width();
  seq.ids.reserve(text.size() * w);
  seq.roles.reserve(text.size() * w);
  seq.symbols.reserve(text.size() * w);
  const auto& inv = hangul::inventory();
  for (char32_t ch : text) {
    if (auto block = hangul::decompose(ch)) {
      push_slot(seq, consonant_atoms(inv.choseong[block->cho], scheme), seq.widths.initial, Role::Initial);
      push_slot(seq, vowel_atoms(inv.jungseong[block->jung], scheme), seq.widths.vowel, Role::Vowel);
      const std::u32string final_atoms = block->has_final()
                                             ? consonant_atoms(inv.jongseong[block->jong], scheme)
                                             : std::u32string(1, kEmptyFinalSymbol);
      push_slot(seq, final_atoms, seq.widths.final_, Role::Final);
    } else if (hangul::is_compat_jamo(ch)) {
      seq.ids.push_back(vocab_.structural_id(ch));
      seq.roles.push_back(Role::Initial);
      seq.symbols.push_back(ch);
      push_slot(seq, {}, w - 1, Role::Other);
    } else {
      seq.ids.push_back(vocab_.passthrough_id(ch));
      seq.roles.push_back(Role::Other);
      seq.symbols.push_back(ch);
      push_slot(seq, {}, w - 1, Role::Other);
    }
  }
  return seq;
}

std::u32string SubcharTokenizer::detokenize(const SubcharSequence& seq) const {
  const std::size_t w = seq.width();
  if (w == 0 || seq.ids.size() % w != 0 || seq.roles.size() != seq.ids.size() ||
      seq.symbols.size() != seq.ids.size()) {
    throw MalformedSequenceError("sequence length is not a whole number of characters");
  }
  auto fail = [](std::size_t k, const char* what) {
    throw MalformedSequenceError("character " + std::to_string(k) + ": " + what);
  };
  // Atoms of a slot must be a non-empty prefix followed only by pads.
  auto slot_atoms = [&](std::size_t begin, std::size_t width, Role role, std::size_t k) {
    std::u32string atoms;
    bool padding = false;
    for (std::size_t i = begin; i < begin + width; ++i) {
      if (seq.roles[i] != role) fail(k, "role pattern violated");
      if (seq.symbols[i] == kPadSymbol) {
        padding = true;
      } else {
        if (padding) fail(k, "atom after padding");
        atoms.push_back(seq.symbols[i]);
      }
    }
    if (atoms.empty()) fail(k, "empty slot");
    return atoms;
  };

  const auto& widths = seq.widths;
  std::u32string out;
  out.reserve(seq.char_count());
  for (std::size_t k = 0; k < seq.char_count(); ++k) {
    const std::size_t base = k * w;
    const Role first = seq.roles[base];
    if (first == Role::Other || (first == Role::Initial && w > 1 && seq.roles[base + 1] == Role::Other)) {
      for (std::size_t i = base + 1; i < base + w; ++i) {
        if (seq.roles[i] != Role::Other || seq.symbols[i] != kPadSymbol) fail(k, "passthrough span not padded");
      }
      if (first == Role::Initial && !hangul::is_compat_jamo(seq.symbols[base])) fail(k, "bare letter is not a jamo");
      out.push_back(seq.symbols[base]);
      continue;
    }
    if (first != Role::Initial) fail(k, "role pattern violated");
    const std::u32string init = slot_atoms(base, widths.initial, Role::Initial, k);
    const std::u32string vow = slot_atoms(base + widths.initial, widths.vowel, Role::Vowel, k);
    const std::u32string fin =
        slot_atoms(base + widths.initial + widths.vowel, widths.final_, Role::Final, k);

    const bool split_consonants = seq.scheme == Scheme::Stroke || seq.scheme == Scheme::Bts;
    const bool split_vowels = seq.scheme == Scheme::Cji || seq.scheme == Scheme::Bts;
    auto consonant = [&](const std::u32string& atoms) -> std::optional<char32_t> {
      if (split_consonants) return table_.consonant_from_atoms(atoms);
      if (atoms.size() == 1) return atoms[0];
      return std::nullopt;
    };
    std::optional<char32_t> vowel_letter;
    if (split_vowels) {
      vowel_letter = table_.vowel_from_atoms(vow);
    } else if (vow.size() == 1) {
      vowel_letter = vow[0];
    }

    hangul::SyllableBlock block;
    const auto cho_letter = consonant(init);
    const auto cho = cho_letter ? hangul::choseong_index(*cho_letter) : std::nullopt;
    const auto jung = vowel_letter ? hangul::jungseong_index(*vowel_letter) : std::nullopt;
    if (!cho) fail(k, "initial atoms do not form a consonant");
    if (!jung) fail(k, "vowel atoms do not form a vowel");
    block.cho = *cho;
    block.jung = *jung;
    if (fin.size() == 1 && fin[0] == kEmptyFinalSymbol) {
      block.jong = 0;
    } else {
      const auto jong_letter = consonant(fin);
      const auto jong = jong_letter ? hangul::jongseong_index(*jong_letter) : std::nullopt;
      if (!jong) fail(k, "final atoms do not form a consonant");
      block.jong = *jong;
    }
    out.push_back(hangul::compose(block));
  }
  return out;
}

}  // namespace scriptkit
