#pragma once

#include <cstdint>
#include <filesystem>
#include <map>
#include <optional>
#include <string>
#include <string_view>
#include <unordered_map>
#include <vector>

namespace scriptkit {

enum class Scheme { Jamo, Stroke, Cji, Bts };

inline constexpr Scheme kAllSchemes[] = {Scheme::Jamo, Scheme::Stroke, Scheme::Cji, Scheme::Bts};

const char* to_string(Scheme scheme);
/// Accepts "jamo", "stroke", "cji", "bts" (any case).
std::optional<Scheme> parse_scheme(std::string_view name);

/// Token slots reserved per character for the initial, medial and final.
struct SlotWidths {
  std::size_t initial;
  std::size_t vowel;
  std::size_t final_;
  std::size_t total() const { return initial + vowel + final_; }
};

SlotWidths slot_widths(Scheme scheme);

inline constexpr char32_t kPadSymbol = 0xE000;
inline constexpr char32_t kClsSymbol = 0xE001;
inline constexpr char32_t kEmptyFinalSymbol = 0x2583;  // ▃
inline constexpr char32_t kStrokeFiller = U'-';
inline constexpr char32_t kCheonjiinDot = 0x00B7;  // ·

inline constexpr std::size_t kMaxConsonantAtoms = 4;
inline constexpr std::size_t kMaxVowelAtoms = 5;

/// Letter -> atom sequence maps used by the Stroke, Cji and BTS schemes.
/// Entries must be unique within consonants and within vowels so that a
/// tokenized sequence can always be decoded back to text.
class DecompTable {
 public:
  /// Parses the TAB separated table format; validates coverage, widths and
  /// uniqueness. Throws ParseError or ConfigError.
  static DecompTable parse(std::string_view text);
  static DecompTable load(const std::filesystem::path& path);
  /// The table shipped in data/decomp_table.tsv, compiled in.
  static const DecompTable& builtin();

  const std::u32string& consonant(char32_t letter) const;
  const std::u32string& vowel(char32_t letter) const;
  std::optional<char32_t> consonant_from_atoms(const std::u32string& atoms) const;
  std::optional<char32_t> vowel_from_atoms(const std::u32string& atoms) const;

  /// Distinct atoms used by any entry, ascending by code point.
  std::vector<char32_t> atoms() const;
  std::string to_text() const;

 private:
  std::map<char32_t, std::u32string> consonants_;
  std::map<char32_t, std::u32string> vowels_;
  std::map<std::u32string, char32_t> consonant_lookup_;
  std::map<std::u32string, char32_t> vowel_lookup_;
};

enum class Role : std::uint8_t { Initial, Vowel, Final, Other };

char role_label(Role role);

/// Token ids for the subcharacter embedding table. Layout:
/// [PAD, EMPTY_FINAL, CLS, OTHER] + structural symbols (all compatibility
/// letters and table atoms) + printable ASCII passthrough characters.
class SubcharVocab {
 public:
  explicit SubcharVocab(const DecompTable& table);

  static constexpr int kPad = 0;
  static constexpr int kEmptyFinal = 1;
  static constexpr int kCls = 2;
  static constexpr int kOther = 3;

  int structural_id(char32_t symbol) const;
  /// Dedicated id for printable ASCII, kOther for everything else.
  int passthrough_id(char32_t ch) const;
  std::size_t size() const { return names_.size(); }
  /// Human readable token name (UTF-8), used in CSV exports.
  const std::string& name(int id) const;

 private:
  std::unordered_map<char32_t, int> structural_;
  std::unordered_map<char32_t, int> passthrough_;
  std::vector<std::string> names_;
};

/// Fixed-width per character token sequence. Character k occupies tokens
/// [k*W, (k+1)*W). ids, roles and symbols are parallel arrays; symbols
/// keep the original code point so passthrough tokens can be decoded.
struct SubcharSequence {
  Scheme scheme = Scheme::Jamo;
  SlotWidths widths{1, 1, 1};
  std::vector<int> ids;
  std::vector<Role> roles;
  std::vector<char32_t> symbols;

  struct Span {
    std::size_t begin;
    std::size_t length;
  };

  std::size_t size() const { return ids.size(); }
  std::size_t width() const { return widths.total(); }
  std::size_t char_count() const { return width() == 0 ? 0 : ids.size() / width(); }
  /// Throws IndexError for k >= char_count().
  Span char_span(std::size_t k) const;
};

enum class CharKind { Syllable, BareJamo, Passthrough };

/// Classifies character k from its role pattern.
CharKind char_kind(const SubcharSequence& seq, std::size_t k);

struct RoleGroups {
  SubcharSequence::Span initial;
  SubcharSequence::Span vowel;
  SubcharSequence::Span final_;
};

/// Slot spans of character k. Throws IndexError when k is out of range.
RoleGroups group_roles(const SubcharSequence& seq, std::size_t k);

class SubcharTokenizer {
 public:
  SubcharTokenizer();
  explicit SubcharTokenizer(DecompTable table);

  SubcharSequence tokenize(std::u32string_view text, Scheme scheme) const;
  SubcharSequence tokenize(std::string_view utf8_text, Scheme scheme) const;
  /// Throws MalformedSequenceError when the role pattern or atoms do not
  /// describe a character.
  std::u32string detokenize(const SubcharSequence& seq) const;

  const SubcharVocab& vocab() const { return vocab_; }
  const DecompTable& table() const { return table_; }

 private:
  void push_slot(SubcharSequence& seq, std::u32string_view atoms, std::size_t width, Role role) const;
  std::u32string consonant_atoms(char32_t letter, Scheme scheme) const;
  std::u32string vowel_atoms(char32_t letter, Scheme scheme) const;

  DecompTable table_;
  SubcharVocab vocab_;
};

}  // namespace scriptkit
