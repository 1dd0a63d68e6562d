#pragma once

#include <cstdint>
#include <istream>
#include <map>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

namespace scriptkit::oracle {

enum class Bio { B, I };
enum class ActionKind { Keep, Mod, Noop };
enum class ModGranularity { Subcharacter, Character };

const char* to_string(ActionKind kind);
const char* to_string(ModGranularity level);

/// One oracle action such as B-KEEP or I-MOD-ㄴ. target is set iff kind is Mod.
struct ActionTag {
  Bio bio = Bio::B;
  ActionKind kind = ActionKind::Keep;
  std::optional<std::u32string> target;

  static ActionTag keep(Bio bio) { return {bio, ActionKind::Keep, std::nullopt}; }
  static ActionTag noop(Bio bio) { return {bio, ActionKind::Noop, std::nullopt}; }
  static ActionTag mod(Bio bio, std::u32string target) { return {bio, ActionKind::Mod, std::move(target)}; }

  /// Throws scriptkit::Error on anything but (B|I)-(KEEP|NOOP|MOD-<target>).
  static ActionTag parse(std::string_view text);
  std::string str() const;
  bool operator==(const ActionTag&) const = default;
};

struct AlignedChar {
  char32_t surface = 0;
  std::vector<ActionTag> actions;
  bool operator==(const AlignedChar&) const = default;
};

/// Reads `<char> DELIM <action>{;<action>}` lines. Blank lines are skipped.
/// Throws ParseError carrying the 1-based line number.
std::vector<AlignedChar> parse_action_file(std::istream& in, std::string_view delim = "\t");
std::vector<AlignedChar> parse_action_text(std::string_view text, std::string_view delim = "\t");
std::string format_actions(const std::vector<AlignedChar>& chars, std::string_view delim = "\t");

/// Minimum edit-cost alignment of surface characters to lemma units, with
/// costs computed over jamo letters (match 0, substitution/insertion/
/// deletion 1). Multi-character units are split into characters; only the
/// first character of a unit opens a morpheme (B-). Ties prefer KEEP over
/// MOD over NOOP.
std::vector<AlignedChar> align(std::u32string_view surface, const std::vector<std::u32string>& lemma_units);

/// Output units produced by a character's actions: MOD targets in order,
/// the surface character for KEEP, nothing for NOOP.
std::vector<std::u32string> reconstruct_targets(char32_t surface, const std::vector<ActionTag>& actions);

/// Throws NotApplicableError for a non-syllable surface or empty targets.
ModGranularity classify_mod(char32_t surface, const std::vector<std::u32string>& targets);

/// Per-character category: MOD if any action is MOD, else KEEP if any is
/// KEEP, else NOOP.
ActionKind primary_kind(const AlignedChar& ch);

struct ModType {
  std::u32string surface;
  std::vector<std::u32string> targets;
  std::size_t count = 0;
  ModGranularity granularity = ModGranularity::Character;
};

/// Mergeable counters; merge is commutative and associative so partitions
/// may be aggregated in any order before ranking.
class CorpusStats {
 public:
  void add(const AlignedChar& ch);
  void merge(const CorpusStats& other);

  std::size_t hangul_chars() const { return hangul_; }
  std::size_t skipped_non_hangul() const { return skipped_; }
  std::size_t keep() const { return keep_; }
  std::size_t mod() const { return mod_; }
  std::size_t noop() const { return noop_; }
  std::size_t mod_subcharacter() const { return mod_sub_; }
  std::size_t mod_character() const { return mod_char_; }
  /// Absent when no MOD character was seen.
  std::optional<double> subcharacter_fraction() const;
  std::optional<double> character_fraction() const;

  /// Ranked by count (descending), ties by surface then targets (UTF-8 order).
  std::vector<ModType> top(std::size_t k) const;

  std::string to_json(std::size_t top_k) const;
  std::string to_csv(std::size_t top_k) const;

  bool operator==(const CorpusStats&) const = default;

 private:
  std::size_t hangul_ = 0;
  std::size_t skipped_ = 0;
  std::size_t keep_ = 0;
  std::size_t mod_ = 0;
  std::size_t noop_ = 0;
  std::size_t mod_sub_ = 0;
  std::size_t mod_char_ = 0;
  std::map<std::pair<std::string, std::vector<std::string>>, std::pair<std::size_t, ModGranularity>> types_;
};

CorpusStats corpus_stats(const std::vector<AlignedChar>& chars);
/// Splits the input into `partitions` slices, aggregates each and merges.
CorpusStats corpus_stats_partitioned(const std::vector<AlignedChar>& chars, std::size_t partitions);

struct CorpusRecord {
  std::u32string surface;
  std::vector<std::u32string> lemma_units;
};

/// One JSON object per line: {"surface": ..., "lemma_units": [...]}.
std::vector<CorpusRecord> parse_corpus_jsonl(std::istream& in);

}  // namespace scriptkit::oracle
