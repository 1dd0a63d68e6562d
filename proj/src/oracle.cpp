#include "scriptkit/oracle.hpp"

#include <algorithm>
#include <limits>
#include <sstream>

#include <json.hpp>

#include "scriptkit/error.hpp"
#include "scriptkit/hangul.hpp"
#include "scriptkit/utf8.hpp"

namespace scriptkit::oracle {

namespace {

std::string_view trim_spaces(std::string_view s) {
  while (!s.empty() && (s.front() == ' ' || s.front() == '\r')) s.remove_prefix(1);
  while (!s.empty() && (s.back() == ' ' || s.back() == '\r')) s.remove_suffix(1);
  return s;
}

std::u32string jamo_letters(std::u32string_view text) {
  std::u32string out;
  for (char32_t c : text) {
    if (auto block = hangul::decompose(c)) {
      out += hangul::letters(*block);
    } else {
      out.push_back(c);
    }
  }
  return out;
}

std::size_t edit_distance(std::u32string_view a, std::u32string_view b) {
  std::vector<std::size_t> prev(b.size() + 1), cur(b.size() + 1);
  for (std::size_t j = 0; j <= b.size(); ++j) prev[j] = j;
  for (std::size_t i = 1; i <= a.size(); ++i) {
    cur[0] = i;
    for (std::size_t j = 1; j <= b.size(); ++j) {
      const std::size_t sub = prev[j - 1] + (a[i - 1] == b[j - 1] ? 0 : 1);
      cur[j] = std::min({sub, prev[j] + 1, cur[j - 1] + 1});
    }
    std::swap(prev, cur);
  }
  return prev[b.size()];
}

// A single character of a lemma unit; `opens` marks the first character of
// the unit, i.e. a morpheme start.
struct Piece {
  char32_t ch;
  bool opens;
};

std::string csv_field(const std::string& s) {
  if (s.find_first_of(",\"\n") == std::string::npos) return s;
  std::string out = "\"";
  for (char c : s) {
    if (c == '"') out += '"';
    out += c;
  }
  return out + "\"";
}

}  // namespace

const char* to_string(ActionKind kind) {
  switch (kind) {
    case ActionKind::Keep:
      return "KEEP";
    case ActionKind::Mod:
      return "MOD";
    case ActionKind::Noop:
      return "NOOP";
  }
  return "?";
}

const char* to_string(ModGranularity level) {
  return level == ModGranularity::Subcharacter ? "subcharacter" : "character";
}

ActionTag ActionTag::parse(std::string_view text) {
  text = trim_spaces(text);
  ActionTag tag;
  if (text.starts_with("B-")) {
    tag.bio = Bio::B;
  } else if (text.starts_with("I-")) {
    tag.bio = Bio::I;
  } else {
    throw Error("action lacks a B-/I- prefix: " + std::string(text));
  }
  text.remove_prefix(2);
  if (text == "KEEP") {
    tag.kind = ActionKind::Keep;
  } else if (text == "NOOP") {
    tag.kind = ActionKind::Noop;
  } else if (text.starts_with("MOD-") && text.size() > 4) {
    tag.kind = ActionKind::Mod;
    tag.target = utf8::decode(text.substr(4));
  } else {
    throw Error("unknown action: " + std::string(text));
  }
  return tag;
}

std::string ActionTag::str() const {
  std::string out = bio == Bio::B ? "B-" : "I-";
  out += to_string(kind);
  if (target) out += "-" + utf8::encode(*target);
  return out;
}

std::vector<AlignedChar> parse_action_text(std::string_view text, std::string_view delim) {
  std::istringstream in{std::string(text)};
  return parse_action_file(in, delim);
}

std::vector<AlignedChar> parse_action_file(std::istream& in, std::string_view delim) {
  if (delim.empty()) throw ConfigError("action delimiter must not be empty");
  std::vector<AlignedChar> out;
  std::string line;
  std::size_t line_no = 0;
  while (std::getline(in, line)) {
    ++line_no;
    std::string_view view(line);
    if (!view.empty() && view.back() == '\r') view.remove_suffix(1);
    if (trim_spaces(view).empty()) continue;
    const std::size_t at = view.find(delim);
    if (at == std::string_view::npos) throw ParseError("missing delimiter", line_no);
    std::string_view head = view.substr(0, at);
    if (!trim_spaces(head).empty()) head = trim_spaces(head);
    const std::u32string surface = utf8::decode(head);
    if (surface.size() != 1) throw ParseError("expected a single input character", line_no);
    AlignedChar ch{surface[0], {}};
    std::string_view rest = view.substr(at + delim.size());
    while (true) {
      const std::size_t semi = rest.find(';');
      try {
        ch.actions.push_back(ActionTag::parse(rest.substr(0, semi)));
      } catch (const ParseError&) {
        throw;
      } catch (const Error& e) {
        throw ParseError(e.what(), line_no);
      }
      if (semi == std::string_view::npos) break;
      rest.remove_prefix(semi + 1);
    }
    out.push_back(std::move(ch));
  }
  return out;
}

std::string format_actions(const std::vector<AlignedChar>& chars, std::string_view delim) {
  std::string out;
  for (const auto& ch : chars) {
    out += utf8::encode(ch.surface);
    out += delim;
    for (std::size_t i = 0; i < ch.actions.size(); ++i) {
      if (i) out += ';';
      out += ch.actions[i].str();
    }
    out += '\n';
  }
  return out;
}

std::vector<AlignedChar> align(std::u32string_view surface, const std::vector<std::u32string>& lemma_units) {
  std::vector<Piece> pieces;
  for (const auto& unit : lemma_units) {
    for (std::size_t i = 0; i < unit.size(); ++i) pieces.push_back({unit[i], i == 0});
  }
  const std::size_t n = surface.size();
  const std::size_t m = pieces.size();

  std::vector<std::u32string> piece_letters(m);
  for (std::size_t j = 0; j < m; ++j) piece_letters[j] = jamo_letters(std::u32string(1, pieces[j].ch));

  struct Cell {
    std::size_t cost = std::numeric_limits<std::size_t>::max();
    std::size_t rank = 0;
    std::size_t group = 0;
  };
  constexpr std::size_t kUnreached = std::numeric_limits<std::size_t>::max();
  std::vector<std::vector<Cell>> dp(n + 1, std::vector<Cell>(m + 1));
  dp[0][0].cost = 0;

  for (std::size_t i = 1; i <= n; ++i) {
    const char32_t c = surface[i - 1];
    const std::u32string c_letters = jamo_letters(std::u32string(1, c));
    for (std::size_t j = 0; j <= m; ++j) {
      Cell best;
      std::u32string group_letters;
      // g pieces [j-g, j) go to character i-1; grow the group leftwards.
      for (std::size_t g = 0; g <= j; ++g) {
        if (g > 0) group_letters = piece_letters[j - g] + group_letters;
        const Cell& from = dp[i - 1][j - g];
        if (from.cost == kUnreached) continue;
        std::size_t cost = 0;
        std::size_t rank = 0;
        if (g == 0) {
          cost = c_letters.size();
          rank = 2;
        } else if (g == 1 && pieces[j - 1].ch == c) {
          cost = 0;
          rank = 0;
        } else {
          cost = edit_distance(c_letters, group_letters);
          rank = 1;
        }
        const std::size_t total = from.cost + cost;
        const std::size_t total_rank = from.rank + rank;
        if (total < best.cost || (total == best.cost && total_rank < best.rank)) {
          best = {total, total_rank, g};
        }
      }
      dp[i][j] = best;
    }
  }

  std::vector<AlignedChar> out(n);
  std::size_t j = m;
  for (std::size_t i = n; i > 0; --i) {
    const std::size_t g = dp[i][j].group;
    AlignedChar& ch = out[i - 1];
    ch.surface = surface[i - 1];
    if (g == 0) {
      ch.actions.push_back(ActionTag::noop(Bio::B));
    } else if (g == 1 && pieces[j - 1].ch == ch.surface) {
      ch.actions.push_back(ActionTag::keep(pieces[j - 1].opens ? Bio::B : Bio::I));
    } else {
      for (std::size_t p = j - g; p < j; ++p) {
        const Bio bio = (p == j - g && pieces[p].opens) ? Bio::B : Bio::I;
        ch.actions.push_back(ActionTag::mod(bio, std::u32string(1, pieces[p].ch)));
      }
    }
    j -= g;
  }
  return out;
}

std::vector<std::u32string> reconstruct_targets(char32_t surface, const std::vector<ActionTag>& actions) {
  std::vector<std::u32string> out;
  for (const auto& a : actions) {
    switch (a.kind) {
      case ActionKind::Keep:
        out.emplace_back(1, surface);
        break;
      case ActionKind::Mod:
        out.push_back(a.target.value_or(std::u32string{}));
        break;
      case ActionKind::Noop:
        break;
    }
  }
  return out;
}

ModGranularity classify_mod(char32_t surface, const std::vector<std::u32string>& targets) {
  const auto block = hangul::decompose(surface);
  if (!block) throw NotApplicableError("MOD granularity needs a Hangul syllable, got " + utf8::encode(surface));
  if (targets.empty()) throw NotApplicableError("MOD granularity needs at least one target unit");

  auto single_syllable = [](const std::u32string& unit) -> std::optional<hangul::SyllableBlock> {
    if (unit.size() != 1) return std::nullopt;
    return hangul::decompose(unit[0]);
  };

  if (targets.size() == 1) {
    const auto target = single_syllable(targets[0]);
    if (!target) return ModGranularity::Character;
    const int differing = (target->cho != block->cho) + (target->jung != block->jung) + (target->jong != block->jong);
    return differing == 1 ? ModGranularity::Subcharacter : ModGranularity::Character;
  }

  // Several units: a merge keeps the leading initial consonant.
  if (const auto first = single_syllable(targets[0]); first && first->cho == block->cho) {
    return ModGranularity::Subcharacter;
  }
  // Final consonant carried over as the next unit's initial.
  if (block->has_final() && !targets[1].empty()) {
    const char32_t final_letter = hangul::inventory().jongseong[static_cast<std::size_t>(block->jong)];
    const char32_t lead = targets[1][0];
    if (const auto next = hangul::decompose(lead)) {
      if (hangul::inventory().choseong[static_cast<std::size_t>(next->cho)] == final_letter) {
        return ModGranularity::Subcharacter;
      }
    } else if (lead == final_letter) {
      return ModGranularity::Subcharacter;
    }
  }
  return ModGranularity::Character;
}

ActionKind primary_kind(const AlignedChar& ch) {
  bool keep = false;
  for (const auto& a : ch.actions) {
    if (a.kind == ActionKind::Mod) return ActionKind::Mod;
    keep = keep || a.kind == ActionKind::Keep;
  }
  return keep ? ActionKind::Keep : ActionKind::Noop;
}

// ---------------------------------------------------------------------------
// CorpusStats

void CorpusStats::add(const AlignedChar& ch) {
  if (!hangul::is_hangul(ch.surface)) {
    ++skipped_;
    return;
  }
  ++hangul_;
  switch (primary_kind(ch)) {
    case ActionKind::Keep:
      ++keep_;
      return;
    case ActionKind::Noop:
      ++noop_;
      return;
    case ActionKind::Mod:
      break;
  }
  ++mod_;
  const auto targets = reconstruct_targets(ch.surface, ch.actions);
  // Bare letters cannot be compared slot by slot.
  const ModGranularity level =
      hangul::is_syllable(ch.surface) ? classify_mod(ch.surface, targets) : ModGranularity::Character;
  (level == ModGranularity::Subcharacter ? mod_sub_ : mod_char_) += 1;
  std::vector<std::string> encoded;
  encoded.reserve(targets.size());
  for (const auto& t : targets) encoded.push_back(utf8::encode(t));
  auto& entry = types_[{utf8::encode(ch.surface), std::move(encoded)}];
  entry.first += 1;
  entry.second = level;
}

void CorpusStats::merge(const CorpusStats& other) {
  hangul_ += other.hangul_;
  skipped_ += other.skipped_;
  keep_ += other.keep_;
  mod_ += other.mod_;
  noop_ += other.noop_;
  mod_sub_ += other.mod_sub_;
  mod_char_ += other.mod_char_;
  for (const auto& [key, value] : other.types_) {
    auto& entry = types_[key];
    entry.first += value.first;
    entry.second = value.second;
  }
}

std::optional<double> CorpusStats::subcharacter_fraction() const {
  if (mod_sub_ + mod_char_ == 0) return std::nullopt;
  return static_cast<double>(mod_sub_) / static_cast<double>(mod_sub_ + mod_char_);
}

std::optional<double> CorpusStats::character_fraction() const {
  if (mod_sub_ + mod_char_ == 0) return std::nullopt;
  return static_cast<double>(mod_char_) / static_cast<double>(mod_sub_ + mod_char_);
}

std::vector<ModType> CorpusStats::top(std::size_t k) const {
  std::vector<ModType> all;
  all.reserve(types_.size());
  for (const auto& [key, value] : types_) {
    ModType t;
    t.surface = utf8::decode(key.first);
    for (const auto& target : key.second) t.targets.push_back(utf8::decode(target));
    t.count = value.first;
    t.granularity = value.second;
    all.push_back(std::move(t));
  }
  std::stable_sort(all.begin(), all.end(), [](const ModType& a, const ModType& b) { return a.count > b.count; });
  if (all.size() > k) all.resize(k);
  return all;
}

std::string CorpusStats::to_json(std::size_t top_k) const {
  nlohmann::ordered_json j;
  j["hangul_characters"] = hangul_;
  j["skipped_non_hangul"] = skipped_;
  j["keep"] = keep_;
  j["mod"] = mod_;
  j["noop"] = noop_;
  j["mod_subcharacter"] = mod_sub_;
  j["mod_character"] = mod_char_;
  const auto sub = subcharacter_fraction();
  const auto chr = character_fraction();
  j["subcharacter_fraction"] = sub ? nlohmann::ordered_json(*sub) : nlohmann::ordered_json(nullptr);
  j["character_fraction"] = chr ? nlohmann::ordered_json(*chr) : nlohmann::ordered_json(nullptr);
  auto& rows = j["top_mod_types"] = nlohmann::ordered_json::array();
  std::size_t rank = 0;
  for (const auto& t : top(top_k)) {
    nlohmann::ordered_json row;
    row["rank"] = ++rank;
    row["surface"] = utf8::encode(t.surface);
    row["targets"] = nlohmann::ordered_json::array();
    for (const auto& target : t.targets) row["targets"].push_back(utf8::encode(target));
    row["count"] = t.count;
    row["granularity"] = to_string(t.granularity);
    rows.push_back(std::move(row));
  }
  return j.dump(2) + "\n";
}

std::string CorpusStats::to_csv(std::size_t top_k) const {
  std::string out = "rank,surface,targets,count,granularity\n";
  std::size_t rank = 0;
  for (const auto& t : top(top_k)) {
    std::string joined;
    for (std::size_t i = 0; i < t.targets.size(); ++i) {
      if (i) joined += '+';
      joined += utf8::encode(t.targets[i]);
    }
    out += std::to_string(++rank) + "," + csv_field(utf8::encode(t.surface)) + "," + csv_field(joined) + "," +
           std::to_string(t.count) + "," + to_string(t.granularity) + "\n";
  }
  return out;
}

CorpusStats corpus_stats(const std::vector<AlignedChar>& chars) {
  CorpusStats stats;
  for (const auto& ch : chars) stats.add(ch);
  return stats;
}

CorpusStats corpus_stats_partitioned(const std::vector<AlignedChar>& chars, std::size_t partitions) {
  partitions = std::max<std::size_t>(1, partitions);
  const std::size_t chunk = (chars.size() + partitions - 1) / partitions;
  std::vector<CorpusStats> parts(partitions);
  for (std::size_t p = 0; p < partitions; ++p) {
    const std::size_t begin = std::min(chars.size(), p * chunk);
    const std::size_t end = std::min(chars.size(), begin + chunk);
    for (std::size_t i = begin; i < end; ++i) parts[p].add(chars[i]);
  }
  CorpusStats total;
  for (const auto& part : parts) total.merge(part);
  return total;
}

std::vector<CorpusRecord> parse_corpus_jsonl(std::istream& in) {
  std::vector<CorpusRecord> out;
  std::string line;
  std::size_t line_no = 0;
  while (std::getline(in, line)) {
    ++line_no;
    if (line.find_first_not_of(" \t\r") == std::string::npos) continue;
    try {
      const auto j = nlohmann::json::parse(line);
      CorpusRecord rec;
      rec.surface = utf8::decode(j.at("surface").get<std::string>());
      for (const auto& unit : j.at("lemma_units")) rec.lemma_units.push_back(utf8::decode(unit.get<std::string>()));
      out.push_back(std::move(rec));
    } catch (const nlohmann::json::exception& e) {
      throw ParseError(e.what(), line_no);
    }
  }
  return out;
}

}  // namespace scriptkit::oracle
