#pragma once

#include <cstdint>
#include <filesystem>
#include <span>
#include <string>
#include <string_view>
#include <vector>

#include "scriptkit/model.hpp"

namespace scriptkit {

struct PairRecord {
  std::u32string form_a;
  std::u32string form_b;
  std::string relation;
};

using PairDataset = std::vector<PairRecord>;

/// TSV `form_a TAB form_b TAB relation`. An optional `# relations: a,b`
/// line declares the allowed tags; other '#' lines are comments. Forms
/// must contain Hangul. Throws ParseError with the line number.
PairDataset parse_pairs(std::string_view text);
PairDataset load_pairs(const std::filesystem::path& path);

/// Which embedding channel a word vector is read from.
enum class Channel { Raw, Fused };

/// Mean over the word's rows of e_S (Raw) or e_F without CLS (Fused).
std::vector<double> word_vector(const ScriptModel& model, std::u32string_view word, Channel channel);
/// Zero when either vector has zero norm.
double cosine(std::span<const double> a, std::span<const double> b);

struct PairSimilarity {
  std::vector<double> raw;
  std::vector<double> fused;
  double mean_raw = 0.0;
  double mean_fused = 0.0;
};

PairSimilarity pair_similarity(const ScriptModel& model, const PairDataset& data);
/// Per-pair rows plus a closing `mean` row.
std::string pair_similarity_csv(const PairDataset& data, const PairSimilarity& sim);

/// Fixed seeded (i, j) index pairs with i != j, used as unrelated pairs
/// (form_a of i against form_b of j). Empty for fewer than 2 records.
std::vector<std::pair<std::size_t, std::size_t>> random_pairs(std::size_t records, std::size_t count,
                                                              std::uint64_t seed);
/// Mean fused cosine over the given unrelated pairs.
double mean_random_cosine(const ScriptModel& model, const PairDataset& data,
                          const std::vector<std::pair<std::size_t, std::size_t>>& pairs);

struct PcaResult {
  std::vector<std::vector<double>> components;   // k unit vectors of length D
  std::vector<double> eigenvalues;               // of the covariance, descending
  std::vector<std::vector<double>> coordinates;  // one row of k values per input row
};

/// Mean-centres the rows, then finds the top-k covariance directions by
/// power iteration with deflation from a seeded start. Each component's
/// largest-magnitude entry is made positive. Throws ConfigError for fewer
/// than 2 rows, ragged rows or k above the dimension.
PcaResult pca(const std::vector<std::vector<double>>& rows, std::size_t k, std::uint64_t seed);

/// `word,pc1,...,pck` for the fused vectors of words.
std::string pca_project_csv(const ScriptModel& model, const std::vector<std::u32string>& words, std::size_t k,
                            std::uint64_t seed);

struct WordSet {
  std::string name;
  std::vector<std::u32string> words;
};

/// `name TAB word TAB word ...` per line; '#' lines are comments. Each
/// set needs at least 2 words. Throws ParseError.
std::vector<WordSet> parse_word_sets(std::string_view text);

struct Cohesion {
  double mean_cosine = 0.0;
  /// 1 - mean pairwise cosine.
  double dispersion = 0.0;
  /// Mean distance of the L2-normalized vectors to their centroid.
  double spread = 0.0;
};

Cohesion cohesion(const std::vector<std::vector<double>>& vectors);

struct CohesionRow {
  std::string name;
  Cohesion raw;
  Cohesion fused;
};

std::vector<CohesionRow> cohesion_report(const ScriptModel& model, const std::vector<WordSet>& sets);
std::string cohesion_csv(const std::vector<CohesionRow>& rows);

/// Round-trip safe decimal form of a double.
std::string format_real(double value);

}  // namespace scriptkit
