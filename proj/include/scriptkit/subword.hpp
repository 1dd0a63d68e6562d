#pragma once

#include <cstdint>
#include <filesystem>
#include <optional>
#include <string>
#include <string_view>
#include <unordered_map>
#include <vector>

#include "scriptkit/subchar.hpp"

namespace scriptkit {

enum class VocabMode { BpeLite, WordList, CharList };

const char* to_string(VocabMode mode);
std::optional<VocabMode> parse_vocab_mode(std::string_view name);

/// Half-open range of character indices.
struct CharRange {
  std::size_t begin = 0;
  std::size_t end = 0;
  std::size_t size() const { return end - begin; }
  bool empty() const { return begin == end; }
  bool operator==(const CharRange&) const = default;
};

/// Which characters each unit (subword, word, character, morpheme) covers.
struct BoundaryMap {
  std::vector<CharRange> ranges;

  std::size_t unit_count() const { return ranges.size(); }
  /// Checks that non-empty ranges are contiguous, ordered and cover
  /// [0, char_count). Empty ranges (CLS) are only allowed when
  /// allow_empty is set. Throws AlignmentError.
  void validate(std::size_t char_count, bool allow_empty = false) const;

  static BoundaryMap characters(std::size_t char_count);
  /// Maximal non-whitespace runs; every whitespace character is its own unit.
  static BoundaryMap words(std::u32string_view text);
};

class SubwordVocab {
 public:
  static constexpr int kPad = 0;
  static constexpr int kUnk = 1;
  static constexpr int kCls = 2;
  static constexpr int kBos = 3;
  static constexpr int kEos = 4;
  static constexpr std::size_t kSpecialCount = 5;

  SubwordVocab();

  /// Deterministic training. Throws ConfigError for an empty corpus or a
  /// target size below specials + distinct characters.
  static SubwordVocab train(const std::vector<std::u32string>& corpus, std::size_t target_size,
                            VocabMode mode, bool add_cls = false);

  static SubwordVocab parse(std::string_view text);
  static SubwordVocab load(const std::filesystem::path& path);
  std::string to_text() const;

  std::optional<int> find(std::u32string_view token) const;
  int id_or_unk(std::u32string_view token) const;
  /// Token text; specials are returned as their bracketed names.
  std::u32string token(int id) const;

  std::size_t size() const { return tokens_.size(); }
  VocabMode mode() const { return mode_; }
  bool add_cls() const { return add_cls_; }
  void set_add_cls(bool value) { add_cls_ = value; }
  std::size_t max_token_length() const { return max_len_; }

 private:
  void push(std::u32string token);

  std::vector<std::u32string> tokens_;
  std::unordered_map<std::u32string, int> index_;
  VocabMode mode_ = VocabMode::CharList;
  bool add_cls_ = false;
  std::size_t max_len_ = 0;
};

struct Encoding {
  std::vector<int> ids;
  BoundaryMap boundary;
  bool has_cls = false;
};

/// Greedy longest match, left to right. Whitespace characters are always
/// single tokens and never part of a longer match. Unknown characters
/// become UNK covering one character. With add_cls a CLS token owning an
/// empty range is prepended.
Encoding encode(std::u32string_view text, const SubwordVocab& vocab, bool add_cls = false);

/// Last character index of each unit. Throws AlignmentError when the map
/// does not cover exactly the characters of seq or contains empty ranges.
std::vector<std::size_t> align_last_chars(const BoundaryMap& boundary, const SubcharSequence& seq);
std::vector<std::size_t> align_last_chars(const BoundaryMap& boundary, std::size_t char_count);

}  // namespace scriptkit
