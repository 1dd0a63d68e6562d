#pragma once

#include <cstddef>
#include <optional>
#include <string>
#include <string_view>
#include <utility>
#include <vector>

#include "scriptkit/subchar.hpp"

namespace scriptkit {

enum class Fusion { CrossAttention, Summation, Concatenation };
enum class Compression { Principles, Linear, Attention };
enum class Granularity { Subword, Character, Word, External };

inline constexpr Fusion kAllFusions[] = {Fusion::CrossAttention, Fusion::Summation, Fusion::Concatenation};
inline constexpr Compression kAllCompressions[] = {Compression::Principles, Compression::Linear,
                                                   Compression::Attention};

const char* to_string(Fusion fusion);
const char* to_string(Compression compression);
const char* to_string(Granularity granularity);
std::optional<Fusion> parse_fusion(std::string_view name);
std::optional<Compression> parse_compression(std::string_view name);
std::optional<Granularity> parse_granularity(std::string_view name);

struct ScriptConfig {
  Scheme scheme = Scheme::Jamo;
  std::size_t embed_dim = 16;
  Fusion fusion = Fusion::CrossAttention;
  Compression compression = Compression::Principles;
  Granularity granularity = Granularity::Subword;
  bool residual_fusion = false;
  std::size_t heads = 1;
  bool cls_bypass = false;

  /// Throws ConfigError for D = 0, heads = 0 or D not divisible by heads.
  void validate() const;

  /// Sets one field from its textual form. Returns false for unknown keys;
  /// throws ConfigError for bad values.
  bool set(std::string_view key, std::string_view value);
  /// `key = value` lines in a fixed order.
  std::string to_text() const;
  /// Throws ConfigError for unknown keys.
  static ScriptConfig from_text(std::string_view text);

  bool operator==(const ScriptConfig&) const = default;
};

struct Setting {
  std::string key;
  std::string value;
  std::size_t line = 0;
};

/// Parses `key = value` lines; '#' starts a comment, blank lines are
/// ignored. Throws ParseError for lines without '=' or with an empty key.
std::vector<Setting> parse_settings(std::string_view text);

/// Strict parsers used for config values; throw ConfigError naming key.
bool parse_bool(std::string_view key, std::string_view value);
std::size_t parse_count(std::string_view key, std::string_view value);
double parse_real(std::string_view key, std::string_view value);

}  // namespace scriptkit
