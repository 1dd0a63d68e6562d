#include "scriptkit/config.hpp"

#include <algorithm>
#include <charconv>
#include <cmath>
#include <sstream>

#include "scriptkit/error.hpp"

namespace scriptkit {

namespace {

std::string lower(std::string_view s) {
  std::string out(s);
  std::transform(out.begin(), out.end(), out.begin(), [](unsigned char c) { return std::tolower(c); });
  return out;
}

std::string_view trim(std::string_view s) {
  const auto ws = " \t\r";
  const auto b = s.find_first_not_of(ws);
  if (b == std::string_view::npos) return {};
  const auto e = s.find_last_not_of(ws);
  return s.substr(b, e - b + 1);
}

template <typename Enum, std::size_t N>
std::optional<Enum> lookup(std::string_view name, const std::pair<const char*, Enum> (&table)[N]) {
  const std::string key = lower(name);
  for (const auto& [text, value] : table) {
    if (key == text) return value;
  }
  return std::nullopt;
}

constexpr std::pair<const char*, Fusion> kFusionNames[] = {
    {"cross-attention", Fusion::CrossAttention}, {"summation", Fusion::Summation},
    {"concatenation", Fusion::Concatenation}};
constexpr std::pair<const char*, Compression> kCompressionNames[] = {
    {"principles", Compression::Principles}, {"linear", Compression::Linear}, {"attention", Compression::Attention}};
constexpr std::pair<const char*, Granularity> kGranularityNames[] = {{"subword", Granularity::Subword},
                                                                     {"character", Granularity::Character},
                                                                     {"word", Granularity::Word},
                                                                     {"external", Granularity::External}};

template <typename Enum, std::size_t N>
const char* name_of(Enum value, const std::pair<const char*, Enum> (&table)[N]) {
  for (const auto& [text, v] : table) {
    if (v == value) return text;
  }
  return "?";
}

}  // namespace

const char* to_string(Fusion fusion) { return name_of(fusion, kFusionNames); }
const char* to_string(Compression compression) { return name_of(compression, kCompressionNames); }
const char* to_string(Granularity granularity) { return name_of(granularity, kGranularityNames); }
std::optional<Fusion> parse_fusion(std::string_view name) { return lookup(name, kFusionNames); }
std::optional<Compression> parse_compression(std::string_view name) { return lookup(name, kCompressionNames); }
std::optional<Granularity> parse_granularity(std::string_view name) { return lookup(name, kGranularityNames); }

bool parse_bool(std::string_view key, std::string_view value) {
  const std::string v = lower(value);
  if (v == "true" || v == "1" || v == "yes" || v == "on") return true;
  if (v == "false" || v == "0" || v == "no" || v == "off") return false;
  throw ConfigError(std::string(key) + ": expected a boolean, got '" + std::string(value) + "'");
}

std::size_t parse_count(std::string_view key, std::string_view value) {
  std::size_t out = 0;
  const auto [ptr, ec] = std::from_chars(value.data(), value.data() + value.size(), out);
  if (ec != std::errc() || ptr != value.data() + value.size() || value.empty()) {
    throw ConfigError(std::string(key) + ": expected a non-negative integer, got '" + std::string(value) + "'");
  }
  return out;
}

double parse_real(std::string_view key, std::string_view value) {
  double out = 0.0;
  const auto [ptr, ec] = std::from_chars(value.data(), value.data() + value.size(), out);
  if (ec != std::errc() || ptr != value.data() + value.size() || value.empty() || !std::isfinite(out)) {
    throw ConfigError(std::string(key) + ": expected a number, got '" + std::string(value) + "'");
  }
  return out;
}

void ScriptConfig::validate() const {
  if (embed_dim == 0) throw ConfigError("embed_dim must be positive");
  if (heads == 0) throw ConfigError("heads must be positive");
  if (fusion == Fusion::CrossAttention && embed_dim % heads != 0) {
    throw ConfigError("embed_dim " + std::to_string(embed_dim) + " is not divisible by heads " +
                      std::to_string(heads));
  }
}

bool ScriptConfig::set(std::string_view key, std::string_view value) {
  auto bad = [&](const char* what) {
    return ConfigError(std::string(key) + ": unknown " + what + " '" + std::string(value) + "'");
  };
  if (key == "scheme") {
    auto s = parse_scheme(value);
    if (!s) throw bad("scheme");
    scheme = *s;
  } else if (key == "embed_dim") {
    embed_dim = parse_count(key, value);
  } else if (key == "fusion") {
    auto f = parse_fusion(value);
    if (!f) throw bad("fusion mode");
    fusion = *f;
  } else if (key == "compression") {
    auto c = parse_compression(value);
    if (!c) throw bad("compression mode");
    compression = *c;
  } else if (key == "granularity") {
    auto g = parse_granularity(value);
    if (!g) throw bad("granularity");
    granularity = *g;
  } else if (key == "residual_fusion") {
    residual_fusion = parse_bool(key, value);
  } else if (key == "heads") {
    heads = parse_count(key, value);
  } else if (key == "cls_bypass") {
    cls_bypass = parse_bool(key, value);
  } else {
    return false;
  }
  return true;
}

std::string ScriptConfig::to_text() const {
  std::ostringstream out;
  out << "scheme = " << to_string(scheme) << '\n'
      << "embed_dim = " << embed_dim << '\n'
      << "fusion = " << to_string(fusion) << '\n'
      << "compression = " << to_string(compression) << '\n'
      << "granularity = " << to_string(granularity) << '\n'
      << "residual_fusion = " << (residual_fusion ? "true" : "false") << '\n'
      << "heads = " << heads << '\n'
      << "cls_bypass = " << (cls_bypass ? "true" : "false") << '\n';
  return out.str();
}

ScriptConfig ScriptConfig::from_text(std::string_view text) {
  ScriptConfig config;
  for (const auto& s : parse_settings(text)) {
    if (!config.set(s.key, s.value)) {
      throw ConfigError("line " + std::to_string(s.line) + ": unknown config key '" + s.key + "'");
    }
  }
  config.validate();
  return config;
}

std::vector<Setting> parse_settings(std::string_view text) {
  std::vector<Setting> out;
  std::size_t line_no = 0;
  while (!text.empty()) {
    const auto nl = text.find('\n');
    std::string_view line = text.substr(0, nl);
    text = nl == std::string_view::npos ? std::string_view{} : text.substr(nl + 1);
    ++line_no;
    if (const auto hash = line.find('#'); hash != std::string_view::npos) line = line.substr(0, hash);
    line = trim(line);
    if (line.empty()) continue;
    const auto eq = line.find('=');
    if (eq == std::string_view::npos) throw ParseError("expected 'key = value'", line_no);
    const auto key = trim(line.substr(0, eq));
    if (key.empty()) throw ParseError("empty key", line_no);
    out.push_back({std::string(key), std::string(trim(line.substr(eq + 1))), line_no});
  }
  return out;
}

}  // namespace scriptkit
