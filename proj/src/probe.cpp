#include "scriptkit/probe.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <set>

#include "scriptkit/error.hpp"
#include "scriptkit/hangul.hpp"
#include "scriptkit/io.hpp"
#include "scriptkit/rng.hpp"
#include "scriptkit/utf8.hpp"

namespace scriptkit {

namespace {

std::vector<std::string_view> split(std::string_view line, char sep) {
  std::vector<std::string_view> out;
  while (true) {
    const auto pos = line.find(sep);
    out.push_back(line.substr(0, pos));
    if (pos == std::string_view::npos) break;
    line.remove_prefix(pos + 1);
  }
  return out;
}

std::string_view trim(std::string_view s) {
  const auto ws = " \t\r";
  const auto b = s.find_first_not_of(ws);
  if (b == std::string_view::npos) return {};
  return s.substr(b, s.find_last_not_of(ws) - b + 1);
}

template <typename Fn>
void for_each_line(std::string_view text, Fn&& fn) {
  std::size_t line_no = 0;
  while (!text.empty()) {
    const auto nl = text.find('\n');
    std::string_view line = text.substr(0, nl);
    text = nl == std::string_view::npos ? std::string_view{} : text.substr(nl + 1);
    ++line_no;
    if (!line.empty() && line.back() == '\r') line.remove_suffix(1);
    fn(line, line_no);
  }
}

bool has_hangul(std::u32string_view s) { return std::any_of(s.begin(), s.end(), hangul::is_hangul); }

double dot(std::span<const double> a, std::span<const double> b) {
  double s = 0.0;
  for (std::size_t i = 0; i < a.size(); ++i) s += a[i] * b[i];
  return s;
}

std::string csv_field(const std::string& s) {
  if (s.find_first_of(",\"\n\r") == std::string::npos) return s;
  std::string quoted = "\"";
  for (char c : s) {
    if (c == '"') quoted += '"';
    quoted += c;
  }
  return quoted + "\"";
}

}  // namespace

std::string format_real(double value) {
  char buf[32];
  std::snprintf(buf, sizeof(buf), "%.17g", value);
  return buf;
}

// ---------------------------------------------------------------------------

PairDataset parse_pairs(std::string_view text) {
  PairDataset data;
  std::set<std::string> declared;
  for_each_line(text, [&](std::string_view line, std::size_t no) {
    if (trim(line).empty()) return;
    if (line.front() == '#') {
      const auto body = trim(line.substr(1));
      constexpr std::string_view kDirective = "relations:";
      if (body.substr(0, kDirective.size()) == kDirective) {
        for (auto tag : split(body.substr(kDirective.size()), ',')) {
          if (!trim(tag).empty()) declared.emplace(trim(tag));
        }
      }
      return;
    }
    const auto fields = split(line, '\t');
    if (fields.size() != 3) throw ParseError("expected form_a TAB form_b TAB relation", no);
    PairRecord rec{utf8::decode(trim(fields[0])), utf8::decode(trim(fields[1])), std::string(trim(fields[2]))};
    if (!has_hangul(rec.form_a) || !has_hangul(rec.form_b)) throw ParseError("forms must contain Hangul", no);
    if (rec.relation.empty()) throw ParseError("empty relation tag", no);
    if (!declared.empty() && !declared.count(rec.relation)) {
      throw ParseError("relation '" + rec.relation + "' is not declared", no);
    }
    data.push_back(std::move(rec));
  });
  return data;
}

PairDataset load_pairs(const std::filesystem::path& path) { return parse_pairs(io::read_file(path)); }

// ---------------------------------------------------------------------------

std::vector<double> word_vector(const ScriptModel& model, std::u32string_view word, Channel channel) {
  ForwardTrace trace;
  const Tensor e_f = model.forward(word, &trace);
  const std::size_t d = model.config().embed_dim;
  const std::size_t skip = trace.has_cls ? 1 : 0;
  const Tensor& rows = channel == Channel::Raw ? trace.e_s : e_f;
  const std::size_t first = channel == Channel::Raw ? 0 : skip;
  std::vector<double> v(d, 0.0);
  const std::size_t n = rows.rows() - first;
  if (n == 0) return v;
  for (std::size_t r = first; r < rows.rows(); ++r) {
    for (std::size_t j = 0; j < d; ++j) v[j] += rows.at(r, j);
  }
  for (double& x : v) x /= static_cast<double>(n);
  return v;
}

double cosine(std::span<const double> a, std::span<const double> b) {
  if (a.size() != b.size()) throw ShapeError("cosine: vectors of length " + std::to_string(a.size()) + " and " +
                                             std::to_string(b.size()));
  const double na = std::sqrt(dot(a, a));
  const double nb = std::sqrt(dot(b, b));
  if (na == 0.0 || nb == 0.0) return 0.0;
  return dot(a, b) / (na * nb);
}

PairSimilarity pair_similarity(const ScriptModel& model, const PairDataset& data) {
  PairSimilarity sim;
  for (const auto& rec : data) {
    sim.raw.push_back(
        cosine(word_vector(model, rec.form_a, Channel::Raw), word_vector(model, rec.form_b, Channel::Raw)));
    sim.fused.push_back(
        cosine(word_vector(model, rec.form_a, Channel::Fused), word_vector(model, rec.form_b, Channel::Fused)));
  }
  if (!data.empty()) {
    for (std::size_t i = 0; i < data.size(); ++i) {
      sim.mean_raw += sim.raw[i];
      sim.mean_fused += sim.fused[i];
    }
    sim.mean_raw /= static_cast<double>(data.size());
    sim.mean_fused /= static_cast<double>(data.size());
  }
  return sim;
}

std::string pair_similarity_csv(const PairDataset& data, const PairSimilarity& sim) {
  std::string out = "form_a,form_b,relation,cos_raw,cos_fused\n";
  for (std::size_t i = 0; i < data.size(); ++i) {
    out += csv_field(utf8::encode(data[i].form_a)) + ',' + csv_field(utf8::encode(data[i].form_b)) + ',' +
           csv_field(data[i].relation) + ',' + format_real(sim.raw[i]) + ',' + format_real(sim.fused[i]) + '\n';
  }
  out += "mean,,," + format_real(sim.mean_raw) + ',' + format_real(sim.mean_fused) + '\n';
  return out;
}

std::vector<std::pair<std::size_t, std::size_t>> random_pairs(std::size_t records, std::size_t count,
                                                              std::uint64_t seed) {
  std::vector<std::pair<std::size_t, std::size_t>> out;
  if (records < 2) return out;
  Rng rng(seed);
  for (std::size_t k = 0; k < count; ++k) {
    const std::size_t i = rng.index(records);
    std::size_t j = rng.index(records - 1);
    if (j >= i) ++j;
    out.emplace_back(i, j);
  }
  return out;
}

double mean_random_cosine(const ScriptModel& model, const PairDataset& data,
                          const std::vector<std::pair<std::size_t, std::size_t>>& pairs) {
  if (pairs.empty()) return 0.0;
  double total = 0.0;
  for (const auto& [i, j] : pairs) {
    total += cosine(word_vector(model, data[i].form_a, Channel::Fused),
                    word_vector(model, data[j].form_b, Channel::Fused));
  }
  return total / static_cast<double>(pairs.size());
}

// ---------------------------------------------------------------------------

PcaResult pca(const std::vector<std::vector<double>>& rows, std::size_t k, std::uint64_t seed) {
  if (rows.size() < 2) throw ConfigError("pca needs at least 2 vectors");
  const std::size_t d = rows.front().size();
  for (const auto& r : rows) {
    if (r.size() != d) throw ConfigError("pca: vectors have different lengths");
  }
  if (k == 0 || k > d) {
    throw ConfigError("pca: k = " + std::to_string(k) + " must be between 1 and the dimension " + std::to_string(d));
  }
  const std::size_t n = rows.size();
  std::vector<double> mean(d, 0.0);
  for (const auto& r : rows) {
    for (std::size_t j = 0; j < d; ++j) mean[j] += r[j] / static_cast<double>(n);
  }
  std::vector<std::vector<double>> x(rows);
  for (auto& r : x) {
    for (std::size_t j = 0; j < d; ++j) r[j] -= mean[j];
  }
  // Covariance (unbiased) and its trace, the scale for "numerically zero".
  std::vector<double> cov(d * d, 0.0);
  for (const auto& r : x) {
    for (std::size_t a = 0; a < d; ++a) {
      for (std::size_t b = 0; b < d; ++b) cov[a * d + b] += r[a] * r[b] / static_cast<double>(n - 1);
    }
  }
  double scale = 0.0;
  for (std::size_t a = 0; a < d; ++a) scale += std::abs(cov[a * d + a]);

  PcaResult result;
  Rng rng(seed);
  auto orthonormalize = [&](std::vector<double>& v) {
    for (int pass = 0; pass < 2; ++pass) {
      for (const auto& c : result.components) {
        const double p = dot(v, c);
        for (std::size_t j = 0; j < d; ++j) v[j] -= p * c[j];
      }
    }
    const double norm = std::sqrt(dot(v, v));
    if (norm == 0.0) return false;
    for (double& e : v) e /= norm;
    return true;
  };
  auto random_unit = [&] {
    std::vector<double> v(d);
    do {
      for (double& e : v) e = rng.normal();
    } while (!orthonormalize(v));
    return v;
  };
  auto apply = [&](const std::vector<double>& v) {
    std::vector<double> out(d, 0.0);
    for (std::size_t a = 0; a < d; ++a) {
      for (std::size_t b = 0; b < d; ++b) out[a] += cov[a * d + b] * v[b];
    }
    return out;
  };

  constexpr int kMaxIterations = 100000;
  for (std::size_t c = 0; c < k; ++c) {
    std::vector<double> v = random_unit();
    for (int it = 0; it < kMaxIterations; ++it) {
      std::vector<double> w = apply(v);
      // Remaining variance numerically zero: keep the seeded orthogonal direction.
      if (std::sqrt(dot(w, w)) <= 1e-13 * scale || !orthonormalize(w)) break;
      double delta = 0.0;
      for (std::size_t j = 0; j < d; ++j) delta = std::max(delta, std::abs(w[j] - v[j]));
      v = std::move(w);
      if (delta < 1e-15) break;
    }
    const double lambda = std::max(0.0, dot(v, apply(v)));
    // Sign convention: the largest-magnitude entry is positive.
    std::size_t big = 0;
    for (std::size_t j = 1; j < d; ++j) {
      if (std::abs(v[j]) > std::abs(v[big])) big = j;
    }
    if (v[big] < 0) {
      for (double& e : v) e = -e;
    }
    // Deflate.
    for (std::size_t a = 0; a < d; ++a) {
      for (std::size_t b = 0; b < d; ++b) cov[a * d + b] -= lambda * v[a] * v[b];
    }
    result.components.push_back(std::move(v));
    result.eigenvalues.push_back(lambda);
  }
  for (const auto& r : x) {
    std::vector<double> coords;
    for (const auto& c : result.components) coords.push_back(dot(r, c));
    result.coordinates.push_back(std::move(coords));
  }
  return result;
}

std::string pca_project_csv(const ScriptModel& model, const std::vector<std::u32string>& words, std::size_t k,
                            std::uint64_t seed) {
  std::vector<std::vector<double>> vectors;
  for (const auto& w : words) vectors.push_back(word_vector(model, w, Channel::Fused));
  const PcaResult res = pca(vectors, k, seed);
  std::string out = "word";
  for (std::size_t c = 0; c < k; ++c) out += ",pc" + std::to_string(c + 1);
  out += '\n';
  for (std::size_t i = 0; i < words.size(); ++i) {
    out += csv_field(utf8::encode(words[i]));
    for (double v : res.coordinates[i]) out += ',' + format_real(v);
    out += '\n';
  }
  return out;
}

// ---------------------------------------------------------------------------

std::vector<WordSet> parse_word_sets(std::string_view text) {
  std::vector<WordSet> sets;
  for_each_line(text, [&](std::string_view line, std::size_t no) {
    if (trim(line).empty() || line.front() == '#') return;
    const auto fields = split(line, '\t');
    WordSet set{std::string(trim(fields[0])), {}};
    for (std::size_t i = 1; i < fields.size(); ++i) {
      if (!trim(fields[i]).empty()) set.words.push_back(utf8::decode(trim(fields[i])));
    }
    if (set.name.empty()) throw ParseError("empty set name", no);
    if (set.words.size() < 2) throw ParseError("a word set needs at least 2 words", no);
    sets.push_back(std::move(set));
  });
  return sets;
}

Cohesion cohesion(const std::vector<std::vector<double>>& vectors) {
  Cohesion out;
  const std::size_t n = vectors.size();
  if (n < 2) return out;
  double total = 0.0;
  std::size_t pairs = 0;
  for (std::size_t i = 0; i < n; ++i) {
    for (std::size_t j = i + 1; j < n; ++j) {
      total += cosine(vectors[i], vectors[j]);
      ++pairs;
    }
  }
  out.mean_cosine = total / static_cast<double>(pairs);
  out.dispersion = 1.0 - out.mean_cosine;

  const std::size_t d = vectors.front().size();
  std::vector<std::vector<double>> unit(vectors);
  std::vector<double> centroid(d, 0.0);
  for (auto& v : unit) {
    const double norm = std::sqrt(dot(v, v));
    if (norm > 0.0) {
      for (double& e : v) e /= norm;
    }
    for (std::size_t j = 0; j < d; ++j) centroid[j] += v[j] / static_cast<double>(n);
  }
  for (const auto& v : unit) {
    double sq = 0.0;
    for (std::size_t j = 0; j < d; ++j) sq += (v[j] - centroid[j]) * (v[j] - centroid[j]);
    out.spread += std::sqrt(sq) / static_cast<double>(n);
  }
  return out;
}

std::vector<CohesionRow> cohesion_report(const ScriptModel& model, const std::vector<WordSet>& sets) {
  std::vector<CohesionRow> rows;
  for (const auto& set : sets) {
    std::vector<std::vector<double>> raw;
    std::vector<std::vector<double>> fused;
    for (const auto& w : set.words) {
      raw.push_back(word_vector(model, w, Channel::Raw));
      fused.push_back(word_vector(model, w, Channel::Fused));
    }
    rows.push_back({set.name, cohesion(raw), cohesion(fused)});
  }
  return rows;
}

std::string cohesion_csv(const std::vector<CohesionRow>& rows) {
  std::string out =
      "set,raw_mean_cos,fused_mean_cos,raw_dispersion,fused_dispersion,raw_spread,fused_spread\n";
  for (const auto& r : rows) {
    out += csv_field(r.name) + ',' + format_real(r.raw.mean_cosine) + ',' + format_real(r.fused.mean_cosine) + ',' +
           format_real(r.raw.dispersion) + ',' + format_real(r.fused.dispersion) + ',' + format_real(r.raw.spread) +
           ',' + format_real(r.fused.spread) + '\n';
  }
  return out;
}

}  // namespace scriptkit
