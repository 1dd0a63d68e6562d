#include "scriptkit/model.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>

#include "scriptkit/error.hpp"
#include "scriptkit/ops.hpp"
#include "scriptkit/utf8.hpp"

namespace scriptkit {

namespace {

const SubcharTokenizer& shared_tokenizer() {
  static const SubcharTokenizer tokenizer;
  return tokenizer;
}

void add_rows(Tensor& dst, std::size_t dst_row, const Tensor& src, std::size_t src_row) {
  auto d = dst.row(dst_row);
  auto s = src.row(src_row);
  for (std::size_t j = 0; j < d.size(); ++j) d[j] += s[j];
}

void check_width(const Tensor& t, std::size_t d, const char* what) {
  if (t.rank() != 2 || t.cols() != d) {
    throw ShapeError(std::string(what) + ": expected (*, " + std::to_string(d) + "), got " + shape_string(t.shape()));
  }
}

}  // namespace

// ---------------------------------------------------------------------------
// Parameters

ScriptParams ScriptParams::init(const ScriptConfig& config, std::size_t subchar_vocab, std::size_t subword_vocab,
                                Rng& rng) {
  config.validate();
  const std::size_t d = config.embed_dim;
  const std::size_t w = slot_widths(config.scheme).total();
  ScriptParams p;
  p.compression = config.compression;
  p.fusion = config.fusion;
  p.subchar_embed = init_uniform({subchar_vocab, d}, d, rng);
  switch (config.compression) {
    case Compression::Principles:
      p.gru_seq = GruParams::init(d, rng);
      p.gru_iv = GruParams::init(d, rng);
      p.conv = Conv2x1Params::init(d, rng);
      p.gru_char = GruParams::init(d, rng);
      break;
    case Compression::Linear:
      p.linear_w = init_uniform({w * d, d}, w * d, rng);
      p.linear_b = init_uniform({d}, w * d, rng);
      break;
    case Compression::Attention:
      p.pool_query = init_uniform({d}, d, rng);
      p.pool_w_k = init_uniform({d, d}, d, rng);
      p.pool_w_v = init_uniform({d, d}, d, rng);
      break;
  }
  switch (config.fusion) {
    case Fusion::CrossAttention:
      p.cross = CrossAttentionParams::init(d, config.heads, rng);
      break;
    case Fusion::Concatenation:
      p.concat_w = init_uniform({2 * d, d}, 2 * d, rng);
      p.concat_b = init_uniform({d}, 2 * d, rng);
      break;
    case Fusion::Summation:
      break;
  }
  p.subword_embed = init_uniform({subword_vocab, d}, d, rng);
  return p;
}

ScriptParams ScriptParams::zeros(const ScriptConfig& config, std::size_t subchar_vocab, std::size_t subword_vocab) {
  Rng rng(0);
  ScriptParams p = init(config, subchar_vocab, subword_vocab, rng);
  ParamGroup group;
  p.register_params(group);
  for (const auto& entry : group) entry.tensor->fill(0.0);
  return p;
}

void ScriptParams::register_params(ParamGroup& group) {
  group.add("subchar_embed", subchar_embed);
  switch (compression) {
    case Compression::Principles:
      gru_seq.register_params(group, "stage1.gru");
      gru_iv.register_params(group, "stage1.gru_iv");
      conv.register_params(group, "stage1.conv");
      gru_char.register_params(group, "stage2.gru");
      break;
    case Compression::Linear:
      group.add("linear.w", linear_w);
      group.add("linear.b", linear_b);
      break;
    case Compression::Attention:
      group.add("pool.query", pool_query);
      group.add("pool.w_k", pool_w_k);
      group.add("pool.w_v", pool_w_v);
      break;
  }
  switch (fusion) {
    case Fusion::CrossAttention:
      cross.register_params(group, "fusion.cross");
      break;
    case Fusion::Concatenation:
      group.add("fusion.concat.w", concat_w);
      group.add("fusion.concat.b", concat_b);
      break;
    case Fusion::Summation:
      break;
  }
  group.add("subword_embed", subword_embed);
}

// ---------------------------------------------------------------------------
// Units

UnitPlan plan_units(std::u32string_view text, const ScriptConfig& config, const SubwordVocab& vocab,
                    const BoundaryMap* external) {
  UnitPlan plan;
  switch (config.granularity) {
    case Granularity::Subword: {
      Encoding enc = encode(text, vocab, false);
      plan.ids = std::move(enc.ids);
      plan.boundary = std::move(enc.boundary);
      return plan;
    }
    case Granularity::Character:
      plan.boundary = BoundaryMap::characters(text.size());
      break;
    case Granularity::Word:
      plan.boundary = BoundaryMap::words(text);
      break;
    case Granularity::External:
      if (!external) throw ConfigError("external granularity needs a boundary map");
      external->validate(text.size(), false);
      plan.boundary = *external;
      break;
  }
  for (const auto& r : plan.boundary.ranges) plan.ids.push_back(vocab.id_or_unk(text.substr(r.begin, r.size())));
  return plan;
}

// ---------------------------------------------------------------------------
// Embedding lookup

Tensor embed_rows(const std::vector<int>& ids, const Tensor& table) {
  const std::size_t d = table.cols();
  Tensor out = Tensor::matrix(ids.size(), d);
  for (std::size_t i = 0; i < ids.size(); ++i) {
    if (ids[i] < 0 || static_cast<std::size_t>(ids[i]) >= table.rows()) {
      throw IndexError("embedding id " + std::to_string(ids[i]) + " outside table of " +
                       std::to_string(table.rows()) + " rows");
    }
    std::copy_n(table.row(static_cast<std::size_t>(ids[i])).begin(), d, out.row(i).begin());
  }
  return out;
}

void embed_rows_backward(const std::vector<int>& ids, Tensor& table, const Tensor& d) {
  auto g = table.grad();
  const std::size_t dim = table.cols();
  for (std::size_t i = 0; i < ids.size(); ++i) {
    const std::size_t base = static_cast<std::size_t>(ids[i]) * dim;
    for (std::size_t j = 0; j < dim; ++j) g[base + j] += d.at(i, j);
  }
}

// ---------------------------------------------------------------------------
// Stage 1

Tensor stage1_subchar_to_char(const Tensor& e, const SubcharSequence& seq, const ScriptParams& p,
                              Stage1Cache* cache) {
  const std::size_t d = p.gru_seq.dim();
  const std::size_t w = seq.width();
  check_width(e, d, "stage1");
  if (e.rows() != seq.size()) {
    throw ShapeError("stage1: " + std::to_string(e.rows()) + " embeddings for " + std::to_string(seq.size()) +
                     " tokens");
  }
  if (w == 0 || e.rows() % w != 0) {
    throw ShapeError("stage1: sequence length " + std::to_string(e.rows()) + " is not a multiple of width " +
                     std::to_string(w));
  }
  const std::size_t c = e.rows() / w;

  Stage1Cache local;
  Stage1Cache& k = cache ? *cache : local;
  k.width = w;
  k.kinds.clear();
  k.groups.clear();
  k.chars.clear();
  k.h = gru_forward(p.gru_seq, e, &k.seq_gru);

  for (std::size_t ch = 0; ch < c; ++ch) {
    k.kinds.push_back(char_kind(seq, ch));
    k.groups.push_back(group_roles(seq, ch));
    if (k.kinds.back() == CharKind::Syllable) k.chars.push_back(ch);
  }
  const std::size_t s = k.chars.size();
  auto slot_sum = [&](const SubcharSequence::Span& span, std::span<double> out) {
    for (std::size_t t = span.begin; t < span.begin + span.length; ++t) {
      auto row = k.h.row(t);
      for (std::size_t j = 0; j < d; ++j) out[j] += row[j];
    }
  };
  Tensor iv_in = Tensor::matrix(s, d);
  k.stack = Tensor({2, s, d});
  for (std::size_t i = 0; i < s; ++i) {
    const auto& g = k.groups[k.chars[i]];
    slot_sum(g.initial, iv_in.row(i));
    slot_sum(g.vowel, iv_in.row(i));
    slot_sum(g.final_, {k.stack.values().data() + (s + i) * d, d});
  }
  const Tensor h_iv = gru_forward(p.gru_iv, iv_in, &k.iv_gru);
  std::copy(h_iv.values().begin(), h_iv.values().end(), k.stack.values().begin());
  k.conv_out = conv2x1_forward(p.conv, k.stack);
  const Tensor pooled = avg_pool_height(k.conv_out);

  Tensor h_c = Tensor::matrix(c, d);
  for (std::size_t i = 0; i < s; ++i) add_rows(h_c, k.chars[i], pooled, i);
  for (std::size_t ch = 0; ch < c; ++ch) {
    if (k.kinds[ch] != CharKind::Syllable) add_rows(h_c, ch, k.h, ch * w);
  }
  return h_c;
}

Tensor stage1_backward(ScriptParams& p, const Stage1Cache& k, const Tensor& dh_c) {
  const std::size_t d = p.gru_seq.dim();
  const std::size_t s = k.chars.size();
  const std::size_t n = k.h.rows();
  Tensor dh = Tensor::matrix(n, d);
  Tensor dpooled = Tensor::matrix(s, d);
  for (std::size_t i = 0; i < s; ++i) add_rows(dpooled, i, dh_c, k.chars[i]);
  for (std::size_t ch = 0; ch < k.kinds.size(); ++ch) {
    if (k.kinds[ch] != CharKind::Syllable) add_rows(dh, ch * k.width, dh_c, ch);
  }
  const Tensor dconv = avg_pool_height_backward(k.conv_out, dpooled);
  const Tensor dstack = conv2x1_backward(p.conv, k.stack, dconv);
  Tensor dh_iv = Tensor::matrix(s, d);
  std::copy_n(dstack.values().begin(), s * d, dh_iv.values().begin());
  const Tensor div = gru_backward(p.gru_iv, k.iv_gru, dh_iv);

  auto spread = [&](const SubcharSequence::Span& span, const double* src) {
    for (std::size_t t = span.begin; t < span.begin + span.length; ++t) {
      auto row = dh.row(t);
      for (std::size_t j = 0; j < d; ++j) row[j] += src[j];
    }
  };
  for (std::size_t i = 0; i < s; ++i) {
    const auto& g = k.groups[k.chars[i]];
    spread(g.initial, &div.values()[i * d]);
    spread(g.vowel, &div.values()[i * d]);
    spread(g.final_, &dstack.values()[(s + i) * d]);
  }
  return gru_backward(p.gru_seq, k.seq_gru, dh);
}

// ---------------------------------------------------------------------------
// Stage 2

Tensor stage2_char_to_unit(const Tensor& h_c, const BoundaryMap& boundary, const GruParams& gru, Stage2Cache* cache) {
  check_width(h_c, gru.dim(), "stage2");
  Stage2Cache local;
  Stage2Cache& k = cache ? *cache : local;
  k.last = align_last_chars(boundary, h_c.rows());
  const Tensor g = gru_forward(gru, h_c, &k.char_gru);
  Tensor h_s = Tensor::matrix(k.last.size(), gru.dim());
  for (std::size_t u = 0; u < k.last.size(); ++u) add_rows(h_s, u, g, k.last[u]);
  return h_s;
}

Tensor stage2_backward(GruParams& gru, const Stage2Cache& k, const Tensor& dh_s) {
  Tensor dg = Tensor::matrix(k.char_gru.x.rows(), gru.dim());
  for (std::size_t u = 0; u < k.last.size(); ++u) add_rows(dg, k.last[u], dh_s, u);
  return gru_backward(gru, k.char_gru, dg);
}

// ---------------------------------------------------------------------------
// Alternative compressions

Tensor compress_linear(const Tensor& e, const SubcharSequence& seq, const BoundaryMap& boundary, const Tensor& w,
                       const Tensor& b, LinearCompressionCache* cache) {
  const std::size_t d = b.size();
  const std::size_t width = seq.width();
  check_width(e, d, "compress_linear");
  if (e.rows() != seq.size() || width == 0 || e.rows() % width != 0 || w.rows() != width * d) {
    throw ShapeError("compress_linear: embeddings " + shape_string(e.shape()) + " do not fit projection " +
                     shape_string(w.shape()) + " at width " + std::to_string(width));
  }
  LinearCompressionCache local;
  LinearCompressionCache& k = cache ? *cache : local;
  const std::size_t c = e.rows() / width;
  k.last = align_last_chars(boundary, c);
  k.windows = Tensor({c, width * d}, {e.values().begin(), e.values().end()});
  const Tensor per_char = affine(k.windows, w, &b);
  Tensor h_s = Tensor::matrix(k.last.size(), d);
  for (std::size_t u = 0; u < k.last.size(); ++u) add_rows(h_s, u, per_char, k.last[u]);
  return h_s;
}

Tensor compress_linear_backward(Tensor& w, Tensor& b, const LinearCompressionCache& k, const Tensor& dh_s) {
  const std::size_t d = b.size();
  Tensor dchar = Tensor::matrix(k.windows.rows(), d);
  for (std::size_t u = 0; u < k.last.size(); ++u) add_rows(dchar, k.last[u], dh_s, u);
  Tensor dwin = Tensor::matrix(k.windows.rows(), k.windows.cols());
  affine_backward(k.windows, w, &b, dchar, &dwin);
  dwin.reshape({dwin.size() / d, d});
  return dwin;
}

Tensor compress_attention(const Tensor& e, const SubcharSequence& seq, const BoundaryMap& boundary,
                          const Tensor& query, const Tensor& w_k, const Tensor& w_v,
                          AttentionCompressionCache* cache) {
  const std::size_t d = query.size();
  const std::size_t width = seq.width();
  check_width(e, d, "compress_attention");
  if (e.rows() != seq.size() || width == 0 || e.rows() % width != 0) {
    throw ShapeError("compress_attention: embeddings " + shape_string(e.shape()) + " do not match " +
                     std::to_string(seq.size()) + " tokens");
  }
  boundary.validate(e.rows() / width, false);
  AttentionCompressionCache local;
  AttentionCompressionCache& k = cache ? *cache : local;
  k.e = e;
  k.e.clear_grad();
  k.keys = affine(e, w_k, nullptr);
  k.values = affine(e, w_v, nullptr);
  k.weights.clear();
  k.token_ranges.clear();
  const double scale = 1.0 / std::sqrt(static_cast<double>(d));
  Tensor h_s = Tensor::matrix(boundary.unit_count(), d);
  for (std::size_t u = 0; u < boundary.unit_count(); ++u) {
    const CharRange tokens{boundary.ranges[u].begin * width, boundary.ranges[u].end * width};
    std::vector<double> a(tokens.size());
    double top = -HUGE_VAL;
    for (std::size_t j = 0; j < a.size(); ++j) {
      double dot = 0.0;
      for (std::size_t c = 0; c < d; ++c) dot += k.keys.at(tokens.begin + j, c) * query[c];
      a[j] = dot * scale;
      top = std::max(top, a[j]);
    }
    double total = 0.0;
    for (double& v : a) total += (v = std::exp(v - top));
    for (double& v : a) v /= total;
    for (std::size_t j = 0; j < a.size(); ++j) {
      for (std::size_t c = 0; c < d; ++c) h_s.at(u, c) += a[j] * k.values.at(tokens.begin + j, c);
    }
    k.weights.push_back(std::move(a));
    k.token_ranges.push_back(tokens);
  }
  return h_s;
}

Tensor compress_attention_backward(Tensor& query, Tensor& w_k, Tensor& w_v, const AttentionCompressionCache& k,
                                   const Tensor& dh_s) {
  const std::size_t d = query.size();
  const double scale = 1.0 / std::sqrt(static_cast<double>(d));
  Tensor dkeys = Tensor::matrix(k.keys.rows(), d);
  Tensor dvalues = Tensor::matrix(k.values.rows(), d);
  auto gq = query.grad();
  for (std::size_t u = 0; u < k.weights.size(); ++u) {
    const auto& a = k.weights[u];
    const std::size_t base = k.token_ranges[u].begin;
    std::vector<double> da(a.size(), 0.0);
    double dot = 0.0;
    for (std::size_t j = 0; j < a.size(); ++j) {
      for (std::size_t c = 0; c < d; ++c) {
        dvalues.at(base + j, c) += a[j] * dh_s.at(u, c);
        da[j] += dh_s.at(u, c) * k.values.at(base + j, c);
      }
      dot += a[j] * da[j];
    }
    for (std::size_t j = 0; j < a.size(); ++j) {
      const double dlogit = a[j] * (da[j] - dot) * scale;
      for (std::size_t c = 0; c < d; ++c) {
        gq[c] += dlogit * k.keys.at(base + j, c);
        dkeys.at(base + j, c) += dlogit * query[c];
      }
    }
  }
  Tensor de = Tensor::matrix(k.e.rows(), d);
  affine_backward(k.e, w_k, nullptr, dkeys, &de);
  affine_backward(k.e, w_v, nullptr, dvalues, &de);
  return de;
}

// ---------------------------------------------------------------------------
// Fusion

Tensor fuse(const Tensor& e_s, const Tensor& h_s, const ScriptParams& p, bool residual, FusionCache* cache) {
  require_rank(e_s, 2, "fuse");
  require_same_shape(e_s, h_s, "fuse");
  FusionCache local;
  FusionCache& k = cache ? *cache : local;
  k.mode = p.fusion;
  switch (p.fusion) {
    case Fusion::CrossAttention:
      return cross_attention_forward(p.cross, e_s, h_s, residual, &k.cross);
    case Fusion::Summation:
      return ops::add(e_s, h_s);
    case Fusion::Concatenation:
      k.concat_in = ops::concat({&e_s, &h_s}, 1);
      return affine(k.concat_in, p.concat_w, &p.concat_b);
  }
  throw ConfigError("unknown fusion mode");
}

std::pair<Tensor, Tensor> fuse_backward(ScriptParams& p, const FusionCache& k, const Tensor& de_f) {
  switch (k.mode) {
    case Fusion::CrossAttention:
      return cross_attention_backward(p.cross, k.cross, de_f);
    case Fusion::Summation:
      return {de_f, de_f};
    case Fusion::Concatenation: {
      const std::size_t d = de_f.cols();
      Tensor dcat = Tensor::matrix(de_f.rows(), 2 * d);
      affine_backward(k.concat_in, p.concat_w, &p.concat_b, de_f, &dcat);
      Tensor de_s = Tensor::matrix(de_f.rows(), d);
      Tensor dh_s = Tensor::matrix(de_f.rows(), d);
      for (std::size_t r = 0; r < de_f.rows(); ++r) {
        for (std::size_t j = 0; j < d; ++j) {
          de_s.at(r, j) = dcat.at(r, j);
          dh_s.at(r, j) = dcat.at(r, d + j);
        }
      }
      return {std::move(de_s), std::move(dh_s)};
    }
  }
  throw ConfigError("unknown fusion mode");
}

// ---------------------------------------------------------------------------
// Model

ScriptModel::ScriptModel(ScriptConfig config, SubwordVocab vocab, ScriptParams params)
    : config_(std::move(config)),
      vocab_(std::move(vocab)),
      params_(std::make_unique<ScriptParams>(std::move(params))) {
  config_.validate();
  const std::size_t d = config_.embed_dim;
  if (params_->compression != config_.compression || params_->fusion != config_.fusion) {
    throw ConfigError("parameters were built for a different compression or fusion mode");
  }
  if (params_->subchar_embed.rank() != 2 || params_->subchar_embed.cols() != d ||
      params_->subchar_embed.rows() != shared_tokenizer().vocab().size()) {
    throw ConfigError("subchar table shape " + shape_string(params_->subchar_embed.shape()) + " does not match");
  }
  if (params_->subword_embed.rank() != 2 || params_->subword_embed.cols() != d ||
      params_->subword_embed.rows() != vocab_.size()) {
    throw ConfigError("subword table shape " + shape_string(params_->subword_embed.shape()) +
                      " does not match a vocabulary of " + std::to_string(vocab_.size()));
  }
  if (config_.compression == Compression::Linear &&
      params_->linear_w.shape() != Shape{slot_widths(config_.scheme).total() * d, d}) {
    throw ConfigError("linear projection shape " + shape_string(params_->linear_w.shape()) +
                      " does not match the scheme width");
  }
  if (config_.fusion == Fusion::CrossAttention) params_->cross.heads = config_.heads;
  rebuild_group();
}

ScriptModel ScriptModel::create(const ScriptConfig& config, SubwordVocab vocab, std::uint64_t seed) {
  Rng rng(seed);
  ScriptParams params = ScriptParams::init(config, shared_tokenizer().vocab().size(), vocab.size(), rng);
  return ScriptModel(config, std::move(vocab), std::move(params));
}

ScriptModel ScriptModel::from_checkpoint(const Checkpoint& checkpoint) {
  const auto config_it = checkpoint.meta.find("config");
  const auto vocab_it = checkpoint.meta.find("vocab");
  if (config_it == checkpoint.meta.end() || vocab_it == checkpoint.meta.end()) {
    throw ConfigError("checkpoint lacks model config or vocabulary");
  }
  const ScriptConfig config = ScriptConfig::from_text(config_it->second);
  SubwordVocab vocab = SubwordVocab::parse(vocab_it->second);
  ScriptModel model(config, vocab, ScriptParams::zeros(config, shared_tokenizer().vocab().size(), vocab.size()));
  checkpoint.load_into(model.param_group());
  return model;
}

ScriptModel ScriptModel::clone() const {
  ScriptModel copy(config_, vocab_, *params_);
  for (std::size_t i = 0; i < group_->size(); ++i) {
    copy.group_->set_trainable(group_->entries()[i].name, group_->entries()[i].trainable);
  }
  for (const auto& entry : *copy.group_) entry.tensor->clear_grad();
  return copy;
}

const SubcharTokenizer& ScriptModel::tokenizer() const { return shared_tokenizer(); }

void ScriptModel::rebuild_group() {
  group_ = std::make_unique<ParamGroup>();
  params_->register_params(*group_);
}

Tensor ScriptModel::forward(std::string_view utf8_text, ForwardTrace* trace, const BoundaryMap* external) const {
  return forward(std::u32string_view(utf8::decode(utf8_text)), trace, external);
}

Tensor ScriptModel::forward(std::u32string_view text, ForwardTrace* trace, const BoundaryMap* external) const {
  ForwardTrace local;
  ForwardTrace& t = trace ? *trace : local;
  const ScriptParams& p = *params_;
  const std::size_t d = config_.embed_dim;

  t.has_cls = config_.cls_bypass;
  t.units = plan_units(text, config_, vocab_, external);
  t.seq = shared_tokenizer().tokenize(text, config_.scheme);
  t.e = embed_rows(t.seq.ids, p.subchar_embed);
  t.e_s = embed_rows(t.units.ids, p.subword_embed);

  switch (config_.compression) {
    case Compression::Principles:
      t.h_c = stage1_subchar_to_char(t.e, t.seq, p, &t.stage1);
      t.h_s = stage2_char_to_unit(t.h_c, t.units.boundary, p.gru_char, &t.stage2);
      break;
    case Compression::Linear:
      t.h_s = compress_linear(t.e, t.seq, t.units.boundary, p.linear_w, p.linear_b, &t.linear);
      break;
    case Compression::Attention:
      t.h_s = compress_attention(t.e, t.seq, t.units.boundary, p.pool_query, p.pool_w_k, p.pool_w_v, &t.attention);
      break;
  }
  Tensor e_f = fuse(t.e_s, t.h_s, p, config_.residual_fusion, &t.fusion);
  if (!t.has_cls) return e_f;

  Tensor out = Tensor::matrix(e_f.rows() + 1, d);
  std::copy_n(p.subchar_embed.row(SubcharVocab::kCls).begin(), d, out.row(0).begin());
  std::copy(e_f.values().begin(), e_f.values().end(), out.values().begin() + static_cast<std::ptrdiff_t>(d));
  return out;
}

void ScriptModel::backward(const ForwardTrace& t, const Tensor& d_out) {
  ScriptParams& p = *params_;
  const std::size_t d = config_.embed_dim;
  const std::size_t units = t.units.ids.size();
  const std::size_t offset = t.has_cls ? 1 : 0;
  if (d_out.rank() != 2 || d_out.rows() != units + offset || d_out.cols() != d) {
    throw ShapeError("backward: gradient " + shape_string(d_out.shape()) + " does not match output (" +
                     std::to_string(units + offset) + ", " + std::to_string(d) + ")");
  }
  if (t.has_cls) embed_rows_backward({SubcharVocab::kCls}, p.subchar_embed, ops::slice(d_out, 0, 0, 1));
  const Tensor de_f = ops::slice(d_out, 0, offset, offset + units);

  auto [de_s, dh_s] = fuse_backward(p, t.fusion, de_f);
  embed_rows_backward(t.units.ids, p.subword_embed, de_s);

  Tensor de;
  switch (config_.compression) {
    case Compression::Principles:
      de = stage1_backward(p, t.stage1, stage2_backward(p.gru_char, t.stage2, dh_s));
      break;
    case Compression::Linear:
      de = compress_linear_backward(p.linear_w, p.linear_b, t.linear, dh_s);
      break;
    case Compression::Attention:
      de = compress_attention_backward(p.pool_query, p.pool_w_k, p.pool_w_v, t.attention, dh_s);
      break;
  }
  embed_rows_backward(t.seq.ids, p.subchar_embed, de);
}

void ScriptModel::zero_script_parameters() {
  for (const auto& entry : *group_) {
    if (entry.tensor != &params_->subword_embed) entry.tensor->fill(0.0);
  }
}

Checkpoint ScriptModel::checkpoint(std::uint64_t seed) const {
  return Checkpoint::capture(*group_, seed, {{"config", config_.to_text()}, {"vocab", vocab_.to_text()}});
}

std::string embedding_csv(const ScriptModel& model, std::u32string_view text, bool header,
                          const BoundaryMap* external) {
  ForwardTrace trace;
  const Tensor e_f = model.forward(text, &trace, external);
  const std::size_t d = model.config().embed_dim;
  std::string out;
  auto csv_field = [](const std::string& s) {
    if (s.find_first_of(",\"\n\r") == std::string::npos) return s;
    std::string quoted = "\"";
    for (char c : s) {
      if (c == '"') quoted += '"';
      quoted += c;
    }
    return quoted + "\"";
  };
  if (header) {
    out += "token";
    for (std::size_t j = 0; j < d; ++j) out += ",dim" + std::to_string(j);
    out += '\n';
  }
  char buf[32];
  for (std::size_t r = 0; r < e_f.rows(); ++r) {
    std::string token;
    if (trace.has_cls && r == 0) {
      token = "[CLS]";
    } else {
      const auto& range = trace.units.boundary.ranges[r - (trace.has_cls ? 1 : 0)];
      token = utf8::encode(text.substr(range.begin, range.size()));
    }
    out += csv_field(token);
    for (std::size_t j = 0; j < d; ++j) {
      std::snprintf(buf, sizeof(buf), ",%.17g", e_f.at(r, j));
      out += buf;
    }
    out += '\n';
  }
  return out;
}

}  // namespace scriptkit
