#pragma once

#include <cstddef>
#include <cstdint>
#include <memory>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

#include "scriptkit/checkpoint.hpp"
#include "scriptkit/config.hpp"
#include "scriptkit/layers.hpp"
#include "scriptkit/rng.hpp"
#include "scriptkit/subchar.hpp"
#include "scriptkit/subword.hpp"
#include "scriptkit/tensor.hpp"

namespace scriptkit {

/// Every trainable tensor of the pipeline. Only the parts used by the
/// configured compression and fusion modes are allocated.
struct ScriptParams {
  Compression compression = Compression::Principles;
  Fusion fusion = Fusion::CrossAttention;

  Tensor subchar_embed;  // (subchar vocab, D)

  // Principles compression.
  GruParams gru_seq;   // over the whole subchar sequence
  GruParams gru_iv;    // over h_I + h_V, one step per syllable
  Conv2x1Params conv;  // collapses [h_IV; h_F]
  GruParams gru_char;  // over characters

  // Linear compression: flattened (W * D) window -> D.
  Tensor linear_w, linear_b;

  // Attention compression: one learned query, key and value projections.
  Tensor pool_query, pool_w_k, pool_w_v;

  // Fusion.
  CrossAttentionParams cross;
  Tensor concat_w, concat_b;  // (2D, D), (D)

  Tensor subword_embed;  // (subword vocab, D)

  static ScriptParams init(const ScriptConfig& config, std::size_t subchar_vocab, std::size_t subword_vocab,
                           Rng& rng);
  static ScriptParams zeros(const ScriptConfig& config, std::size_t subchar_vocab, std::size_t subword_vocab);

  std::size_t dim() const { return subchar_embed.cols(); }
  /// Registers the allocated tensors in a fixed order; the subword table
  /// comes last.
  void register_params(ParamGroup& group);
};

/// Units of the output granularity, CLS excluded.
struct UnitPlan {
  std::vector<int> ids;  // subword table rows for e_S
  BoundaryMap boundary;  // character ranges, one per id
};

/// Builds the unit list for the configured granularity. External
/// granularity requires a caller map covering the text; other
/// granularities ignore it. Throws ConfigError or AlignmentError.
UnitPlan plan_units(std::u32string_view text, const ScriptConfig& config, const SubwordVocab& vocab,
                    const BoundaryMap* external = nullptr);

// ---------------------------------------------------------------------------
// Stages. Each forward fills an optional cache consumed by its backward.

/// Row lookup. Throws IndexError for ids outside the table.
Tensor embed_rows(const std::vector<int>& ids, const Tensor& table);
/// Scatters d (ids.size(), D) into the table's gradient rows.
void embed_rows_backward(const std::vector<int>& ids, Tensor& table, const Tensor& d);

struct Stage1Cache {
  GruCache seq_gru;
  Tensor h;                        // (N, D)
  std::vector<std::size_t> chars;  // syllable character indices
  GruCache iv_gru;
  Tensor stack;                    // (2, S, D)
  Tensor conv_out;                 // (1, S, D)
  std::size_t width = 0;
  std::vector<CharKind> kinds;
  std::vector<RoleGroups> groups;
};

/// e (N, D) -> h_C (N / W, D):
///   h   = GRU_seq(e)
///   h_I, h_V, h_F = per-slot sums of h for each syllable
///   h_IV = GRU_iv(h_I + h_V)     (syllables only, in order)
///   h_C = AvgPool_height(Conv2x1([h_IV; h_F]))
/// Bare letters and non-Hangul characters take h at their first token.
/// Throws ShapeError when e and seq disagree or N is not a multiple of W.
Tensor stage1_subchar_to_char(const Tensor& e, const SubcharSequence& seq, const ScriptParams& p,
                              Stage1Cache* cache = nullptr);
/// Returns de.
Tensor stage1_backward(ScriptParams& p, const Stage1Cache& cache, const Tensor& dh_c);

struct Stage2Cache {
  GruCache char_gru;
  std::vector<std::size_t> last;
};

/// GRU over characters, then the state at each unit's last character.
/// Throws AlignmentError when boundary does not cover h_c's rows.
Tensor stage2_char_to_unit(const Tensor& h_c, const BoundaryMap& boundary, const GruParams& gru,
                           Stage2Cache* cache = nullptr);
Tensor stage2_backward(GruParams& gru, const Stage2Cache& cache, const Tensor& dh_s);

struct LinearCompressionCache {
  Tensor windows;  // (C, W * D)
  std::vector<std::size_t> last;
};

/// Each character's flattened token window projected to D, then the
/// last character of each unit.
Tensor compress_linear(const Tensor& e, const SubcharSequence& seq, const BoundaryMap& boundary,
                       const Tensor& w, const Tensor& b, LinearCompressionCache* cache = nullptr);
Tensor compress_linear_backward(Tensor& w, Tensor& b, const LinearCompressionCache& cache, const Tensor& dh_s);

struct AttentionCompressionCache {
  Tensor e, keys, values;
  std::vector<std::vector<double>> weights;  // per unit, over its tokens
  std::vector<CharRange> token_ranges;
};

/// Per unit: softmax((e_j W_k) . q / sqrt(D)) over the unit's tokens,
/// weighted sum of e_j W_v.
Tensor compress_attention(const Tensor& e, const SubcharSequence& seq, const BoundaryMap& boundary,
                          const Tensor& query, const Tensor& w_k, const Tensor& w_v,
                          AttentionCompressionCache* cache = nullptr);
Tensor compress_attention_backward(Tensor& query, Tensor& w_k, Tensor& w_v, const AttentionCompressionCache& cache,
                                   const Tensor& dh_s);

struct FusionCache {
  Fusion mode = Fusion::Summation;
  CrossAttentionCache cross;
  Tensor concat_in;  // (N', 2D)
};

/// Cross-attention (Q = e_S, KV = h_S), e_S + h_S, or [e_S | h_S] W + b.
/// Neither input is normalized. Throws ShapeError on mismatched shapes.
Tensor fuse(const Tensor& e_s, const Tensor& h_s, const ScriptParams& p, bool residual,
            FusionCache* cache = nullptr);
/// Returns (de_S, dh_S).
std::pair<Tensor, Tensor> fuse_backward(ScriptParams& p, const FusionCache& cache, const Tensor& de_f);

// ---------------------------------------------------------------------------

struct ForwardTrace {
  bool has_cls = false;
  UnitPlan units;
  SubcharSequence seq;
  Tensor e;    // (N, D)
  Tensor e_s;  // (N', D)
  Tensor h_c;  // (C, D); Principles only
  Tensor h_s;  // (N', D)
  Stage1Cache stage1;
  Stage2Cache stage2;
  LinearCompressionCache linear;
  AttentionCompressionCache attention;
  FusionCache fusion;
};

class ScriptModel {
 public:
  /// Throws ConfigError when the parameters do not fit config and vocab.
  ScriptModel(ScriptConfig config, SubwordVocab vocab, ScriptParams params);
  /// Fresh parameters from a seeded generator.
  static ScriptModel create(const ScriptConfig& config, SubwordVocab vocab, std::uint64_t seed);
  static ScriptModel from_checkpoint(const Checkpoint& checkpoint);

  ScriptModel(ScriptModel&&) noexcept = default;
  ScriptModel& operator=(ScriptModel&&) noexcept = default;
  ScriptModel clone() const;

  const ScriptConfig& config() const { return config_; }
  const SubwordVocab& vocab() const { return vocab_; }
  const SubcharTokenizer& tokenizer() const;
  ScriptParams& params() { return *params_; }
  const ScriptParams& params() const { return *params_; }
  ParamGroup& param_group() { return *group_; }
  const ParamGroup& param_group() const { return *group_; }

  /// e_F, shape (N', D), or (N' + 1, D) with the CLS row first when
  /// cls_bypass is set.
  Tensor forward(std::u32string_view text, ForwardTrace* trace = nullptr,
                 const BoundaryMap* external = nullptr) const;
  Tensor forward(std::string_view utf8_text, ForwardTrace* trace = nullptr,
                 const BoundaryMap* external = nullptr) const;
  /// Adds d(loss)/d(param) for every parameter given d(loss)/d(e_F).
  void backward(const ForwardTrace& trace, const Tensor& d_out);

  /// Zeroes everything except the subword embedding table.
  void zero_script_parameters();

  /// Meta holds the config and vocab so the checkpoint is self-contained.
  Checkpoint checkpoint(std::uint64_t seed) const;

 private:
  void rebuild_group();

  ScriptConfig config_;
  SubwordVocab vocab_;
  std::unique_ptr<ScriptParams> params_;
  std::unique_ptr<ParamGroup> group_;
};

/// `token,dim0,...,dimD-1` rows of e_F for one text; the CLS row is named
/// [CLS]. Values use 17 significant digits.
std::string embedding_csv(const ScriptModel& model, std::u32string_view text, bool header,
                          const BoundaryMap* external = nullptr);

}  // namespace scriptkit
