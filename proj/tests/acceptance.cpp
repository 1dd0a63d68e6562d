#include <chrono>
#include <cmath>
#include <cstdio>
#include <fstream>
#include <functional>
#include <iostream>
#include <set>
#include <sstream>
#include <string>
#include <vector>
#include <json.hpp>
#include <memory>

#include "scriptkit/error.hpp"
#include "scriptkit/gradcheck.hpp"
#include "scriptkit/hangul.hpp"
#include "scriptkit/layers.hpp"
#include "scriptkit/model.hpp"
#include "scriptkit/ops.hpp"
#include "scriptkit/oracle.hpp"
#include "scriptkit/probe.hpp"
#include "scriptkit/subchar.hpp"
#include "scriptkit/subword.hpp"
#include "scriptkit/trainer.hpp"
#include "scriptkit/utf8.hpp"
#include "test_support.hpp"

using namespace scriptkit;
namespace orc = scriptkit::oracle;

namespace {

constexpr double kC1Seconds = 1.0;
constexpr double kC4Seconds = 5.0;
constexpr double kC5Seconds = 30.0;
constexpr double kC6Seconds = 300.0;
constexpr double kPipelineRelTol = 1e-4;
constexpr double kOpRelTol = 1e-6;
constexpr double kOpEps = 1e-5;
constexpr double kProbeGain = 0.05;

/// Collects failed checks for one criterion.
struct Check {
  std::vector<std::string> failures;
  std::string detail;

  void expect(bool ok, const std::string& what) {
    if (!ok) failures.push_back(what);
  }
};

int run_criterion(int number, const std::string& title, double limit_seconds, const std::function<void(Check&)>& body) {
  Check check;
  const auto start = std::chrono::steady_clock::now();
  try {
    body(check);
  } catch (const std::exception& e) {
    check.failures.push_back(std::string("exception: ") + e.what());
  }
  const double seconds = std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();
  if (limit_seconds > 0.0 && seconds >= limit_seconds) {
    std::ostringstream msg;
    msg << "runtime " << seconds << " s exceeds " << limit_seconds << " s";
    check.failures.push_back(msg.str());
  }
  const bool ok = check.failures.empty();
  std::printf("%s criterion %d: %s (%.2f s)%s%s\n", ok ? "PASS" : "FAIL", number, title.c_str(), seconds,
              check.detail.empty() ? "" : " | ", check.detail.c_str());
  for (const auto& f : check.failures) std::printf("    - %s\n", f.c_str());
  std::fflush(stdout);
  return ok ? 0 : 1;
}

std::string fmt(double v, int digits = 3) {
  char buf[64];
  std::snprintf(buf, sizeof buf, "%.*f", digits, v);
  return buf;
}

Tensor random_tensor(Shape shape, Rng& rng) {
  Tensor t(std::move(shape));
  for (auto& v : t.values()) v = rng.uniform(-1.0, 1.0);
  return t;
}

// ---------------------------------------------------------------------------

void hangul_round_trip(Check& c) {
  std::size_t trips = 0;
  for (char32_t s = hangul::kSyllableFirst; s <= hangul::kSyllableLast; ++s) {
    const auto block = hangul::decompose(s);
    if (block && hangul::compose(*block) == s) ++trips;
  }
  c.expect(trips == hangul::kSyllableCount, "round trip held for " + std::to_string(trips) + " of 11172");

  std::ifstream in(test::source_path("tests/fixtures/nfd_oracle.tsv"));
  std::string line;
  std::size_t checked = 0, agreed = 0;
  while (std::getline(in, line)) {
    if (line.empty() || line[0] == '#') continue;
    std::istringstream fields(line);
    std::string code;
    fields >> code;
    const auto syllable = static_cast<char32_t>(std::stoul(code, nullptr, 16));
    std::u32string nfd;
    while (fields >> code) nfd.push_back(static_cast<char32_t>(std::stoul(code, nullptr, 16)));
    const auto b = *hangul::decompose(syllable);
    std::u32string ours{static_cast<char32_t>(0x1100 + b.cho), static_cast<char32_t>(0x1161 + b.jung)};
    if (b.jong > 0) ours.push_back(static_cast<char32_t>(0x11A7 + b.jong));
    ++checked;
    if (ours == nfd) ++agreed;
  }
  c.expect(checked == 1000, "oracle fixture has " + std::to_string(checked) + " rows");
  c.expect(agreed == checked, "NFD oracle agreement " + std::to_string(agreed) + "/" + std::to_string(checked));
  c.detail = std::to_string(trips) + " syllables, " + std::to_string(agreed) + "/" + std::to_string(checked) +
             " NFD matches";
}

void worked_examples(Check& c) {
  const SubcharTokenizer tok;
  const auto seq = tok.tokenize(U"대한민국", Scheme::Jamo);
  auto with_role = [&](Role role) {
    std::u32string out;
    for (std::size_t i = 0; i < seq.size(); ++i) {
      if (seq.roles[i] == role) out.push_back(seq.symbols[i]);
    }
    return out;
  };
  c.expect(with_role(Role::Initial) == U"ㄷㅎㅁㄱ", "initials");
  c.expect(with_role(Role::Vowel) == U"ㅐㅏㅣㅜ", "vowels");
  c.expect(with_role(Role::Final) == U"▃ㄴㄴㄱ", "finals");
  const auto chupda = tok.tokenize(U"춥다", Scheme::Jamo);
  c.expect(std::u32string(chupda.symbols.begin(), chupda.symbols.end()) == U"ㅊㅜㅂㄷㅏ▃", "춥다 jamo");
  c.expect(tok.table().consonant(U'ㅉ') == U"ㅅ-ㅅ-", "BTS ㅉ");
  c.expect(tok.table().vowel(U'ㅙ') == U"·ㅡㅣ·ㅣ", "BTS ㅙ");
  c.detail = "대한민국 I/V/F, 춥다, ㅉ, ㅙ";
}

std::vector<orc::AlignedChar> align_file(const std::string& relative) {
  std::ifstream in(test::source_path(relative));
  std::vector<orc::AlignedChar> out;
  for (const auto& r : orc::parse_corpus_jsonl(in)) {
    const auto chars = orc::align(r.surface, r.lemma_units);
    out.insert(out.end(), chars.begin(), chars.end());
  }
  return out;
}

void oracle_equivalence(Check& c) {
  using orc::ActionTag;
  using orc::Bio;
  const auto haetda = orc::align(U"했다", {U"하", U"았", U"다"});
  c.expect(haetda.size() == 2 &&
               haetda[0].actions == std::vector<ActionTag>{ActionTag::mod(Bio::B, U"하"), ActionTag::mod(Bio::I, U"았")} &&
               haetda[1].actions == std::vector<ActionTag>{ActionTag::keep(Bio::B)},
           "했다 alignment");

  const auto table = orc::parse_action_text(test::slurp(test::source_path("tests/fixtures/table7_actions.tsv")), " | ");
  c.expect(!table.empty() && table[0].surface == U'런' &&
               table[0].actions == std::vector<ActionTag>{ActionTag::mod(Bio::B, U"럽"), ActionTag::mod(Bio::I, U"ㄴ")},
           "런 table row");
  c.expect(orc::classify_mod(U'런', {U"럽", U"ㄴ"}) == orc::ModGranularity::Subcharacter, "런 granularity");
  c.expect(orc::classify_mod(U'하', {U"한"}) == orc::ModGranularity::Subcharacter, "하→한 subcharacter");
  c.expect(orc::classify_mod(U'이', {U"라"}) == orc::ModGranularity::Character, "이→라 character");
  c.expect(orc::classify_mod(U'라', {U"이"}) == orc::ModGranularity::Character, "라→이 character");

  const auto synthetic = align_file("data/oracle_synthetic.jsonl");
  const auto labels =
      orc::parse_action_text(test::slurp(test::source_path("tests/fixtures/oracle_synthetic_actions.tsv")));
  c.expect(synthetic == labels, "synthetic alignment differs from the hand labels");
  const auto counts =
      nlohmann::json::parse(test::slurp(test::source_path("tests/fixtures/oracle_synthetic_counts.json")));
  const auto stats = orc::corpus_stats(synthetic);
  const auto sub = counts["mod_subcharacter"].get<std::size_t>();
  const auto chr = counts["mod_character"].get<std::size_t>();
  c.expect(stats.hangul_chars() == counts["hangul_characters"].get<std::size_t>() &&
               stats.keep() == counts["keep"].get<std::size_t>() && stats.mod() == counts["mod"].get<std::size_t>() &&
               stats.noop() == counts["noop"].get<std::size_t>() && stats.mod_subcharacter() == sub &&
               stats.mod_character() == chr,
           "synthetic counters differ from the hand count");
  const double expected_fraction = static_cast<double>(sub) / static_cast<double>(sub + chr);
  c.expect(stats.subcharacter_fraction() == expected_fraction, "subcharacter fraction not exact");
  c.expect(stats.character_fraction() == static_cast<double>(chr) / static_cast<double>(sub + chr),
           "character fraction not exact");

  const auto natural = orc::corpus_stats(align_file("data/oracle_naturalistic.jsonl"));
  c.expect(natural.mod_subcharacter() > natural.mod_character(), "naturalistic subcharacter MOD is not a majority");
  c.detail = "synthetic sub fraction " + fmt(*stats.subcharacter_fraction(), 4) + ", naturalistic " +
             fmt(natural.subcharacter_fraction().value_or(0.0), 4);
}

void shape_laws(Check& c) {
  const auto vocab = SubwordVocab::train({U"대한 민국 학교 가나다 abc"}, 40, VocabMode::BpeLite);
  Rng rng(404);
  std::vector<std::u32string> texts;
  for (int i = 0; i < 100; ++i) texts.push_back(test::random_mixed_text(rng, 12));
  std::size_t checked = 0;
  for (Scheme scheme : kAllSchemes) {
    for (bool cls : {false, true}) {
      ScriptConfig config;
      config.scheme = scheme;
      config.cls_bypass = cls;
      const auto model = ScriptModel::create(config, vocab, 1);
      const std::size_t w = slot_widths(scheme).total();
      const auto cls_row = model.params().subchar_embed.row(SubcharVocab::kCls);
      for (const auto& text : texts) {
        ForwardTrace t;
        const Tensor out = model.forward(text, &t);
        const std::size_t units = t.units.ids.size();
        bool ok = t.seq.size() == w * text.size() && t.h_c.rows() == t.seq.size() / w &&
                  t.h_c.rows() == text.size() && out.cols() == config.embed_dim &&
                  out.rows() == units + (cls ? 1 : 0);
        if (cls) {
          for (std::size_t j = 0; j < config.embed_dim; ++j) ok = ok && out.at(0, j) == cls_row[j];
        }
        c.expect(ok, "shape law broken for '" + utf8::encode(text) + "' in " + to_string(scheme));
        ++checked;
      }
    }
  }
  c.detail = std::to_string(checked) + " forwards over 4 schemes";
}

struct OpCase {
  std::string name;
  std::function<double()> run;
};

double op_error(std::uint64_t seed, const std::string& op) {
  Rng rng(seed);
  ParamGroup group;
  Tensor a = random_tensor({3, 4}, rng), b = random_tensor({4, 3}, rng), s = random_tensor({3, 4}, rng);
  GruParams gru = GruParams::init(3, rng);
  Conv2x1Params conv = Conv2x1Params::init(3, rng);
  CrossAttentionParams cross = CrossAttentionParams::init(4, 2, rng);
  Tensor x3 = random_tensor({4, 3}, rng), stack = random_tensor({2, 4, 3}, rng), kv = random_tensor({5, 4}, rng);
  std::function<Tensor()> forward;
  std::function<void(const Tensor&, const Tensor&)> backward;
  auto add_grad = [](Tensor& t, const Tensor& d) {
    auto g = t.grad();
    for (std::size_t i = 0; i < d.size(); ++i) g[i] += d[i];
  };
  if (op == "matmul") {
    group.add("a", a);
    group.add("b", b);
    forward = [&] { return ops::matmul(a, b); };
    backward = [&](const Tensor&, const Tensor& d) { ops::matmul_backward(a, b, d); };
  } else if (op == "add") {
    group.add("a", a);
    group.add("s", s);
    forward = [&] { return ops::add(a, s); };
    backward = [&](const Tensor&, const Tensor& d) { ops::add_backward(a, s, d); };
  } else if (op == "sigmoid") {
    group.add("a", a);
    forward = [&] { return ops::sigmoid(a); };
    backward = [&](const Tensor& y, const Tensor& d) { ops::sigmoid_backward(a, y, d); };
  } else if (op == "tanh") {
    group.add("a", a);
    forward = [&] { return ops::tanh(a); };
    backward = [&](const Tensor& y, const Tensor& d) { ops::tanh_backward(a, y, d); };
  } else if (op == "softmax") {
    group.add("a", a);
    forward = [&] { return ops::softmax(a, 1); };
    backward = [&](const Tensor& y, const Tensor& d) { ops::softmax_backward(a, y, d, 1); };
  } else if (op == "concat") {
    group.add("a", a);
    group.add("s", s);
    forward = [&] { return ops::concat({&a, &s}, 1); };
    backward = [&](const Tensor&, const Tensor& d) { ops::concat_backward({&a, &s}, d, 1); };
  } else if (op == "slice") {
    group.add("a", a);
    forward = [&] { return ops::slice(a, 1, 1, 3); };
    backward = [&](const Tensor&, const Tensor& d) { ops::slice_backward(a, d, 1, 1); };
  } else if (op == "mean") {
    group.add("a", a);
    forward = [&] { return ops::mean(a, 0); };
    backward = [&](const Tensor&, const Tensor& d) { ops::mean_backward(a, d, 0); };
  } else if (op == "gru") {
    gru.register_params(group, "gru");
    group.add("x", x3);
    auto cache = std::make_shared<GruCache>();
    forward = [&, cache] { return gru_forward(gru, x3, cache.get()); };
    backward = [&, cache](const Tensor&, const Tensor& d) { add_grad(x3, gru_backward(gru, *cache, d)); };
  } else if (op == "conv2x1") {
    conv.register_params(group, "conv");
    group.add("x", stack);
    forward = [&] { return conv2x1_forward(conv, stack); };
    backward = [&](const Tensor&, const Tensor& d) { add_grad(stack, conv2x1_backward(conv, stack, d)); };
  } else if (op == "cross-attention") {
    cross.register_params(group, "cross");
    group.add("q", s);
    group.add("kv", kv);
    auto cache = std::make_shared<CrossAttentionCache>();
    forward = [&, cache] { return cross_attention_forward(cross, s, kv, true, cache.get()); };
    backward = [&, cache](const Tensor&, const Tensor& d) {
      auto [dq, dkv] = cross_attention_backward(cross, *cache, d);
      add_grad(s, dq);
      add_grad(kv, dkv);
    };
  }
  const Tensor weights = random_tensor(forward().shape(), rng);
  auto loss = [&](bool with_grad) {
    const Tensor y = forward();
    double total = 0.0;
    for (std::size_t i = 0; i < y.size(); ++i) total += weights[i] * y[i];
    if (with_grad) backward(y, weights);
    return total;
  };
  GradCheckOptions opts;
  opts.eps = kOpEps;
  opts.tol = kOpRelTol;
  return grad_check(loss, group, opts).max_rel_error;
}

void gradient_fidelity(Check& c) {
  double worst_pipeline = 0.0;
  std::size_t runs = 0;
  for (Fusion fusion : kAllFusions) {
    for (Scheme scheme : kAllSchemes) {
      for (std::uint64_t seed = 1; seed <= 3; ++seed) {
        ScriptConfig config;
        config.embed_dim = 4;
        config.scheme = scheme;
        config.fusion = fusion;
        const std::u32string text = U"하다";
        const auto vocab = SubwordVocab::train({text}, SubwordVocab::kSpecialCount + 2, VocabMode::CharList);
        auto model = ScriptModel::create(config, vocab, seed);
        Rng rng(seed + 100);
        const Tensor weights = random_tensor(model.forward(text).shape(), rng);
        auto loss = [&](bool with_grad) {
          ForwardTrace t;
          const Tensor y = model.forward(text, &t);
          double total = 0.0;
          for (std::size_t i = 0; i < y.size(); ++i) total += weights[i] * y[i];
          if (with_grad) model.backward(t, weights);
          return total;
        };
        GradCheckOptions opts;
        opts.tol = kPipelineRelTol;
        const auto report = grad_check(loss, model.param_group(), opts);
        worst_pipeline = std::max(worst_pipeline, report.max_rel_error);
        c.expect(report.max_rel_error < kPipelineRelTol, std::string(to_string(fusion)) + "/" + to_string(scheme) +
                                                              " seed " + std::to_string(seed) + " rel " +
                                                              fmt(report.max_rel_error, 8));
        ++runs;
      }
    }
  }
  double worst_op = 0.0;
  for (const std::string op : {"matmul", "add", "sigmoid", "tanh", "softmax", "concat", "slice", "mean", "gru",
                                "conv2x1", "cross-attention"}) {
    for (std::uint64_t seed = 1; seed <= 3; ++seed) {
      const double err = op_error(seed, op);
      worst_op = std::max(worst_op, err);
      c.expect(err < kOpRelTol, op + " seed " + std::to_string(seed) + " rel " + fmt(err, 10));
    }
  }
  char buf[160];
  std::snprintf(buf, sizeof buf, "%zu pipeline checks, worst %.2e (< %.0e); ops worst %.2e (< %.0e)", runs,
                worst_pipeline, kPipelineRelTol, worst_op, kOpRelTol);
  c.detail = buf;
}

SubwordVocab probe_vocab(const PairDataset& pairs, const std::vector<WordSet>& sets) {
  std::u32string corpus;
  for (const auto& p : pairs) corpus += p.form_a + U" " + p.form_b + U" ";
  for (const auto& s : sets) {
    for (const auto& w : s.words) corpus += w + U" ";
  }
  return SubwordVocab::train({corpus}, 1000, VocabMode::CharList);
}

struct ProbeOutcome {
  double untrained = 0.0;
  double trained = 0.0;
  double random_mean = 0.0;
  std::vector<CohesionRow> cohesion;
};

ProbeOutcome probe_run(const ScriptConfig& config, const PairDataset& pairs, const std::vector<WordSet>& sets) {
  TrainConfig tc;  // seed 13, 40 epochs, lr 0.01, batch 10, margin 0.2
  auto model = ScriptModel::create(config, probe_vocab(pairs, sets), tc.seed);
  ProbeOutcome o;
  o.untrained = pair_similarity(model, pairs).mean_fused;
  const auto result = train(model, pairs, tc);
  o.trained = pair_similarity(model, pairs).mean_fused;
  o.random_mean = result.log.back().mean_random_cos;
  o.cohesion = cohesion_report(model, sets);
  return o;
}

void probe_direction(Check& c) {
  const auto pairs = load_pairs(test::source_path("data/verb_past_pairs.tsv"));
  const auto sets = parse_word_sets(test::slurp(test::source_path("data/cohesion_sets.tsv")));
  c.expect(pairs.size() == 50, "pair fixture has " + std::to_string(pairs.size()) + " pairs");

  ScriptConfig config;
  config.fusion = Fusion::CrossAttention;
  config.residual_fusion = true;
  const auto o = probe_run(config, pairs, sets);
  c.expect(o.trained >= o.untrained + kProbeGain,
           "trained " + fmt(o.trained) + " does not exceed untrained " + fmt(o.untrained) + " by 0.05");
  c.expect(o.trained >= o.random_mean + kProbeGain,
           "trained " + fmt(o.trained) + " does not exceed random-pair mean " + fmt(o.random_mean) + " by 0.05");
  std::size_t tighter = 0;
  for (const auto& row : o.cohesion) {
    const bool ok = row.fused.dispersion < row.raw.dispersion;
    tighter += ok;
    c.expect(ok, row.name + ": fused dispersion " + fmt(row.fused.dispersion) + " >= raw " +
                     fmt(row.raw.dispersion));
  }
  c.detail = "residual cross-attention: pair cos " + fmt(o.untrained) + " -> " + fmt(o.trained) + ", random " +
             fmt(o.random_mean) + ", fused tighter on " + std::to_string(tighter) + "/" +
             std::to_string(o.cohesion.size()) + " sets";

  ScriptConfig plain;
  plain.fusion = Fusion::CrossAttention;
  const auto p = probe_run(plain, pairs, sets);
  std::printf("INFO criterion 6: plain cross-attention (ungraded): pair cos %s -> %s, random %s\n",
              fmt(p.untrained).c_str(), fmt(p.trained).c_str(), fmt(p.random_mean).c_str());
}

void ablation_plumbing(Check& c) {
  const auto pairs = parse_pairs(
      "먹다\t먹었다\tpast\n가다\t갔다\tpast\n보다\t봤다\tpast\n하다\t했다\tpast\n오다\t왔다\tpast\n");
  const auto vocab = SubwordVocab::train({U"먹다 먹었다 가다 갔다 보다 봤다 하다 했다 오다 왔다"}, 100,
                                         VocabMode::CharList);
  std::set<std::string> checkpoints;
  std::size_t runs = 0, neutral = 0;
  for (Scheme scheme : kAllSchemes) {
    for (Compression comp : kAllCompressions) {
      for (Fusion fusion : kAllFusions) {
        const std::string name =
            std::string(to_string(scheme)) + "/" + to_string(comp) + "/" + to_string(fusion);
        ScriptConfig config;
        config.embed_dim = 8;
        config.scheme = scheme;
        config.compression = comp;
        config.fusion = fusion;
        auto model = ScriptModel::create(config, vocab, 7);
        TrainConfig tc;
        tc.epochs = 2;
        tc.batch_size = 2;
        tc.random_pairs = 5;
        const auto result = train(model, pairs, tc);
        c.expect(std::isfinite(result.log.back().loss), name + ": non-finite loss");
        checkpoints.insert(model.checkpoint(7).serialize());
        ++runs;

        if (fusion == Fusion::Summation) {
          model.zero_script_parameters();
          ForwardTrace t;
          const Tensor out = model.forward(U"먹었다 갔다", &t);
          const bool same = out.same_values(t.e_s);
          neutral += same;
          c.expect(same, name + ": zeroed summation differs from e_S");
        }
      }
    }
  }
  c.expect(checkpoints.size() == runs, std::to_string(checkpoints.size()) + " distinct checkpoints for " +
                                           std::to_string(runs) + " runs");
  c.detail = std::to_string(runs) + " configurations, " + std::to_string(checkpoints.size()) +
             " distinct checkpoints, summation neutral in " + std::to_string(neutral) + "/12";
}

void cli_determinism(Check& c) {
  const auto dir = test::scratch_dir("acceptance_cli");
  const auto p = [&](const std::string& name) { return (dir / name).string(); };
  const auto src = [](const std::string& rel) { return test::source_path(rel).string(); };
  io::write_atomic(p("corpus.txt"), "대한민국 학교\n먹었다 갔다 했다\nHello 한글!\n");
  io::write_atomic(p("words.txt"), "먹다\n먹었다\n가다\n갔다\n하다\n했다\n");

  struct Run {
    std::vector<std::string> args;
    std::vector<std::string> files;
  };
  const std::vector<Run> runs = {
      {{"decompose", "--scheme", "bts", "대한민국"}, {}},
      {{"tokenize", "--scheme", "cji", "--in", p("corpus.txt")}, {}},
      {{"vocab-train", "--in", p("corpus.txt"), "--mode", "bpe-lite", "--size", "40", "--out", p("vocab.tsv")},
       {"vocab.tsv"}},
      {{"encode", "--vocab", p("vocab.tsv"), "--in", p("corpus.txt"), "--cls"}, {}},
      {{"oracle-align", "--in", src("data/oracle_naturalistic.jsonl"), "--classify"}, {}},
      {{"oracle-stats", "--in", src("data/oracle_synthetic.jsonl"), "--csv", p("stats.csv")}, {"stats.csv"}},
      {{"gradcheck", "--seed", "3", "--scheme", "stroke"}, {}},
      {{"train", "--pairs", src("data/verb_past_pairs.tsv"), "--vocab", p("vocab.tsv"), "--out", p("m.ckpt"),
        "--epochs", "2", "--embed-dim", "8", "--seed", "7", "--log", p("log.csv")},
       {"m.ckpt", "log.csv"}},
      {{"embed", "--model", p("m.ckpt"), "--in", p("corpus.txt")}, {}},
      {{"probe-pairs", "--model", p("m.ckpt"), "--pairs", src("data/verb_past_pairs.tsv")}, {}},
      {{"probe-pca", "--model", p("m.ckpt"), "--word-file", p("words.txt"), "--k", "2", "--seed", "3"}, {}},
      {{"probe-cohesion", "--model", p("m.ckpt"), "--sets", src("data/cohesion_sets.tsv")}, {}},
  };
  std::size_t identical = 0;
  for (const auto& run : runs) {
    std::string first[2];
    std::vector<std::string> first_files, second_files;
    for (int attempt = 0; attempt < 2; ++attempt) {
      const auto r = test::run_cli(run.args, dir);
      c.expect(r.exit_code == 0, run.args[0] + " exited " + std::to_string(r.exit_code) + ": " + r.err);
      first[attempt] = r.out;
      auto& files = attempt == 0 ? first_files : second_files;
      for (const auto& f : run.files) files.push_back(test::slurp(dir / f));
    }
    const bool same = first[0] == first[1] && first_files == second_files && !(first[0].empty() && run.files.empty());
    identical += same;
    c.expect(same, run.args[0] + " output differs between runs");
  }
  c.detail = std::to_string(identical) + "/" + std::to_string(runs.size()) + " subcommands byte-identical";
}

}  // namespace

int main() {
  int failed = 0;
  failed += run_criterion(1, "Hangul round trip and Unicode oracle", kC1Seconds, hangul_round_trip);
  failed += run_criterion(2, "worked examples", 0.0, worked_examples);
  failed += run_criterion(3, "oracle equivalence", 0.0, oracle_equivalence);
  failed += run_criterion(4, "shape laws", kC4Seconds, shape_laws);
  failed += run_criterion(5, "gradient fidelity", kC5Seconds, gradient_fidelity);
  failed += run_criterion(6, "probe direction", kC6Seconds, probe_direction);
  failed += run_criterion(7, "ablation plumbing", 0.0, ablation_plumbing);
  failed += run_criterion(8, "CLI determinism", 0.0, cli_determinism);
  std::printf("%d of 8 criteria passed\n", 8 - failed);
  return failed == 0 ? 0 : 1;
}
