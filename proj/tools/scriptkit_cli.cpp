// scriptkit command line interface.

#include <CLI11.hpp>
#include <json.hpp>

#include <cstdint>
#include <fstream>
#include <iostream>
#include <map>
#include <optional>
#include <sstream>
#include <string>
#include <vector>

#include "scriptkit/checkpoint.hpp"
#include "scriptkit/config.hpp"
#include "scriptkit/error.hpp"
#include "scriptkit/gradcheck.hpp"
#include "scriptkit/hangul.hpp"
#include "scriptkit/io.hpp"
#include "scriptkit/model.hpp"
#include "scriptkit/oracle.hpp"
#include "scriptkit/probe.hpp"
#include "scriptkit/subchar.hpp"
#include "scriptkit/subword.hpp"
#include "scriptkit/trainer.hpp"
#include "scriptkit/utf8.hpp"

namespace sk = scriptkit;
using json = nlohmann::ordered_json;

namespace {

// ---------------------------------------------------------------------------
// Shared plumbing

void emit(const std::string& out_path, const std::string& content) {
  if (out_path.empty()) {
    std::cout << content;
    std::cout.flush();
  } else {
    sk::io::write_atomic(out_path, content);
  }
}

/// Positional text, or every line of --in.
std::vector<std::string> input_lines(const std::string& text, const std::string& in_path) {
  if (!in_path.empty()) {
    auto lines = sk::io::read_lines(in_path);
    std::erase_if(lines, [](const std::string& l) { return l.empty(); });
    return lines;
  }
  if (text.empty()) throw sk::ConfigError("no input: give TEXT or --in FILE");
  return {text};
}

sk::Scheme scheme_arg(const std::string& name) {
  auto s = sk::parse_scheme(name);
  if (!s) throw sk::ConfigError("unknown scheme '" + name + "' (jamo, stroke, cji, bts)");
  return *s;
}

std::string format_real(double v) { return sk::format_real(v); }

/// Flags that mirror config-file keys. Values stay empty unless given so
/// that precedence can be resolved as flags > file > defaults.
struct SettingFlags {
  std::string config_path;
  std::map<std::string, std::string> values;
  bool verbose = false;

  void add(CLI::App* app, const std::string& flag, const std::string& key, const std::string& help) {
    app->add_option_function<std::string>(flag, [this, key](const std::string& v) { values[key] = v; }, help);
  }

  void add_config(CLI::App* app) {
    app->add_option("--config", config_path, "Config file of `key = value` lines")->check(CLI::ExistingFile);
    app->add_flag("--verbose", verbose, "Echo the effective configuration to stderr");
  }

  void add_model(CLI::App* app) {
    add(app, "--scheme", "scheme", "Subcharacter scheme: jamo, stroke, cji, bts");
    add(app, "--embed-dim", "embed_dim", "Embedding width D");
    add(app, "--fusion", "fusion", "Fusion: cross-attention, summation, concatenation");
    add(app, "--compression", "compression", "Compression: principles, linear, attention");
    add(app, "--granularity", "granularity", "Output units: subword, character, word, external");
    add(app, "--residual-fusion", "residual_fusion", "Residual connection in cross-attention (true/false)");
    add(app, "--heads", "heads", "Cross-attention heads");
    add(app, "--cls-bypass", "cls_bypass", "Prepend CLS and pass it through unchanged (true/false)");
  }

  void add_train(CLI::App* app) {
    add(app, "--objective", "objective", "contrastive-pairs or tag-classification");
    add(app, "--epochs", "epochs", "Training epochs");
    add(app, "--lr", "lr", "Peak learning rate");
    add(app, "--min-lr", "min_lr", "Final learning rate of the cosine schedule");
    add(app, "--batch-size", "batch_size", "Pairs per optimizer step");
    add(app, "--weight-decay", "weight_decay", "Decoupled weight decay");
    add(app, "--margin", "margin", "Cosine margin for unrelated pairs");
    add(app, "--freeze-subword", "freeze_subword", "Keep the subword table fixed (true/false)");
    add(app, "--random-pairs", "random_pairs", "Unrelated pairs in the metric log");
  }

  /// Applies file settings, then flags. Unknown keys are config errors.
  void resolve(sk::ScriptConfig* model, sk::TrainConfig* trainer) const {
    std::vector<sk::Setting> settings;
    if (!config_path.empty()) settings = sk::parse_settings(sk::io::read_file(config_path));
    for (const auto& [key, value] : values) settings.push_back({key, value, 0});
    for (const auto& s : settings) {
      const bool known = (model && model->set(s.key, s.value)) || (trainer && trainer->set(s.key, s.value));
      if (!known) {
        throw sk::ConfigError(s.line ? config_path + ":" + std::to_string(s.line) + ": unknown key '" + s.key + "'"
                                     : "unknown setting '" + s.key + "'");
      }
    }
    if (model) model->validate();
    if (trainer) trainer->validate();
    if (verbose) {
      std::cerr << "# effective configuration\n";
      if (model) std::cerr << model->to_text();
      if (trainer) std::cerr << trainer->to_text();
    }
  }
};

sk::BoundaryMap spans_from_json(const json& spans) {
  sk::BoundaryMap map;
  for (const auto& s : spans) {
    if (!s.is_array() || s.size() != 2) throw sk::ConfigError("spans must be [begin, end] pairs");
    map.ranges.push_back({s[0].get<std::size_t>(), s[1].get<std::size_t>()});
  }
  return map;
}

json tokens_json(const std::string& text, const sk::SubcharSequence& seq) {
  json j;
  j["text"] = text;
  j["scheme"] = sk::to_string(seq.scheme);
  j["ids"] = seq.ids;
  std::string roles;
  json symbols = json::array();
  for (std::size_t i = 0; i < seq.size(); ++i) {
    roles.push_back(sk::role_label(seq.roles[i]));
    symbols.push_back(sk::utf8::encode(seq.symbols[i]));
  }
  j["roles"] = roles;
  j["symbols"] = symbols;
  return j;
}

sk::SubcharSequence tokens_from_json(const json& j) {
  sk::SubcharSequence seq;
  seq.scheme = scheme_arg(j.at("scheme").get<std::string>());
  seq.widths = sk::slot_widths(seq.scheme);
  seq.ids = j.at("ids").get<std::vector<int>>();
  const auto roles = j.at("roles").get<std::string>();
  const auto& symbols = j.at("symbols");
  if (roles.size() != seq.ids.size() || symbols.size() != seq.ids.size()) {
    throw sk::MalformedSequenceError("ids, roles and symbols differ in length");
  }
  for (std::size_t i = 0; i < roles.size(); ++i) {
    switch (roles[i]) {
      case 'I':
        seq.roles.push_back(sk::Role::Initial);
        break;
      case 'V':
        seq.roles.push_back(sk::Role::Vowel);
        break;
      case 'F':
        seq.roles.push_back(sk::Role::Final);
        break;
      case 'O':
        seq.roles.push_back(sk::Role::Other);
        break;
      default:
        throw sk::MalformedSequenceError(std::string("unknown role label '") + roles[i] + "'");
    }
    const auto sym = sk::utf8::decode(symbols[i].get<std::string>());
    if (sym.size() != 1) throw sk::MalformedSequenceError("each symbol must be one character");
    seq.symbols.push_back(sym[0]);
  }
  if (seq.size() % seq.width() != 0) throw sk::MalformedSequenceError("token count is not a multiple of the width");
  return seq;
}

std::vector<std::u32string> split_units(const std::string& list) {
  std::vector<std::u32string> units;
  std::stringstream in(list);
  std::string unit;
  while (std::getline(in, unit, ',')) {
    if (!unit.empty()) units.push_back(sk::utf8::decode(unit));
  }
  return units;
}

sk::ScriptModel load_model(const std::string& path) { return sk::ScriptModel::from_checkpoint(sk::Checkpoint::load(path)); }

// ---------------------------------------------------------------------------
// Subcommands

struct DecomposeCmd {
  std::string text, scheme = "jamo", compose;
  bool blocks = false;

  void setup(CLI::App& app) {
    auto* c = app.add_subcommand("decompose", "Split Hangul text into role-labelled subcharacters");
    c->add_option("text", text, "Text to decompose");
    c->add_option("--scheme", scheme, "jamo, stroke, cji or bts")->capture_default_str();
    c->add_flag("--blocks", blocks, "Print cho/jung/jong indices and vowel class per character");
    c->add_option("--compose", compose, "Compose one syllable from `cho,jung,jong` indices and print it");
    c->callback([this] { run(); });
  }

  void run() const {
    if (!compose.empty()) {
      int idx[3];
      char sep1 = 0, sep2 = 0;
      std::istringstream in(compose);
      if (!(in >> idx[0] >> sep1 >> idx[1] >> sep2 >> idx[2]) || sep1 != ',' || sep2 != ',' || !in.eof()) {
        throw sk::ConfigError("--compose expects cho,jung,jong");
      }
      std::cout << sk::utf8::encode(sk::hangul::compose({idx[0], idx[1], idx[2]})) << '\n';
      return;
    }
    if (text.empty()) throw sk::ConfigError("no text given");
    const auto chars = sk::utf8::decode(text);
    std::string out;
    if (blocks) {
      out += "char\tcho\tjung\tjong\tvowel_class\n";
      for (char32_t ch : chars) {
        out += sk::utf8::encode(ch);
        if (auto b = sk::hangul::decompose(ch)) {
          out += '\t' + std::to_string(b->cho) + '\t' + std::to_string(b->jung) + '\t' + std::to_string(b->jong) +
                 '\t' + sk::hangul::to_string(sk::hangul::classify_vowel(b->jung)) + '\n';
        } else {
          out += "\t-\t-\t-\t-\n";
        }
      }
    } else {
      static const sk::SubcharTokenizer tokenizer;
      const auto seq = tokenizer.tokenize(std::u32string_view(chars), scheme_arg(scheme));
      for (std::size_t i = 0; i < seq.size(); ++i) {
        const std::string sym = seq.symbols[i] == sk::kPadSymbol ? "[PAD]" : sk::utf8::encode(seq.symbols[i]);
        out += sym + '\t' + sk::role_label(seq.roles[i]) + '\n';
      }
    }
    std::cout << out;
  }
};

struct TokenizeCmd {
  std::string text, in, out, scheme = "jamo";
  bool decode = false;

  void setup(CLI::App& app) {
    auto* c = app.add_subcommand(
        "tokenize",
        "Fixed-width subcharacter token ids (JSON lines with ids, roles, symbols); --decode inverts them");
    c->add_option("text", text, "Text to tokenize");
    c->add_option("--in", in, "Text file (one input per line), or token JSON lines with --decode")
        ->check(CLI::ExistingFile);
    c->add_option("--out", out, "Output file (default stdout)");
    c->add_option("--scheme", scheme, "jamo, stroke, cji or bts")->capture_default_str();
    c->add_flag("--decode", decode, "Read token JSON lines and print the text they encode");
    c->callback([this] { run(); });
  }

  void run() const {
    static const sk::SubcharTokenizer tokenizer;
    std::string result;
    for (const auto& line : input_lines(text, in)) {
      if (decode) {
        json j;
        try {
          j = json::parse(line);
        } catch (const json::exception& e) {
          throw sk::Error(std::string("bad token JSON: ") + e.what());
        }
        result += sk::utf8::encode(tokenizer.detokenize(tokens_from_json(j))) + '\n';
      } else {
        result += tokens_json(line, tokenizer.tokenize(std::string_view(line), scheme_arg(scheme))).dump() + '\n';
      }
    }
    emit(out, result);
  }
};

struct VocabTrainCmd {
  std::string in, out, mode = "bpe-lite";
  std::size_t size = 1000;
  bool cls = false;

  void setup(CLI::App& app) {
    auto* c = app.add_subcommand("vocab-train", "Train a subword vocabulary (TSV: header, then token TAB id)");
    c->add_option("--in", in, "Training corpus, one text per line")->required()->check(CLI::ExistingFile);
    c->add_option("--out", out, "Vocabulary file (default stdout)");
    c->add_option("--size", size, "Target vocabulary size")->capture_default_str();
    c->add_option("--mode", mode, "bpe-lite, wordlist or charlist")->capture_default_str();
    c->add_flag("--cls", cls, "Mark the vocabulary as adding CLS when encoding");
    c->callback([this] { run(); });
  }

  void run() const {
    auto m = sk::parse_vocab_mode(mode);
    if (!m) throw sk::ConfigError("unknown vocabulary mode '" + mode + "'");
    std::vector<std::u32string> corpus;
    for (const auto& line : sk::io::read_lines(in)) corpus.push_back(sk::utf8::decode(line));
    emit(out, sk::SubwordVocab::train(corpus, size, *m, cls).to_text());
  }
};

struct EncodeCmd {
  std::string text, in, out, vocab;
  bool cls = false;

  void setup(CLI::App& app) {
    auto* c = app.add_subcommand("encode", "Greedy longest-match subword encoding with character spans (JSON lines)");
    c->add_option("text", text, "Text to encode");
    c->add_option("--in", in, "Text file, one input per line")->check(CLI::ExistingFile);
    c->add_option("--out", out, "Output file (default stdout)");
    c->add_option("--vocab", vocab, "Vocabulary from vocab-train")->required()->check(CLI::ExistingFile);
    c->add_flag("--cls", cls, "Prepend CLS (owns an empty span)");
    c->callback([this] { run(); });
  }

  void run() const {
    const auto v = sk::SubwordVocab::load(vocab);
    std::string result;
    for (const auto& line : input_lines(text, in)) {
      const auto chars = sk::utf8::decode(line);
      const auto enc = sk::encode(chars, v, cls || v.add_cls());
      json j;
      j["text"] = line;
      j["ids"] = enc.ids;
      j["tokens"] = json::array();
      j["spans"] = json::array();
      for (std::size_t i = 0; i < enc.ids.size(); ++i) {
        j["tokens"].push_back(sk::utf8::encode(v.token(enc.ids[i])));
        j["spans"].push_back({enc.boundary.ranges[i].begin, enc.boundary.ranges[i].end});
      }
      result += j.dump() + '\n';
    }
    emit(out, result);
  }
};

struct OracleAlignCmd {
  std::string surface, lemma, in, out;
  bool classify = false;

  void setup(CLI::App& app) {
    auto* c = app.add_subcommand("oracle-align",
                                 "KEEP/MOD/NOOP action tags aligning a surface form to its lemma units");
    c->add_option("--surface", surface, "Surface form, e.g. 했다");
    c->add_option("--lemma", lemma, "Comma separated lemma units, e.g. 하,았,다");
    c->add_option("--in", in, "JSON lines {\"surface\": ..., \"lemma_units\": [...]}")->check(CLI::ExistingFile);
    c->add_option("--out", out, "Action file (default stdout): char TAB action;action...");
    c->add_flag("--classify", classify, "Add a column with the primary kind and MOD granularity");
    c->callback([this] { run(); });
  }

  void run() const {
    std::vector<sk::oracle::CorpusRecord> records;
    if (!in.empty()) {
      std::ifstream f(in);
      records = sk::oracle::parse_corpus_jsonl(f);
    } else {
      if (surface.empty() || lemma.empty()) throw sk::ConfigError("give --surface and --lemma, or --in");
      records.push_back({sk::utf8::decode(surface), split_units(lemma)});
    }
    std::string result;
    for (const auto& rec : records) {
      const auto chars = sk::oracle::align(rec.surface, rec.lemma_units);
      if (!classify) {
        result += sk::oracle::format_actions(chars);
        continue;
      }
      for (const auto& ch : chars) {
        std::string line = sk::oracle::format_actions({ch});
        line.pop_back();
        const auto kind = sk::oracle::primary_kind(ch);
        line += '\t';
        line += sk::oracle::to_string(kind);
        if (kind == sk::oracle::ActionKind::Mod) {
          std::string level = "character";
          if (sk::hangul::is_syllable(ch.surface)) {
            level = sk::oracle::to_string(
                sk::oracle::classify_mod(ch.surface, sk::oracle::reconstruct_targets(ch.surface, ch.actions)));
          }
          line += '\t' + level;
        }
        result += line + '\n';
      }
    }
    emit(out, result);
  }
};

struct OracleStatsCmd {
  std::string in, actions, json_out, csv_out;
  std::size_t top_k = 10;
  std::size_t partitions = 1;

  void setup(CLI::App& app) {
    auto* c = app.add_subcommand("oracle-stats", "Corpus KEEP/MOD/NOOP counters and MOD granularity fractions");
    auto* src = c->add_option("--in", in, "JSON lines {\"surface\": ..., \"lemma_units\": [...]} to align")
                    ->check(CLI::ExistingFile);
    c->add_option("--actions", actions, "Pre-aligned action file instead of --in")
        ->check(CLI::ExistingFile)
        ->excludes(src);
    c->add_option("--top-k", top_k, "MOD types listed")->capture_default_str();
    c->add_option("--partitions", partitions, "Aggregate in this many slices, then merge")->capture_default_str();
    c->add_option("--json", json_out, "JSON counters file (default stdout)");
    c->add_option("--csv", csv_out, "CSV table of the top MOD types: rank,surface,targets,count,granularity");
    c->callback([this] { run(); });
  }

  void run() const {
    std::vector<sk::oracle::AlignedChar> chars;
    if (!actions.empty()) {
      std::ifstream f(actions);
      chars = sk::oracle::parse_action_file(f);
    } else if (!in.empty()) {
      std::ifstream f(in);
      for (const auto& rec : sk::oracle::parse_corpus_jsonl(f)) {
        const auto aligned = sk::oracle::align(rec.surface, rec.lemma_units);
        chars.insert(chars.end(), aligned.begin(), aligned.end());
      }
    } else {
      throw sk::ConfigError("give --in or --actions");
    }
    if (partitions == 0) throw sk::ConfigError("--partitions must be positive");
    const auto stats = sk::oracle::corpus_stats_partitioned(chars, partitions);
    emit(json_out, stats.to_json(top_k) + '\n');
    if (!csv_out.empty()) sk::io::write_atomic(csv_out, stats.to_csv(top_k));
  }
};

struct GradcheckCmd {
  SettingFlags flags;
  std::string text = "하다";
  std::size_t dim = 4;
  double tol = 1e-4, eps = 1e-6;
  std::uint64_t seed = 1;

  void setup(CLI::App& app) {
    auto* c = app.add_subcommand("gradcheck", "Compare analytic and finite-difference gradients of the pipeline");
    c->add_option("--text", text, "Input text")->capture_default_str();
    c->add_option_function<std::size_t>(
        "--d", [this](std::size_t v) { flags.values["embed_dim"] = std::to_string(v); }, "Embedding width (default 4)");
    c->add_option("--tol", tol, "Maximum relative error")->capture_default_str();
    c->add_option("--eps", eps, "Finite-difference step")->capture_default_str();
    c->add_option("--seed", seed, "Parameter initialization seed")->capture_default_str();
    flags.add_config(c);
    flags.add_model(c);
    c->callback([this] { run(); });
  }

  int run() {
    sk::ScriptConfig config;
    config.embed_dim = dim;
    flags.resolve(&config, nullptr);
    const auto chars = sk::utf8::decode(text);
    auto vocab = sk::SubwordVocab::train({chars}, sk::SubwordVocab::kSpecialCount + chars.size(),
                                         sk::VocabMode::CharList);
    auto model = sk::ScriptModel::create(config, vocab, seed);
    const std::optional<sk::BoundaryMap> external =
        config.granularity == sk::Granularity::External
            ? std::optional<sk::BoundaryMap>(sk::BoundaryMap::characters(chars.size()))
            : std::nullopt;
    const sk::LossFn loss = [&](bool with_grad) {
      sk::ForwardTrace trace;
      const sk::Tensor y = model.forward(std::u32string_view(chars), &trace, external ? &*external : nullptr);
      sk::Tensor dy(y.shape());
      double total = 0.0;
      for (std::size_t i = 0; i < y.size(); ++i) {
        total += y[i] * y[i] / static_cast<double>(y.size());
        dy[i] = 2.0 * y[i] / static_cast<double>(y.size());
      }
      if (with_grad) model.backward(trace, dy);
      return total;
    };
    sk::GradCheckOptions options;
    options.eps = eps;
    options.tol = tol;
    const auto report = sk::grad_check(loss, model.param_group(), options);
    json j;
    j["text"] = text;
    j["scheme"] = sk::to_string(config.scheme);
    j["compression"] = sk::to_string(config.compression);
    j["fusion"] = sk::to_string(config.fusion);
    j["embed_dim"] = config.embed_dim;
    j["coordinates"] = report.coordinates;
    j["max_abs_error"] = report.max_abs_error;
    j["max_rel_error"] = report.max_rel_error;
    j["worst_param"] = report.worst_param;
    j["worst_index"] = report.worst_index;
    j["tol"] = tol;
    j["passed"] = report.passed;
    std::cout << j.dump(2) << '\n';
    if (!report.passed) throw sk::Error("gradient check failed: max relative error " +
                                        format_real(report.max_rel_error) + " >= " + format_real(tol));
    return 0;
  }
};

struct TrainCmd {
  SettingFlags flags;
  std::string pairs, vocab, out, log, init;
  std::optional<std::uint64_t> seed;

  void setup(CLI::App& app) {
    auto* c = app.add_subcommand("train", "Seeded toy training on a pair fixture; writes a checkpoint and metric log");
    c->add_option("--pairs", pairs, "TSV form_a TAB form_b TAB relation")->required()->check(CLI::ExistingFile);
    c->add_option("--vocab", vocab, "Vocabulary from vocab-train")->check(CLI::ExistingFile);
    c->add_option("--init", init, "Start from this checkpoint instead of fresh parameters")
        ->check(CLI::ExistingFile);
    c->add_option("--out", out, "Checkpoint to write")->required();
    c->add_option("--log", log, "Metric CSV (default stdout)");
    c->add_option_function<std::uint64_t>("--seed", [this](std::uint64_t v) { seed = v; },
                                          "Seed for initialization, shuffling and negatives");
    flags.add_config(c);
    flags.add_model(c);
    flags.add_train(c);
    c->callback([this] { run(); });
  }

  void run() {
    sk::ScriptConfig config;
    sk::TrainConfig run_config;
    if (seed) flags.values["seed"] = std::to_string(*seed);
    flags.resolve(&config, &run_config);
    if (config.granularity == sk::Granularity::External) {
      throw sk::ConfigError("training pairs carry no boundary maps; external granularity is not available here");
    }
    const auto data = sk::load_pairs(pairs);
    std::optional<sk::ScriptModel> model;
    if (!init.empty()) {
      model.emplace(load_model(init));
    } else {
      if (vocab.empty()) throw sk::ConfigError("give --vocab or --init");
      model.emplace(sk::ScriptModel::create(config, sk::SubwordVocab::load(vocab), run_config.seed));
    }
    const auto result = sk::train(*model, data, run_config);
    model->checkpoint(run_config.seed).save(out);
    emit(log, sk::metrics_csv(result.log));
  }
};

struct EmbedCmd {
  std::string model_path, text, in, spans, out;

  void setup(CLI::App& app) {
    auto* c = app.add_subcommand("embed", "Export fused embeddings as CSV: token,dim0,...,dimD-1");
    c->add_option("--model", model_path, "Checkpoint")->required()->check(CLI::ExistingFile);
    c->add_option("text", text, "Text to embed");
    c->add_option("--in", in, "Text file, one input per line")->check(CLI::ExistingFile);
    c->add_option("--spans", spans, "JSON lines {\"text\": ..., \"spans\": [[b, e], ...]} for external units")
        ->check(CLI::ExistingFile);
    c->add_option("--out", out, "CSV file (default stdout)");
    c->callback([this] { run(); });
  }

  void run() const {
    const auto model = load_model(model_path);
    std::string result;
    bool header = true;
    if (!spans.empty()) {
      for (const auto& line : sk::io::read_lines(spans)) {
        if (line.empty()) continue;
        json j;
        try {
          j = json::parse(line);
        } catch (const json::exception& e) {
          throw sk::Error(std::string("bad spans JSON: ") + e.what());
        }
        const auto map = spans_from_json(j.at("spans"));
        result += sk::embedding_csv(model, sk::utf8::decode(j.at("text").get<std::string>()), header, &map);
        header = false;
      }
    } else {
      if (model.config().granularity == sk::Granularity::External) {
        throw sk::ConfigError("external granularity needs --spans");
      }
      for (const auto& line : input_lines(text, in)) {
        result += sk::embedding_csv(model, sk::utf8::decode(line), header);
        header = false;
      }
    }
    emit(out, result);
  }
};

struct ProbePairsCmd {
  std::string model_path, pairs, out;

  void setup(CLI::App& app) {
    auto* c = app.add_subcommand("probe-pairs", "Per-pair cosine of raw and fused word vectors, plus means");
    c->add_option("--model", model_path, "Checkpoint")->required()->check(CLI::ExistingFile);
    c->add_option("--pairs", pairs, "TSV form_a TAB form_b TAB relation")->required()->check(CLI::ExistingFile);
    c->add_option("--out", out, "CSV file (default stdout)");
    c->callback([this] { run(); });
  }

  void run() const {
    const auto model = load_model(model_path);
    const auto data = sk::load_pairs(pairs);
    emit(out, sk::pair_similarity_csv(data, sk::pair_similarity(model, data)));
  }
};

struct ProbePcaCmd {
  std::string model_path, words_path, out;
  std::vector<std::string> words;
  std::size_t k = 2;
  std::uint64_t seed = 1;

  void setup(CLI::App& app) {
    auto* c = app.add_subcommand("probe-pca", "Principal-component coordinates of fused word vectors (CSV)");
    c->add_option("--model", model_path, "Checkpoint")->required()->check(CLI::ExistingFile);
    c->add_option("words", words, "Words to project");
    c->add_option("--word-file", words_path, "File with one word per line")->check(CLI::ExistingFile);
    c->add_option("--k", k, "Components")->capture_default_str();
    c->add_option("--seed", seed, "Power-iteration start seed")->capture_default_str();
    c->add_option("--out", out, "CSV file (default stdout)");
    c->callback([this] { run(); });
  }

  void run() const {
    const auto model = load_model(model_path);
    std::vector<std::u32string> list;
    for (const auto& w : words) list.push_back(sk::utf8::decode(w));
    if (!words_path.empty()) {
      for (const auto& w : sk::io::read_lines(words_path)) {
        if (!w.empty()) list.push_back(sk::utf8::decode(w));
      }
    }
    emit(out, sk::pca_project_csv(model, list, k, seed));
  }
};

struct ProbeCohesionCmd {
  std::string model_path, sets, out;

  void setup(CLI::App& app) {
    auto* c = app.add_subcommand("probe-cohesion", "Per-set mean cosine, dispersion and spread, raw vs fused (CSV)");
    c->add_option("--model", model_path, "Checkpoint")->required()->check(CLI::ExistingFile);
    c->add_option("--sets", sets, "TSV: set name TAB word TAB word ...")->required()->check(CLI::ExistingFile);
    c->add_option("--out", out, "CSV file (default stdout)");
    c->callback([this] { run(); });
  }

  void run() const {
    const auto model = load_model(model_path);
    emit(out, sk::cohesion_csv(sk::cohesion_report(model, sk::parse_word_sets(sk::io::read_file(sets)))));
  }
};

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"scriptkit: Hangul subcharacter tokenization, alternation oracle and compression toolkit"};
  app.require_subcommand(1);
  app.fallthrough(false);

  DecomposeCmd decompose;
  TokenizeCmd tokenize;
  VocabTrainCmd vocab_train;
  EncodeCmd encode;
  OracleAlignCmd oracle_align;
  OracleStatsCmd oracle_stats;
  GradcheckCmd gradcheck;
  TrainCmd train;
  EmbedCmd embed;
  ProbePairsCmd probe_pairs;
  ProbePcaCmd probe_pca;
  ProbeCohesionCmd probe_cohesion;
  decompose.setup(app);
  tokenize.setup(app);
  vocab_train.setup(app);
  encode.setup(app);
  oracle_align.setup(app);
  oracle_stats.setup(app);
  gradcheck.setup(app);
  train.setup(app);
  embed.setup(app);
  probe_pairs.setup(app);
  probe_pca.setup(app);
  probe_cohesion.setup(app);

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e);
    return code == 0 ? 0 : 2;
  } catch (const sk::Error& e) {
    std::cerr << "scriptkit: error: " << e.what() << '\n';
    return 1;
  } catch (const std::exception& e) {
    std::cerr << "scriptkit: error: " << e.what() << '\n';
    return 1;
  }
  return 0;
}
