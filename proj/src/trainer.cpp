#include "scriptkit/trainer.hpp"

#include <algorithm>
#include <cmath>
#include <map>
#include <numeric>
#include <sstream>

#include "scriptkit/error.hpp"
#include "scriptkit/layers.hpp"
#include "scriptkit/optim.hpp"
#include "scriptkit/rng.hpp"

namespace scriptkit {

namespace {

// Fused word vector with what is needed to push a gradient back.
struct WordPass {
  ForwardTrace trace;
  std::size_t rows = 0;
  std::size_t skip = 0;
  std::vector<double> v;

  WordPass(const ScriptModel& model, std::u32string_view word) {
    const Tensor out = model.forward(word, &trace);
    const std::size_t d = model.config().embed_dim;
    rows = out.rows();
    skip = trace.has_cls ? 1 : 0;
    v.assign(d, 0.0);
    const std::size_t n = rows - skip;
    for (std::size_t r = skip; r < rows; ++r) {
      for (std::size_t j = 0; j < d; ++j) v[j] += out.at(r, j) / static_cast<double>(n);
    }
  }

  void backward(ScriptModel& model, const std::vector<double>& dv) const {
    const std::size_t d = dv.size();
    const std::size_t n = rows - skip;
    if (n == 0) return;
    Tensor dout = Tensor::matrix(rows, d);
    for (std::size_t r = skip; r < rows; ++r) {
      for (std::size_t j = 0; j < d; ++j) dout.at(r, j) = dv[j] / static_cast<double>(n);
    }
    model.backward(trace, dout);
  }
};

double dot(const std::vector<double>& a, const std::vector<double>& b) {
  return std::inner_product(a.begin(), a.end(), b.begin(), 0.0);
}

// Cosine and its gradients with respect to both arguments, scaled by g.
double cosine_with_grad(const std::vector<double>& a, const std::vector<double>& b, double g, std::vector<double>& da,
                        std::vector<double>& db) {
  const double na = std::sqrt(dot(a, a));
  const double nb = std::sqrt(dot(b, b));
  if (na == 0.0 || nb == 0.0) return 0.0;
  const double c = dot(a, b) / (na * nb);
  for (std::size_t j = 0; j < a.size(); ++j) {
    da[j] += g * (b[j] / (na * nb) - c * a[j] / (na * na));
    db[j] += g * (a[j] / (na * nb) - c * b[j] / (nb * nb));
  }
  return c;
}

std::vector<std::string> tag_classes(const PairDataset& data) {
  std::vector<std::string> classes{"lemma"};
  for (const auto& rec : data) {
    if (std::find(classes.begin(), classes.end(), rec.relation) == classes.end()) classes.push_back(rec.relation);
  }
  std::sort(classes.begin() + 1, classes.end());
  return classes;
}

// Softmax cross-entropy of the linear head over mean-pooled e_F, averaged
// over both forms of every item.
double tag_batch_loss(ScriptModel& model, Tensor& head_w, Tensor& head_b, const std::vector<std::string>& classes,
                      const PairDataset& data, const std::vector<BatchItem>& batch, bool with_grad) {
  const std::size_t d = model.config().embed_dim;
  const std::size_t k = classes.size();
  double loss = 0.0;
  const double scale = 1.0 / static_cast<double>(2 * batch.size());
  for (const auto& item : batch) {
    const auto& rec = data[item.pair];
    const std::pair<const std::u32string*, std::string> examples[] = {{&rec.form_a, "lemma"},
                                                                       {&rec.form_b, rec.relation}};
    for (const auto& [form, label] : examples) {
      const std::size_t target =
          static_cast<std::size_t>(std::find(classes.begin(), classes.end(), label) - classes.begin());
      WordPass pass(model, *form);
      Tensor x({1, d}, pass.v);
      const Tensor logits = affine(x, head_w, &head_b);
      double top = logits[0];
      for (std::size_t c = 1; c < k; ++c) top = std::max(top, logits[c]);
      double total = 0.0;
      std::vector<double> p(k);
      for (std::size_t c = 0; c < k; ++c) total += (p[c] = std::exp(logits[c] - top));
      for (double& v : p) v /= total;
      loss += -std::log(p[target]) * scale;
      if (!with_grad) continue;
      Tensor dlogits = Tensor::matrix(1, k);
      for (std::size_t c = 0; c < k; ++c) dlogits[c] = (p[c] - (c == target ? 1.0 : 0.0)) * scale;
      Tensor dx = Tensor::matrix(1, d);
      affine_backward(x, head_w, &head_b, dlogits, &dx);
      pass.backward(model, {dx.values().begin(), dx.values().end()});
    }
  }
  return loss;
}

}  // namespace

const char* to_string(Objective objective) {
  return objective == Objective::ContrastivePairs ? "contrastive-pairs" : "tag-classification";
}

std::optional<Objective> parse_objective(std::string_view name) {
  if (name == "contrastive-pairs") return Objective::ContrastivePairs;
  if (name == "tag-classification") return Objective::TagClassification;
  return std::nullopt;
}

void TrainConfig::validate() const {
  if (epochs == 0) throw ConfigError("epochs must be positive");
  if (batch_size == 0) throw ConfigError("batch_size must be positive");
  if (lr < 0.0 || min_lr < 0.0) throw ConfigError("learning rates must be non-negative");
  if (weight_decay < 0.0) throw ConfigError("weight_decay must be non-negative");
}

bool TrainConfig::set(std::string_view key, std::string_view value) {
  if (key == "seed") {
    seed = parse_count(key, value);
  } else if (key == "objective") {
    auto o = parse_objective(value);
    if (!o) throw ConfigError("objective: unknown objective '" + std::string(value) + "'");
    objective = *o;
  } else if (key == "epochs") {
    epochs = parse_count(key, value);
  } else if (key == "lr") {
    lr = parse_real(key, value);
  } else if (key == "min_lr") {
    min_lr = parse_real(key, value);
  } else if (key == "batch_size") {
    batch_size = parse_count(key, value);
  } else if (key == "weight_decay") {
    weight_decay = parse_real(key, value);
  } else if (key == "margin") {
    margin = parse_real(key, value);
  } else if (key == "freeze_subword") {
    freeze_subword = parse_bool(key, value);
  } else if (key == "random_pairs") {
    random_pairs = parse_count(key, value);
  } else {
    return false;
  }
  return true;
}

std::string TrainConfig::to_text() const {
  std::ostringstream out;
  out.precision(17);
  out << "seed = " << seed << '\n'
      << "objective = " << to_string(objective) << '\n'
      << "epochs = " << epochs << '\n'
      << "lr = " << lr << '\n'
      << "min_lr = " << min_lr << '\n'
      << "batch_size = " << batch_size << '\n'
      << "weight_decay = " << weight_decay << '\n'
      << "margin = " << margin << '\n'
      << "freeze_subword = " << (freeze_subword ? "true" : "false") << '\n'
      << "random_pairs = " << random_pairs << '\n';
  return out.str();
}

double contrastive_batch_loss(ScriptModel& model, const PairDataset& data, const std::vector<BatchItem>& batch,
                              double margin, bool with_grad) {
  if (batch.empty()) return 0.0;
  const std::size_t d = model.config().embed_dim;
  const double scale = 1.0 / static_cast<double>(batch.size());
  double loss = 0.0;
  for (const auto& item : batch) {
    WordPass a(model, data[item.pair].form_a);
    WordPass b(model, data[item.pair].form_b);
    std::vector<double> da(d, 0.0), db(d, 0.0), dn(d, 0.0);
    loss += (1.0 - cosine_with_grad(a.v, b.v, -scale, da, db)) * scale;
    std::optional<WordPass> n;
    if (item.negative) {
      n.emplace(model, data[*item.negative].form_b);
      std::vector<double> ta(d, 0.0), tn(d, 0.0);
      const double c = cosine_with_grad(a.v, n->v, scale, ta, tn);
      if (c > margin) {
        loss += (c - margin) * scale;
        for (std::size_t j = 0; j < d; ++j) {
          da[j] += ta[j];
          dn[j] += tn[j];
        }
      }
    }
    if (with_grad) {
      a.backward(model, da);
      b.backward(model, db);
      if (n) n->backward(model, dn);
    }
  }
  return loss;
}

TrainResult train(ScriptModel& model, const PairDataset& data, const TrainConfig& config) {
  config.validate();
  if (data.empty()) throw ConfigError("training data is empty");
  const std::size_t d = model.config().embed_dim;
  ParamGroup& group = model.param_group();
  if (config.freeze_subword) group.set_trainable("subword_embed", false);

  TrainResult result;
  Rng rng(config.seed);
  ParamGroup optimized;
  for (const auto& entry : group) optimized.add(entry.name, *entry.tensor, entry.trainable);
  if (config.objective == Objective::TagClassification) {
    result.classes = tag_classes(data);
    result.head_w = init_uniform({d, result.classes.size()}, d, rng);
    result.head_b = init_uniform({result.classes.size()}, d, rng);
    optimized.add("head.w", result.head_w);
    optimized.add("head.b", result.head_b);
  }
  AdamState state = AdamState::for_params(optimized);
  AdamHyper hyper;
  hyper.weight_decay = config.weight_decay;

  const auto probe_pairs = random_pairs(data.size(), config.random_pairs, config.seed ^ 0x5eedULL);
  const std::size_t batches_per_epoch = (data.size() + config.batch_size - 1) / config.batch_size;
  const std::size_t total_steps = batches_per_epoch * config.epochs;
  std::vector<std::size_t> order(data.size());
  std::iota(order.begin(), order.end(), 0);
  std::size_t step = 0;

  for (std::size_t epoch = 1; epoch <= config.epochs; ++epoch) {
    for (std::size_t i = order.size(); i > 1; --i) std::swap(order[i - 1], order[rng.index(i)]);
    double epoch_loss = 0.0;
    for (std::size_t start = 0; start < order.size(); start += config.batch_size) {
      std::vector<BatchItem> batch;
      for (std::size_t i = start; i < std::min(order.size(), start + config.batch_size); ++i) {
        BatchItem item{order[i], std::nullopt};
        if (data.size() > 1) {
          std::size_t j = rng.index(data.size() - 1);
          if (j >= item.pair) ++j;
          item.negative = j;
        }
        batch.push_back(item);
      }
      optimized.zero_grad();
      const double loss =
          config.objective == Objective::ContrastivePairs
              ? contrastive_batch_loss(model, data, batch, config.margin, true)
              : tag_batch_loss(model, result.head_w, result.head_b, result.classes, data, batch, true);
      hyper.lr = cosine_lr(config.lr, step, total_steps, config.min_lr);
      adam_step(optimized, state, hyper);
      ++step;
      epoch_loss += loss;
      result.batch_losses.push_back(loss);
      result.batches.push_back(std::move(batch));
    }
    const PairSimilarity sim = pair_similarity(model, data);
    result.log.push_back({epoch, epoch_loss / static_cast<double>(batches_per_epoch), sim.mean_fused, sim.mean_raw,
                          mean_random_cosine(model, data, probe_pairs)});
  }
  optimized.zero_grad();
  for (const auto& entry : optimized) entry.tensor->clear_grad();
  return result;
}

std::string metrics_csv(const std::vector<EpochMetrics>& log) {
  std::string out = "epoch,loss,mean_pair_cos_fused,mean_pair_cos_raw,mean_random_cos\n";
  for (const auto& m : log) {
    out += std::to_string(m.epoch) + ',' + format_real(m.loss) + ',' + format_real(m.mean_pair_cos_fused) + ',' +
           format_real(m.mean_pair_cos_raw) + ',' + format_real(m.mean_random_cos) + '\n';
  }
  return out;
}

}  // namespace scriptkit
