#pragma once

#include <cstdint>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

#include "scriptkit/model.hpp"
#include "scriptkit/probe.hpp"

namespace scriptkit {

enum class Objective { ContrastivePairs, TagClassification };

const char* to_string(Objective objective);
std::optional<Objective> parse_objective(std::string_view name);

struct TrainConfig {
  std::uint64_t seed = 13;
  Objective objective = Objective::ContrastivePairs;
  std::size_t epochs = 40;
  double lr = 0.01;
  double min_lr = 0.0;
  std::size_t batch_size = 10;
  double weight_decay = 0.0;
  /// Unrelated pairs are penalized while their cosine exceeds this.
  double margin = 0.2;
  bool freeze_subword = true;
  /// Unrelated pairs used for the mean_random_cos column.
  std::size_t random_pairs = 100;

  /// Throws ConfigError for zero epochs or batch size, negative rates.
  void validate() const;
  /// Returns false for unknown keys; throws ConfigError for bad values.
  bool set(std::string_view key, std::string_view value);
  std::string to_text() const;
};

struct EpochMetrics {
  std::size_t epoch = 0;
  double loss = 0.0;
  double mean_pair_cos_fused = 0.0;
  double mean_pair_cos_raw = 0.0;
  double mean_random_cos = 0.0;
};

/// One contrastive item: the related pair and the record whose form_b
/// serves as the unrelated partner of form_a (absent with one record).
struct BatchItem {
  std::size_t pair = 0;
  std::optional<std::size_t> negative;
};

struct TrainResult {
  std::vector<EpochMetrics> log;
  std::vector<double> batch_losses;
  std::vector<std::vector<BatchItem>> batches;  // every batch, in order
  /// Classification head (D, classes) and bias, tag objective only.
  Tensor head_w, head_b;
  std::vector<std::string> classes;
};

/// Contrastive loss of one batch, averaged over its items:
///   (1 - cos(a, b)) + max(0, cos(a, n) - margin)
/// When with_grad is set, gradients are added into the model parameters.
double contrastive_batch_loss(ScriptModel& model, const PairDataset& data, const std::vector<BatchItem>& batch,
                              double margin, bool with_grad);

/// Seeded AdamW training with a cosine learning-rate schedule. Metrics are
/// measured after every epoch. Throws ConfigError for an empty dataset.
TrainResult train(ScriptModel& model, const PairDataset& data, const TrainConfig& config);

/// `epoch,loss,mean_pair_cos_fused,mean_pair_cos_raw,mean_random_cos`.
std::string metrics_csv(const std::vector<EpochMetrics>& log);

}  // namespace scriptkit
