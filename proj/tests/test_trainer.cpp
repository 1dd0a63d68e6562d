#include <gtest/gtest.h>

#include "scriptkit/error.hpp"
#include "scriptkit/gradcheck.hpp"
#include "scriptkit/trainer.hpp"

using namespace scriptkit;

namespace {

PairDataset small_pairs() {
  return parse_pairs(
      "먹다\t먹었다\tpast\n"
      "가다\t갔다\tpast\n"
      "보다\t봤다\tpast\n"
      "하다\t했다\tpast\n"
      "오다\t왔다\tpast\n");
}

ScriptModel small_model(std::uint64_t seed = 1) {
  ScriptConfig c;
  c.embed_dim = 4;
  c.residual_fusion = true;
  const auto vocab = SubwordVocab::train({U"먹다 먹었다 가다 갔다 보다 봤다 하다 했다 오다 왔다"}, 200,
                                         VocabMode::CharList);
  return ScriptModel::create(c, vocab, seed);
}

TrainConfig quick(std::size_t epochs = 3) {
  TrainConfig t;
  t.epochs = epochs;
  t.batch_size = 2;
  t.random_pairs = 10;
  return t;
}

}  // namespace

TEST(Trainer, ZeroLearningRateLeavesParametersUnchanged) {
  auto model = small_model();
  const auto before = model.clone();
  auto cfg = quick();
  cfg.lr = 0.0;
  train(model, small_pairs(), cfg);
  const auto& now = model.param_group().entries();
  const auto& then = before.param_group().entries();
  ASSERT_EQ(now.size(), then.size());
  for (std::size_t i = 0; i < now.size(); ++i) EXPECT_TRUE(now[i].tensor->same_values(*then[i].tensor)) << now[i].name;
}

TEST(Trainer, FrozenSubwordTableStaysPut) {
  auto model = small_model();
  const Tensor before = model.params().subword_embed;
  train(model, small_pairs(), quick());
  EXPECT_TRUE(model.params().subword_embed.same_values(before));
  EXPECT_FALSE(model.param_group().entries().back().trainable);

  auto thawed = small_model();
  auto cfg = quick();
  cfg.freeze_subword = false;
  train(thawed, small_pairs(), cfg);
  EXPECT_FALSE(thawed.params().subword_embed.same_values(before));
}

TEST(Trainer, SinglePairLossDecreases) {
  auto model = small_model(3);
  const auto data = parse_pairs("먹다\t먹었다\tpast\n");
  auto cfg = quick(30);
  cfg.batch_size = 1;
  const auto result = train(model, data, cfg);
  ASSERT_EQ(result.log.size(), 30u);
  EXPECT_LT(result.log.back().loss, result.log.front().loss);
  // Strictly rising pair cosine until the pair is within 1e-3 of aligned.
  for (std::size_t e = 1; e < result.log.size() && result.log[e - 1].mean_pair_cos_fused < 0.999; ++e) {
    EXPECT_GT(result.log[e].mean_pair_cos_fused, result.log[e - 1].mean_pair_cos_fused) << "epoch " << e + 1;
  }
  for (const auto& batch : result.batches) EXPECT_FALSE(batch[0].negative.has_value());
}

TEST(Trainer, FirstBatchLossMatchesRecomputation) {
  const auto data = small_pairs();
  auto model = small_model(4);
  auto fresh = model.clone();
  const auto result = train(model, data, quick(1));
  ASSERT_EQ(result.batches.size(), 3u);
  EXPECT_DOUBLE_EQ(result.batch_losses[0], contrastive_batch_loss(fresh, data, result.batches[0], 0.2, false));
  for (const auto& batch : result.batches) {
    for (const auto& item : batch) {
      ASSERT_TRUE(item.negative.has_value());
      EXPECT_NE(*item.negative, item.pair);
    }
  }
}

TEST(Trainer, ContrastiveLossGradient) {
  const auto data = small_pairs();
  auto model = small_model(5);
  const std::vector<BatchItem> batch = {{0, 1}, {2, 4}, {3, std::nullopt}};
  auto loss = [&](bool with_grad) { return contrastive_batch_loss(model, data, batch, -1.0, with_grad); };
  GradCheckOptions opts;
  opts.tol = 1e-4;
  EXPECT_LT(grad_check(loss, model.param_group(), opts).max_rel_error, 1e-4);
}

TEST(Trainer, DeterministicForASeed) {
  auto a = small_model(), b = small_model();
  const auto ra = train(a, small_pairs(), quick());
  const auto rb = train(b, small_pairs(), quick());
  EXPECT_EQ(metrics_csv(ra.log), metrics_csv(rb.log));
  EXPECT_EQ(a.checkpoint(0).serialize(), b.checkpoint(0).serialize());
}

TEST(Trainer, TagObjectiveRuns) {
  auto model = small_model();
  auto cfg = quick(2);
  cfg.objective = Objective::TagClassification;
  const auto result = train(model, small_pairs(), cfg);
  EXPECT_EQ(result.classes, (std::vector<std::string>{"lemma", "past"}));
  EXPECT_EQ(result.head_w.shape(), (Shape{4, 2}));
  EXPECT_EQ(result.log.size(), 2u);
}

TEST(Trainer, Errors) {
  auto model = small_model();
  EXPECT_THROW(train(model, {}, quick()), ConfigError);
  auto cfg = quick();
  cfg.epochs = 0;
  EXPECT_THROW(train(model, small_pairs(), cfg), ConfigError);
}

TEST(Trainer, MetricsCsvHeader) {
  const std::string csv = metrics_csv({{1, 0.5, 0.25, 0.125, 0.0}});
  EXPECT_EQ(csv, "epoch,loss,mean_pair_cos_fused,mean_pair_cos_raw,mean_random_cos\n1,0.5,0.25,0.125,0\n");
}
