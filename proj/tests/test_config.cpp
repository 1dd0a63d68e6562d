#include <gtest/gtest.h>

#include "scriptkit/config.hpp"
#include "scriptkit/error.hpp"
#include "scriptkit/trainer.hpp"

using namespace scriptkit;

TEST(ScriptConfig, DefaultsAndTextRoundTrip) {
  ScriptConfig c;
  EXPECT_EQ(c.embed_dim, 16u);
  EXPECT_EQ(c.fusion, Fusion::CrossAttention);
  EXPECT_EQ(c.compression, Compression::Principles);
  EXPECT_EQ(ScriptConfig::from_text(c.to_text()), c);

  EXPECT_TRUE(c.set("scheme", "bts"));
  EXPECT_TRUE(c.set("fusion", "Concatenation"));
  EXPECT_TRUE(c.set("compression", "attention"));
  EXPECT_TRUE(c.set("granularity", "word"));
  EXPECT_TRUE(c.set("residual_fusion", "yes"));
  EXPECT_TRUE(c.set("embed_dim", "8"));
  EXPECT_TRUE(c.set("heads", "2"));
  EXPECT_TRUE(c.set("cls_bypass", "1"));
  EXPECT_FALSE(c.set("colour", "red"));
  EXPECT_EQ(ScriptConfig::from_text(c.to_text()), c);
  EXPECT_NE(c.to_text().find("fusion = concatenation"), std::string::npos);
}

TEST(ScriptConfig, BadValues) {
  ScriptConfig c;
  EXPECT_THROW(c.set("scheme", "morse"), ConfigError);
  EXPECT_THROW(c.set("embed_dim", "-3"), ConfigError);
  EXPECT_THROW(c.set("embed_dim", "3.5"), ConfigError);
  EXPECT_THROW(c.set("residual_fusion", "maybe"), ConfigError);
  EXPECT_THROW(c.set("fusion", "product"), ConfigError);
  EXPECT_THROW(ScriptConfig::from_text("colour = red\n"), ConfigError);
  EXPECT_THROW(ScriptConfig::from_text("embed_dim = 0\n"), ConfigError);
  EXPECT_THROW(ScriptConfig::from_text("embed_dim = 6\nheads = 4\n"), ConfigError);
  EXPECT_NO_THROW(ScriptConfig::from_text("embed_dim = 6\nheads = 4\nfusion = summation\n"));
}

TEST(Settings, CommentsBlanksAndErrors) {
  const auto s = parse_settings("# header\n\n a = 1 # tail\nb=two\n");
  ASSERT_EQ(s.size(), 2u);
  EXPECT_EQ(s[0].key, "a");
  EXPECT_EQ(s[0].value, "1");
  EXPECT_EQ(s[0].line, 3u);
  EXPECT_EQ(s[1].value, "two");
  EXPECT_THROW(parse_settings("novalue\n"), ParseError);
  EXPECT_THROW(parse_settings(" = 3\n"), ParseError);
}

TEST(Settings, ScalarParsers) {
  EXPECT_TRUE(parse_bool("k", "ON"));
  EXPECT_FALSE(parse_bool("k", "off"));
  EXPECT_EQ(parse_count("k", "42"), 42u);
  EXPECT_THROW(parse_count("k", ""), ConfigError);
  EXPECT_DOUBLE_EQ(parse_real("k", "1e-3"), 1e-3);
  EXPECT_THROW(parse_real("k", "inf"), ConfigError);
  EXPECT_THROW(parse_real("k", "0.1x"), ConfigError);
}

TEST(TrainConfig, SetAndValidate) {
  TrainConfig t;
  EXPECT_EQ(t.seed, 13u);
  EXPECT_EQ(t.epochs, 40u);
  EXPECT_TRUE(t.freeze_subword);
  EXPECT_TRUE(t.set("epochs", "3"));
  EXPECT_TRUE(t.set("lr", "0.5"));
  EXPECT_FALSE(t.set("heads", "2"));
  EXPECT_EQ(t.epochs, 3u);
  EXPECT_NO_THROW(t.validate());
  t.batch_size = 0;
  EXPECT_THROW(t.validate(), ConfigError);
  EXPECT_EQ(parse_objective("contrastive-pairs"), Objective::ContrastivePairs);
}
