#include <gtest/gtest.h>

#include "scriptkit/checkpoint.hpp"
#include "scriptkit/error.hpp"
#include "scriptkit/rng.hpp"
#include "test_support.hpp"

using namespace scriptkit;

namespace {

struct Pair {
  Tensor a{Shape{2, 3}};
  Tensor b{Shape{4}};
  ParamGroup group;
  Pair() {
    group.add("a", a);
    group.add("b", b, false);
  }
};

}  // namespace

TEST(Checkpoint, RoundTripIsByteExact) {
  Pair p;
  Rng rng(3);
  for (auto& v : p.a.values()) v = rng.normal();
  for (auto& v : p.b.values()) v = rng.normal();
  p.b[0] = -0.0;
  const auto ck = Checkpoint::capture(p.group, 42, {{"config", "embed_dim = 3\n"}});
  const std::string bytes = ck.serialize();
  EXPECT_EQ(bytes.substr(0, 8), "SCRIPTKT");
  const auto back = Checkpoint::deserialize(bytes);
  EXPECT_EQ(back.serialize(), bytes);
  EXPECT_EQ(back.seed, 42u);
  EXPECT_EQ(back.meta.at("config"), "embed_dim = 3\n");

  Pair q;
  back.load_into(q.group);
  EXPECT_TRUE(q.a.same_values(p.a));
  EXPECT_TRUE(q.b.same_values(p.b));
  EXPECT_TRUE(std::signbit(q.b[0]));
  EXPECT_FALSE(q.group.entries()[1].trainable);
}

TEST(Checkpoint, FileRoundTrip) {
  Pair p;
  p.a[4] = 1.25;
  const auto dir = test::scratch_dir("checkpoint");
  Checkpoint::capture(p.group, 7).save(dir / "m.ckpt");
  const auto back = Checkpoint::load(dir / "m.ckpt");
  EXPECT_EQ(back.tensors[0].values[4], 1.25);
  EXPECT_THROW(Checkpoint::load(dir / "missing.ckpt"), Error);
}

TEST(Checkpoint, RejectsCorruptBytes) {
  Pair p;
  const std::string bytes = Checkpoint::capture(p.group, 1).serialize();
  std::string bad = bytes;
  bad[0] = 'X';
  EXPECT_THROW(Checkpoint::deserialize(bad), ParseError);
  EXPECT_THROW(Checkpoint::deserialize(bytes.substr(0, bytes.size() - 1)), ParseError);
  EXPECT_THROW(Checkpoint::deserialize(bytes.substr(0, 10)), ParseError);
  std::string version = bytes;
  version[8] = 9;
  EXPECT_THROW(Checkpoint::deserialize(version), ParseError);
  EXPECT_THROW(Checkpoint::deserialize(bytes + "x"), ParseError);
}

TEST(Checkpoint, LoadIntoMismatchThrows) {
  Pair p;
  const auto ck = Checkpoint::capture(p.group, 1);
  Tensor a({3, 2}), b({4});
  ParamGroup shapes;
  shapes.add("a", a);
  shapes.add("b", b);
  EXPECT_THROW(ck.load_into(shapes), ConfigError);
  Tensor c({2, 3});
  ParamGroup names;
  names.add("c", c);
  names.add("b", b);
  EXPECT_THROW(ck.load_into(names), ConfigError);
  ParamGroup fewer;
  fewer.add("a", c);
  EXPECT_THROW(ck.load_into(fewer), ConfigError);
}
