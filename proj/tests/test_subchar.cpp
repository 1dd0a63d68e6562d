#include <gtest/gtest.h>

#include "scriptkit/error.hpp"
#include "scriptkit/hangul.hpp"
#include "scriptkit/subchar.hpp"
#include "scriptkit/utf8.hpp"
#include "test_support.hpp"

using namespace scriptkit;

namespace {

const SubcharTokenizer& tok() {
  static const SubcharTokenizer t;
  return t;
}

std::u32string symbols_with_role(const SubcharSequence& seq, Role role) {
  std::u32string out;
  for (std::size_t i = 0; i < seq.size(); ++i) {
    if (seq.roles[i] == role && seq.symbols[i] != kPadSymbol) out.push_back(seq.symbols[i]);
  }
  return out;
}

std::u32string span_symbols(const SubcharSequence& seq, SubcharSequence::Span span) {
  std::u32string out;
  for (std::size_t i = span.begin; i < span.begin + span.length; ++i) out.push_back(seq.symbols[i]);
  return out;
}

std::u32string slot(std::u32string atoms, std::size_t width) {
  atoms.resize(width, kPadSymbol);
  return atoms;
}

}  // namespace

TEST(SubcharScheme, Widths) {
  EXPECT_EQ(slot_widths(Scheme::Jamo).total(), 3u);
  EXPECT_EQ(slot_widths(Scheme::Stroke).total(), 9u);
  EXPECT_EQ(slot_widths(Scheme::Cji).total(), 7u);
  EXPECT_EQ(slot_widths(Scheme::Bts).total(), 13u);
  EXPECT_EQ(slot_widths(Scheme::Stroke).initial, 4u);
  EXPECT_EQ(slot_widths(Scheme::Cji).vowel, 5u);
  EXPECT_EQ(parse_scheme("BTS"), Scheme::Bts);
  EXPECT_FALSE(parse_scheme("morse"));
}

TEST(SubcharTokenize, DaehanmingukJamo) {
  const auto seq = tok().tokenize(U"대한민국", Scheme::Jamo);
  EXPECT_EQ(seq.size(), 12u);
  EXPECT_EQ(symbols_with_role(seq, Role::Initial), U"ㄷㅎㅁㄱ");
  EXPECT_EQ(symbols_with_role(seq, Role::Vowel), U"ㅐㅏㅣㅜ");
  EXPECT_EQ(symbols_with_role(seq, Role::Final), U"▃ㄴㄴㄱ");
  EXPECT_EQ(seq.ids[2], SubcharVocab::kEmptyFinal);
}

TEST(SubcharTokenize, ChupdaJamo) {
  const auto seq = tok().tokenize(U"춥다", Scheme::Jamo);
  EXPECT_EQ(std::u32string(seq.symbols.begin(), seq.symbols.end()), U"ㅊㅜㅂㄷㅏ▃");
}

TEST(SubcharTokenize, BtsAnchors) {
  const auto jj = tok().tokenize(U"짜", Scheme::Bts);
  EXPECT_EQ(span_symbols(jj, group_roles(jj, 0).initial), U"ㅅ-ㅅ-");
  const auto wae = tok().tokenize(U"왜", Scheme::Bts);
  EXPECT_EQ(span_symbols(wae, group_roles(wae, 0).vowel), U"·ㅡㅣ·ㅣ");
  EXPECT_EQ(tok().table().consonant(U'ㅉ'), U"ㅅ-ㅅ-");
  EXPECT_EQ(tok().table().vowel(U'ㅙ'), U"·ㅡㅣ·ㅣ");
}

TEST(SubcharTokenize, BtsDaehanminguk) {
  const auto seq = tok().tokenize(U"대한민국", Scheme::Bts);
  EXPECT_EQ(seq.size(), 52u);
  EXPECT_EQ(span_symbols(seq, group_roles(seq, 0).initial), slot(U"ㄴ-", 4));
  EXPECT_EQ(span_symbols(seq, group_roles(seq, 1).initial), slot(U"ㅇ-", 4));
  EXPECT_EQ(span_symbols(seq, group_roles(seq, 0).vowel), slot(U"ㅣ·ㅣ", 5));
  EXPECT_EQ(span_symbols(seq, group_roles(seq, 3).vowel), slot(U"ㅡ·", 5));
  EXPECT_EQ(span_symbols(seq, group_roles(seq, 0).final_), slot(U"▃", 4));
}

TEST(SubcharGroupRoles, Spans) {
  const auto han = tok().tokenize(U"한", Scheme::Jamo);
  const auto g = group_roles(han, 0);
  EXPECT_EQ(span_symbols(han, g.initial), U"ㅎ");
  EXPECT_EQ(span_symbols(han, g.vowel), U"ㅏ");
  EXPECT_EQ(span_symbols(han, g.final_), U"ㄴ");
  const auto ga = tok().tokenize(U"가", Scheme::Bts);
  const auto b = group_roles(ga, 0);
  EXPECT_EQ(b.initial.length, 4u);
  EXPECT_EQ(b.vowel.length, 5u);
  EXPECT_EQ(b.final_.length, 4u);
  EXPECT_THROW(group_roles(tok().tokenize(U"대한민국", Scheme::Jamo), 5), IndexError);
}

TEST(SubcharTokenize, PassthroughAndBareLetters) {
  const auto seq = tok().tokenize(U"a ㄴ", Scheme::Cji);
  ASSERT_EQ(seq.size(), 21u);
  EXPECT_EQ(seq.roles[0], Role::Other);
  EXPECT_EQ(seq.symbols[0], U'a');
  EXPECT_EQ(char_kind(seq, 0), CharKind::Passthrough);
  EXPECT_EQ(char_kind(seq, 1), CharKind::Passthrough);
  EXPECT_EQ(char_kind(seq, 2), CharKind::BareJamo);
  EXPECT_EQ(seq.roles[14], Role::Initial);
  for (std::size_t i = 15; i < 21; ++i) {
    EXPECT_EQ(seq.roles[i], Role::Other);
    EXPECT_EQ(seq.ids[i], SubcharVocab::kPad);
  }
  EXPECT_EQ(tok().vocab().passthrough_id(U'中'), SubcharVocab::kOther);
  EXPECT_NE(tok().vocab().passthrough_id(U'a'), SubcharVocab::kOther);
}

TEST(SubcharTokenize, RolePatternAndLengthLaw) {
  Rng rng(4);
  for (Scheme scheme : kAllSchemes) {
    const auto w = slot_widths(scheme);
    for (int trial = 0; trial < 50; ++trial) {
      std::u32string text;
      const std::size_t n = 1 + rng.index(8);
      for (std::size_t i = 0; i < n; ++i) text.push_back(static_cast<char32_t>(0xAC00 + rng.index(11172)));
      const auto seq = tok().tokenize(text, scheme);
      ASSERT_EQ(seq.size(), w.total() * n);
      for (std::size_t k = 0; k < n; ++k) {
        const std::size_t base = k * w.total();
        for (std::size_t i = 0; i < w.total(); ++i) {
          const Role expected = i < w.initial ? Role::Initial : i < w.initial + w.vowel ? Role::Vowel : Role::Final;
          ASSERT_EQ(seq.roles[base + i], expected);
        }
      }
    }
  }
}

TEST(SubcharTokenize, JamoAgreesWithDecompose) {
  const auto& inv = hangul::inventory();
  for (char32_t c = hangul::kSyllableFirst; c <= hangul::kSyllableLast; ++c) {
    const auto block = *hangul::decompose(c);
    const auto seq = tok().tokenize(std::u32string(1, c), Scheme::Jamo);
    ASSERT_EQ(seq.symbols[0], inv.choseong[block.cho]);
    ASSERT_EQ(seq.symbols[1], inv.jungseong[block.jung]);
    ASSERT_EQ(seq.symbols[2], block.has_final() ? inv.jongseong[block.jong] : kEmptyFinalSymbol);
  }
}

TEST(SubcharDetokenize, RoundTripExamples) {
  EXPECT_EQ(tok().detokenize(tok().tokenize(U"한국", Scheme::Jamo)), U"한국");
  EXPECT_EQ(tok().detokenize(tok().tokenize(U"Hello 한", Scheme::Bts)), U"Hello 한");
}

TEST(SubcharDetokenize, RoundTripEverySyllableEveryScheme) {
  std::u32string all;
  for (char32_t c = hangul::kSyllableFirst; c <= hangul::kSyllableLast; ++c) all.push_back(c);
  for (Scheme scheme : kAllSchemes) EXPECT_EQ(tok().detokenize(tok().tokenize(all, scheme)), all);
}

TEST(SubcharDetokenize, RoundTripRandomMixedText) {
  Rng rng(99);
  for (int trial = 0; trial < 200; ++trial) {
    const auto text = test::random_mixed_text(rng, 12);
    for (Scheme scheme : kAllSchemes) ASSERT_EQ(tok().detokenize(tok().tokenize(text, scheme)), text);
  }
}

TEST(SubcharDetokenize, MalformedSequences) {
  auto seq = tok().tokenize(U"한", Scheme::Jamo);
  seq.roles[0] = Role::Vowel;
  EXPECT_THROW(tok().detokenize(seq), MalformedSequenceError);

  auto shortened = tok().tokenize(U"한", Scheme::Jamo);
  shortened.ids.pop_back();
  shortened.roles.pop_back();
  shortened.symbols.pop_back();
  EXPECT_THROW(tok().detokenize(shortened), MalformedSequenceError);

  auto bad_atoms = tok().tokenize(U"가", Scheme::Bts);
  bad_atoms.symbols[0] = U'ㅡ';
  EXPECT_THROW(tok().detokenize(bad_atoms), MalformedSequenceError);
}

TEST(DecompTable, ValidatesEntries) {
  const std::string text = tok().table().to_text();
  EXPECT_NO_THROW(DecompTable::parse(text));
  // Dropping a consonant leaves the table incomplete.
  std::string missing;
  for (std::size_t at = 0, next; at < text.size(); at = next + 1) {
    next = text.find('\n', at);
    const std::string line = text.substr(at, next - at);
    if (line.rfind("ㄱ\t", 0) != 0) missing += line + "\n";
    if (next == std::string::npos) break;
  }
  EXPECT_THROW(DecompTable::parse(missing), ConfigError);
  EXPECT_THROW(DecompTable::parse(text + "ㅏ\tㅣ,·,ㅣ,·,ㅣ,·\n"), Error);
  EXPECT_THROW(DecompTable::parse("ㄱ\n"), ParseError);
}

TEST(DecompTable, EntriesFitTheirSlots) {
  const auto& inv = hangul::inventory();
  for (char32_t c : inv.choseong) EXPECT_LE(tok().table().consonant(c).size(), kMaxConsonantAtoms);
  for (std::size_t i = 1; i < inv.jongseong.size(); ++i) {
    EXPECT_LE(tok().table().consonant(inv.jongseong[i]).size(), kMaxConsonantAtoms);
  }
  for (char32_t v : inv.jungseong) EXPECT_LE(tok().table().vowel(v).size(), kMaxVowelAtoms);
}

TEST(SubcharVocab, ReservedIds) {
  const auto& v = tok().vocab();
  EXPECT_EQ(v.name(SubcharVocab::kPad), "[PAD]");
  EXPECT_EQ(v.name(SubcharVocab::kEmptyFinal), "[EMPTY]");
  EXPECT_EQ(v.name(SubcharVocab::kCls), "[CLS]");
  EXPECT_EQ(v.name(SubcharVocab::kOther), "[OTHER]");
  EXPECT_GT(v.size(), 4u);
  EXPECT_NE(v.structural_id(kCheonjiinDot), v.structural_id(kStrokeFiller));
}
