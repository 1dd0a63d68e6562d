#include "scriptkit/hangul.hpp"

#include "scriptkit/error.hpp"

namespace scriptkit::hangul {

namespace {

constexpr JamoInventory kInventory{
    {U'ㄱ', U'ㄲ', U'ㄴ', U'ㄷ', U'ㄸ', U'ㄹ', U'ㅁ', U'ㅂ', U'ㅃ', U'ㅅ',
     U'ㅆ', U'ㅇ', U'ㅈ', U'ㅉ', U'ㅊ', U'ㅋ', U'ㅌ', U'ㅍ', U'ㅎ'},
    {U'ㅏ', U'ㅐ', U'ㅑ', U'ㅒ', U'ㅓ', U'ㅔ', U'ㅕ', U'ㅖ', U'ㅗ', U'ㅘ', U'ㅙ',
     U'ㅚ', U'ㅛ', U'ㅜ', U'ㅝ', U'ㅞ', U'ㅟ', U'ㅠ', U'ㅡ', U'ㅢ', U'ㅣ'},
    {0,     U'ㄱ', U'ㄲ', U'ㄳ', U'ㄴ', U'ㄵ', U'ㄶ', U'ㄷ', U'ㄹ', U'ㄺ',
     U'ㄻ', U'ㄼ', U'ㄽ', U'ㄾ', U'ㄿ', U'ㅀ', U'ㅁ', U'ㅂ', U'ㅄ', U'ㅅ',
     U'ㅆ', U'ㅇ', U'ㅈ', U'ㅊ', U'ㅋ', U'ㅌ', U'ㅍ', U'ㅎ'},
};

template <std::size_t N>
std::optional<int> find_letter(const std::array<char32_t, N>& letters, char32_t letter,
                               std::size_t start = 0) {
  for (std::size_t i = start; i < N; ++i) {
    if (letters[i] == letter) return static_cast<int>(i);
  }
  return std::nullopt;
}

}  // namespace

const JamoInventory& inventory() { return kInventory; }

const char* to_string(VowelClass kind) {
  switch (kind) {
    case VowelClass::Vertical:
      return "Vertical";
    case VowelClass::Horizontal:
      return "Horizontal";
    case VowelClass::Complex:
      return "Complex";
  }
  return "?";
}

bool is_syllable(char32_t ch) { return ch >= kSyllableFirst && ch <= kSyllableLast; }

// U+3131..U+314E are consonants, U+314F..U+3163 vowels.
bool is_compat_consonant(char32_t ch) { return ch >= 0x3131 && ch <= 0x314E; }
bool is_compat_vowel(char32_t ch) { return ch >= 0x314F && ch <= 0x3163; }

std::optional<SyllableBlock> decompose(char32_t ch) {
  if (!is_syllable(ch)) return std::nullopt;
  const int offset = static_cast<int>(ch - kSyllableFirst);
  return SyllableBlock{offset / (kJungseongCount * kJongseongCount),
                       (offset / kJongseongCount) % kJungseongCount, offset % kJongseongCount};
}

char32_t compose(const SyllableBlock& block) {
  if (block.cho < 0 || block.cho >= kChoseongCount || block.jung < 0 ||
      block.jung >= kJungseongCount || block.jong < 0 || block.jong >= kJongseongCount) {
    throw InvalidBlockError("invalid syllable block (" + std::to_string(block.cho) + ", " +
                            std::to_string(block.jung) + ", " + std::to_string(block.jong) + ")");
  }
  return kSyllableFirst +
         static_cast<char32_t>((block.cho * kJungseongCount + block.jung) * kJongseongCount +
                               block.jong);
}

VowelClass classify_vowel(int jung) {
  if (jung < 0 || jung >= kJungseongCount) {
    throw IndexError("jungseong index out of range: " + std::to_string(jung));
  }
  switch (kInventory.jungseong[static_cast<std::size_t>(jung)]) {
    case U'ㅏ':
    case U'ㅑ':
    case U'ㅓ':
    case U'ㅕ':
    case U'ㅣ':
    case U'ㅐ':
    case U'ㅒ':
    case U'ㅔ':
    case U'ㅖ':
      return VowelClass::Vertical;
    case U'ㅗ':
    case U'ㅛ':
    case U'ㅜ':
    case U'ㅠ':
    case U'ㅡ':
      return VowelClass::Horizontal;
    default:
      return VowelClass::Complex;
  }
}

std::optional<int> choseong_index(char32_t letter) { return find_letter(kInventory.choseong, letter); }
std::optional<int> jungseong_index(char32_t letter) { return find_letter(kInventory.jungseong, letter); }
std::optional<int> jongseong_index(char32_t letter) {
  if (letter == 0) return std::nullopt;
  return find_letter(kInventory.jongseong, letter, 1);
}

std::u32string letters(const SyllableBlock& block) {
  std::u32string out;
  out.push_back(kInventory.choseong.at(static_cast<std::size_t>(block.cho)));
  out.push_back(kInventory.jungseong.at(static_cast<std::size_t>(block.jung)));
  if (block.has_final()) out.push_back(kInventory.jongseong.at(static_cast<std::size_t>(block.jong)));
  return out;
}

}  // namespace scriptkit::hangul
