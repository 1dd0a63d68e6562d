#pragma once

#include <array>
#include <compare>
#include <optional>
#include <string>

namespace scriptkit::hangul {

inline constexpr char32_t kSyllableFirst = 0xAC00;
inline constexpr int kChoseongCount = 19;
inline constexpr int kJungseongCount = 21;
inline constexpr int kJongseongCount = 28;  // index 0 is the empty final
inline constexpr int kSyllableCount = kChoseongCount * kJungseongCount * kJongseongCount;
inline constexpr char32_t kSyllableLast = kSyllableFirst + kSyllableCount - 1;

/// Letters of each slot, as Hangul Compatibility Jamo code points, in
/// the order used by the precomposed syllable block. jongseong[0] is 0.
struct JamoInventory {
  std::array<char32_t, kChoseongCount> choseong;
  std::array<char32_t, kJungseongCount> jungseong;
  std::array<char32_t, kJongseongCount> jongseong;
};

const JamoInventory& inventory();

/// One syllable as (initial, medial, final) slot indices.
struct SyllableBlock {
  int cho = 0;
  int jung = 0;
  int jong = 0;

  bool has_final() const { return jong != 0; }
  auto operator<=>(const SyllableBlock&) const = default;
};

enum class VowelClass { Vertical, Horizontal, Complex };

const char* to_string(VowelClass kind);

bool is_syllable(char32_t ch);
bool is_compat_consonant(char32_t ch);
bool is_compat_vowel(char32_t ch);
inline bool is_compat_jamo(char32_t ch) { return is_compat_consonant(ch) || is_compat_vowel(ch); }
/// Precomposed syllable or standalone compatibility letter.
inline bool is_hangul(char32_t ch) { return is_syllable(ch) || is_compat_jamo(ch); }

std::optional<SyllableBlock> decompose(char32_t ch);

/// Throws InvalidBlockError when an index is outside its inventory.
char32_t compose(const SyllableBlock& block);

/// Throws IndexError when jung is outside [0, 21).
VowelClass classify_vowel(int jung);

std::optional<int> choseong_index(char32_t letter);
std::optional<int> jungseong_index(char32_t letter);
/// Index 1..27 for a final-capable consonant letter; never returns 0.
std::optional<int> jongseong_index(char32_t letter);

/// Letter sequence of a syllable (initial, medial and the final if any).
std::u32string letters(const SyllableBlock& block);

}  // namespace scriptkit::hangul
