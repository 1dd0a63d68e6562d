#pragma once

#include <cstdint>
#include <filesystem>
#include <map>
#include <string>
#include <vector>

#include "scriptkit/tensor.hpp"

// Binary layout, all integers little-endian:
//   "SCRIPTKT" | u32 version | u64 seed
//   u32 meta_count  { u32 len, key bytes, u32 len, value bytes }
//   u32 tensor_count { u32 len, name bytes, u32 rank, u64 dims[rank], u8 trainable }
//   raw little-endian IEEE-754 doubles of every tensor, in table order
namespace scriptkit {

inline constexpr std::uint32_t kCheckpointVersion = 1;

struct CheckpointTensor {
  std::string name;
  Shape shape;
  bool trainable = true;
  std::vector<double> values;
};

struct Checkpoint {
  std::uint32_t version = kCheckpointVersion;
  std::uint64_t seed = 0;
  std::map<std::string, std::string> meta;
  std::vector<CheckpointTensor> tensors;

  static Checkpoint capture(const ParamGroup& params, std::uint64_t seed,
                            std::map<std::string, std::string> meta = {});

  std::string serialize() const;
  /// Throws ParseError (line 0) on a bad magic, version or truncated data.
  static Checkpoint deserialize(std::string_view bytes);

  void save(const std::filesystem::path& path) const;
  static Checkpoint load(const std::filesystem::path& path);

  /// Copies values into params by name. Throws ConfigError when names,
  /// order or shapes differ. Trainability flags are restored too.
  void load_into(ParamGroup& params) const;
};

}  // namespace scriptkit
