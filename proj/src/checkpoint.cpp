#include "scriptkit/checkpoint.hpp"

#include <bit>
#include <cstring>

#include "scriptkit/error.hpp"
#include "scriptkit/io.hpp"

namespace scriptkit {

namespace {

constexpr char kMagic[8] = {'S', 'C', 'R', 'I', 'P', 'T', 'K', 'T'};

template <typename T>
void put_le(std::string& out, T value) {
  for (std::size_t i = 0; i < sizeof(T); ++i) out.push_back(static_cast<char>((value >> (8 * i)) & 0xFF));
}

void put_string(std::string& out, const std::string& s) {
  put_le<std::uint32_t>(out, static_cast<std::uint32_t>(s.size()));
  out += s;
}

class Reader {
 public:
  explicit Reader(std::string_view bytes) : bytes_(bytes) {}

  template <typename T>
  T le() {
    need(sizeof(T));
    T value = 0;
    for (std::size_t i = 0; i < sizeof(T); ++i) {
      value |= static_cast<T>(static_cast<unsigned char>(bytes_[pos_ + i])) << (8 * i);
    }
    pos_ += sizeof(T);
    return value;
  }

  std::string str() {
    const auto len = le<std::uint32_t>();
    need(len);
    std::string s(bytes_.substr(pos_, len));
    pos_ += len;
    return s;
  }

  std::string_view raw(std::size_t n) {
    need(n);
    auto s = bytes_.substr(pos_, n);
    pos_ += n;
    return s;
  }

  bool done() const { return pos_ == bytes_.size(); }

 private:
  void need(std::size_t n) const {
    if (bytes_.size() - pos_ < n) throw ParseError("checkpoint truncated at byte " + std::to_string(pos_), 0);
  }

  std::string_view bytes_;
  std::size_t pos_ = 0;
};

}  // namespace

Checkpoint Checkpoint::capture(const ParamGroup& params, std::uint64_t seed,
                               std::map<std::string, std::string> meta) {
  Checkpoint ck;
  ck.seed = seed;
  ck.meta = std::move(meta);
  for (const auto& entry : params) {
    const auto v = std::as_const(*entry.tensor).values();
    ck.tensors.push_back({entry.name, entry.tensor->shape(), entry.trainable, {v.begin(), v.end()}});
  }
  return ck;
}

std::string Checkpoint::serialize() const {
  std::string out(kMagic, sizeof(kMagic));
  put_le<std::uint32_t>(out, version);
  put_le<std::uint64_t>(out, seed);
  put_le<std::uint32_t>(out, static_cast<std::uint32_t>(meta.size()));
  for (const auto& [key, value] : meta) {
    put_string(out, key);
    put_string(out, value);
  }
  put_le<std::uint32_t>(out, static_cast<std::uint32_t>(tensors.size()));
  for (const auto& t : tensors) {
    put_string(out, t.name);
    put_le<std::uint32_t>(out, static_cast<std::uint32_t>(t.shape.size()));
    for (auto d : t.shape) put_le<std::uint64_t>(out, d);
    out.push_back(t.trainable ? 1 : 0);
  }
  for (const auto& t : tensors) {
    for (double v : t.values) put_le<std::uint64_t>(out, std::bit_cast<std::uint64_t>(v));
  }
  return out;
}

Checkpoint Checkpoint::deserialize(std::string_view bytes) {
  Reader in(bytes);
  if (in.raw(sizeof(kMagic)) != std::string_view(kMagic, sizeof(kMagic))) {
    throw ParseError("not a checkpoint (bad magic)", 0);
  }
  Checkpoint ck;
  ck.version = in.le<std::uint32_t>();
  if (ck.version != kCheckpointVersion) {
    throw ParseError("unsupported checkpoint version " + std::to_string(ck.version), 0);
  }
  ck.seed = in.le<std::uint64_t>();
  const auto meta_count = in.le<std::uint32_t>();
  for (std::uint32_t i = 0; i < meta_count; ++i) {
    std::string key = in.str();
    ck.meta[std::move(key)] = in.str();
  }
  const auto count = in.le<std::uint32_t>();
  for (std::uint32_t i = 0; i < count; ++i) {
    CheckpointTensor t;
    t.name = in.str();
    const auto rank = in.le<std::uint32_t>();
    std::size_t volume = 1;
    for (std::uint32_t r = 0; r < rank; ++r) {
      t.shape.push_back(static_cast<std::size_t>(in.le<std::uint64_t>()));
      volume *= t.shape.back();
    }
    t.trainable = in.le<std::uint8_t>() != 0;
    t.values.resize(volume);
    ck.tensors.push_back(std::move(t));
  }
  for (auto& t : ck.tensors) {
    for (double& v : t.values) v = std::bit_cast<double>(in.le<std::uint64_t>());
  }
  if (!in.done()) throw ParseError("trailing bytes after checkpoint data", 0);
  return ck;
}

void Checkpoint::save(const std::filesystem::path& path) const { io::write_atomic(path, serialize()); }

Checkpoint Checkpoint::load(const std::filesystem::path& path) { return deserialize(io::read_file(path)); }

void Checkpoint::load_into(ParamGroup& params) const {
  if (params.size() != tensors.size()) {
    throw ConfigError("checkpoint has " + std::to_string(tensors.size()) + " tensors, model expects " +
                      std::to_string(params.size()));
  }
  std::size_t i = 0;
  for (const auto& entry : params) {
    const auto& t = tensors[i++];
    if (t.name != entry.name || t.shape != entry.tensor->shape()) {
      throw ConfigError("checkpoint tensor '" + t.name + "' " + shape_string(t.shape) + " does not match '" +
                        entry.name + "' " + shape_string(entry.tensor->shape()));
    }
  }
  i = 0;
  for (const auto& entry : params) {
    const auto& t = tensors[i++];
    std::copy(t.values.begin(), t.values.end(), entry.tensor->values().begin());
    params.set_trainable(entry.name, t.trainable);
  }
}

}  // namespace scriptkit
