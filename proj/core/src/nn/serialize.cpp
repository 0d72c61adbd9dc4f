#include "fedload/nn/serialize.hpp"

#include <bit>
#include <cstring>
#include <fstream>
#include <iterator>

#include "fedload/common/error.hpp"

namespace fedload::nn {
namespace {

constexpr char kMagic[4] = {'F', 'L', 'D', 'B'};
constexpr std::uint32_t kVersion = 1;

template <class T>
void put_le(Blob& out, T value) {
  for (std::size_t i = 0; i < sizeof(T); ++i) {
    out.push_back(static_cast<std::uint8_t>(value >> (8 * i)));
  }
}

class Reader {
 public:
  explicit Reader(std::span<const std::uint8_t> data) : data_(data) {}

  template <class T>
  T get_le() {
    need(sizeof(T));
    T value = 0;
    for (std::size_t i = 0; i < sizeof(T); ++i) {
      value |= static_cast<T>(data_[pos_ + i]) << (8 * i);
    }
    pos_ += sizeof(T);
    return value;
  }

  std::string get_string(std::size_t n) {
    need(n);
    std::string s(reinterpret_cast<const char*>(data_.data() + pos_), n);
    pos_ += n;
    return s;
  }

  std::size_t position() const { return pos_; }
  std::size_t remaining() const { return data_.size() - pos_; }

 private:
  void need(std::size_t n) const {
    if (pos_ + n > data_.size()) throw DataError("parameter blob truncated");
  }

  std::span<const std::uint8_t> data_;
  std::size_t pos_ = 0;
};

void check_width(int bytes_per_param) {
  if (bytes_per_param != 4 && bytes_per_param != 8) {
    throw ContractError("bytes_per_param must be 4 or 8, got " +
                        std::to_string(bytes_per_param));
  }
}

}  // namespace

Blob serialize_blocks(const ConstParamBlocks& blocks, int bytes_per_param) {
  check_width(bytes_per_param);
  Blob out(std::begin(kMagic), std::end(kMagic));
  put_le<std::uint32_t>(out, kVersion);
  put_le<std::uint32_t>(out, static_cast<std::uint32_t>(bytes_per_param));
  put_le<std::uint32_t>(out, static_cast<std::uint32_t>(blocks.size()));
  for (const auto& block : blocks) {
    put_le<std::uint32_t>(out, static_cast<std::uint32_t>(block.name.size()));
    out.insert(out.end(), block.name.begin(), block.name.end());
    put_le<std::uint32_t>(out, static_cast<std::uint32_t>(block.tensor->rank()));
    for (std::size_t dim : block.tensor->shape()) put_le<std::uint64_t>(out, dim);
  }
  for (const auto& block : blocks) {
    for (double v : block.tensor->values()) {
      if (bytes_per_param == 8) {
        put_le<std::uint64_t>(out, std::bit_cast<std::uint64_t>(v));
      } else {
        put_le<std::uint32_t>(out, std::bit_cast<std::uint32_t>(static_cast<float>(v)));
      }
    }
  }
  return out;
}

BlobInfo inspect_blob(std::span<const std::uint8_t> blob) {
  Reader in(blob);
  if (in.get_string(4) != std::string(kMagic, 4)) throw DataError("not a parameter blob");
  const auto version = in.get_le<std::uint32_t>();
  if (version != kVersion) {
    throw DataError("unsupported parameter blob version " + std::to_string(version));
  }
  BlobInfo info;
  info.bytes_per_param = static_cast<int>(in.get_le<std::uint32_t>());
  if (info.bytes_per_param != 4 && info.bytes_per_param != 8) {
    throw DataError("invalid bytes_per_param in blob");
  }
  const auto count = in.get_le<std::uint32_t>();
  std::size_t values = 0;
  for (std::uint32_t i = 0; i < count; ++i) {
    const auto name_len = in.get_le<std::uint32_t>();
    std::string name = in.get_string(name_len);
    const auto rank = in.get_le<std::uint32_t>();
    Shape shape(rank);
    for (auto& d : shape) d = static_cast<std::size_t>(in.get_le<std::uint64_t>());
    values += shape_size(shape);
    info.blocks.emplace_back(std::move(name), std::move(shape));
  }
  info.header_bytes = in.position();
  info.payload_bytes = values * static_cast<std::size_t>(info.bytes_per_param);
  if (in.remaining() != info.payload_bytes) {
    throw DataError("parameter blob body is " + std::to_string(in.remaining()) +
                    " bytes, header declares " + std::to_string(info.payload_bytes));
  }
  return info;
}

void deserialize_blocks(std::span<const std::uint8_t> blob, const ParamBlocks& into) {
  const BlobInfo info = inspect_blob(blob);
  if (info.blocks.size() != into.size()) {
    throw DataError("parameter blob has " + std::to_string(info.blocks.size()) +
                    " blocks, model expects " + std::to_string(into.size()));
  }
  for (std::size_t i = 0; i < into.size(); ++i) {
    if (info.blocks[i].first != into[i].name ||
        info.blocks[i].second != into[i].tensor->shape()) {
      throw DataError("parameter blob block '" + info.blocks[i].first + "' " +
                      shape_string(info.blocks[i].second) + " does not match '" +
                      into[i].name + "' " + shape_string(into[i].tensor->shape()));
    }
  }
  Reader in(blob.subspan(info.header_bytes));
  for (const auto& block : into) {
    for (double& v : block.tensor->values()) {
      if (info.bytes_per_param == 8) {
        v = std::bit_cast<double>(in.get_le<std::uint64_t>());
      } else {
        v = static_cast<double>(std::bit_cast<float>(in.get_le<std::uint32_t>()));
      }
    }
  }
}

void write_blob_file(const std::filesystem::path& path, const Blob& blob) {
  std::ofstream out(path, std::ios::binary | std::ios::trunc);
  if (!out) throw DataError("cannot open " + path.string() + " for writing");
  out.write(reinterpret_cast<const char*>(blob.data()),
            static_cast<std::streamsize>(blob.size()));
  if (!out) throw DataError("failed writing " + path.string());
}

Blob read_blob_file(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw DataError("cannot open " + path.string());
  return Blob(std::istreambuf_iterator<char>(in), std::istreambuf_iterator<char>());
}

}  // namespace fedload::nn
