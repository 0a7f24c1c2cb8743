#include "sifrian/params_io.hpp"

#include <bit>
#include <cstring>
#include <fstream>
#include <iterator>
#include <string>
#include <type_traits>

#include "sifrian/errors.hpp"

namespace sifrian {

namespace {

constexpr char kMagic[8] = {'S', 'I', 'F', 'P', 'A', 'R', 'A', 'M'};

template <typename T>
void put_le(std::vector<std::uint8_t>& out, T value) {
  std::uint64_t bits = 0;
  if constexpr (std::is_same_v<T, double>) bits = std::bit_cast<std::uint64_t>(value);
  else bits = static_cast<std::uint64_t>(value);
  for (std::size_t i = 0; i < sizeof(T); ++i)
    out.push_back(static_cast<std::uint8_t>(bits >> (8 * i)));
}

class Reader {
 public:
  explicit Reader(const std::vector<std::uint8_t>& b) : b_(b) {}

  template <typename T>
  T get() {
    if (at_ + sizeof(T) > b_.size()) throw Error("params file is truncated");
    std::uint64_t bits = 0;
    for (std::size_t i = 0; i < sizeof(T); ++i)
      bits |= std::uint64_t{b_[at_ + i]} << (8 * i);
    at_ += sizeof(T);
    if constexpr (std::is_same_v<T, double>) return std::bit_cast<double>(bits);
    else return static_cast<T>(bits);
  }

  bool done() const { return at_ == b_.size(); }
  std::size_t remaining() const { return b_.size() - at_; }

 private:
  const std::vector<std::uint8_t>& b_;
  std::size_t at_ = 0;
};

}  // namespace

std::vector<std::uint8_t> serialize_params(const NetworkParams& params) {
  params.validate();
  std::vector<std::uint8_t> out(kMagic, kMagic + 8);
  put_le<std::uint32_t>(out, kParamsVersion);
  put_le<std::uint32_t>(out, static_cast<std::uint32_t>(params.activation.kind));
  put_le<double>(out, params.activation.slope);
  put_le<std::uint32_t>(out, static_cast<std::uint32_t>(params.white_layers));
  put_le<std::uint32_t>(out, static_cast<std::uint32_t>(params.sizes.size()));
  for (std::size_t s : params.sizes) put_le<std::uint64_t>(out, s);
  for (std::size_t i = 0; i < params.layers(); ++i) {
    for (double w : params.weights[i].span()) put_le<double>(out, w);
    for (double b : params.biases[i]) put_le<double>(out, b);
  }
  return out;
}

NetworkParams deserialize_params(const std::vector<std::uint8_t>& bytes) {
  if (bytes.size() < 8 || std::memcmp(bytes.data(), kMagic, 8) != 0)
    throw Error("not a params file (bad magic)");
  Reader h(bytes);
  h.get<std::uint64_t>();  // magic
  const auto version = h.get<std::uint32_t>();
  if (version != kParamsVersion)
    throw Error("unsupported params version " + std::to_string(version));
  const auto kind = h.get<std::uint32_t>();
  if (kind > static_cast<std::uint32_t>(ActivationKind::identity))
    throw Error("unknown activation code " + std::to_string(kind));
  NetworkParams p;
  p.activation.kind = static_cast<ActivationKind>(kind);
  p.activation.slope = h.get<double>();
  p.white_layers = h.get<std::uint32_t>();
  const auto m = h.get<std::uint32_t>();
  if (m < 2) throw Error("params file lists fewer than two sizes");
  for (std::uint32_t i = 0; i < m; ++i) p.sizes.push_back(h.get<std::uint64_t>());
  std::size_t doubles = 0;
  for (std::size_t i = 0; i + 1 < p.sizes.size(); ++i)
    doubles += p.sizes[i + 1] * (p.sizes[i] + 1);
  if (doubles * sizeof(double) != h.remaining())
    throw Error("params payload has " + std::to_string(h.remaining()) +
                " bytes, sizes imply " + std::to_string(doubles * sizeof(double)));
  for (std::size_t i = 0; i + 1 < p.sizes.size(); ++i) {
    Matrix w(p.sizes[i + 1], p.sizes[i]);
    for (double& x : w.span()) x = h.get<double>();
    Vector b(p.sizes[i + 1]);
    for (double& x : b) x = h.get<double>();
    p.weights.push_back(std::move(w));
    p.biases.push_back(std::move(b));
  }
  p.validate();
  return p;
}

void save_params(const NetworkParams& params, const std::filesystem::path& path) {
  const auto bytes = serialize_params(params);
  std::ofstream out(path, std::ios::binary | std::ios::trunc);
  if (!out) throw Error("cannot write " + path.string());
  out.write(reinterpret_cast<const char*>(bytes.data()),
            static_cast<std::streamsize>(bytes.size()));
  if (!out) throw Error("short write to " + path.string());
}

NetworkParams load_params(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw Error("cannot open " + path.string());
  std::vector<std::uint8_t> bytes((std::istreambuf_iterator<char>(in)),
                                  std::istreambuf_iterator<char>());
  return deserialize_params(bytes);
}

}  // namespace sifrian
