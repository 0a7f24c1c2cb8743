#include "sifrian/data.hpp"

#include <zlib.h>

#include <fstream>
#include <iterator>
#include <string>

namespace sifrian {

namespace {

std::uint32_t read_be32(const std::vector<std::uint8_t>& b, std::size_t at) {
  return (std::uint32_t{b[at]} << 24) | (std::uint32_t{b[at + 1]} << 16) |
         (std::uint32_t{b[at + 2]} << 8) | std::uint32_t{b[at + 3]};
}

void write_be32(std::vector<std::uint8_t>& out, std::uint32_t v) {
  out.push_back(static_cast<std::uint8_t>(v >> 24));
  out.push_back(static_cast<std::uint8_t>(v >> 16));
  out.push_back(static_cast<std::uint8_t>(v >> 8));
  out.push_back(static_cast<std::uint8_t>(v));
}

std::string hex(std::uint32_t v) {
  char buf[11];
  std::snprintf(buf, sizeof buf, "0x%08x", v);
  return buf;
}

void check_header(const std::vector<std::uint8_t>& bytes, std::size_t header,
                  std::uint32_t magic) {
  if (bytes.size() < 4) throw Truncated("IDX file shorter than its magic number");
  const std::uint32_t got = read_be32(bytes, 0);
  if (got != magic)
    throw BadMagic("IDX magic " + hex(got) + ", expected " + hex(magic));
  if (bytes.size() < header)
    throw Truncated("IDX header needs " + std::to_string(header) + " bytes, have " +
                    std::to_string(bytes.size()));
}

void check_payload(std::size_t have, std::size_t need) {
  if (have < need)
    throw Truncated("IDX payload has " + std::to_string(have) + " bytes, expected " +
                    std::to_string(need));
  if (have > need)
    throw TrailingBytes(std::to_string(have - need) + " bytes after the IDX payload");
}

}  // namespace

RawImages parse_idx_images(const std::vector<std::uint8_t>& bytes) {
  check_header(bytes, 16, kIdxImageMagic);
  RawImages img;
  const std::size_t count = read_be32(bytes, 4);
  img.rows = read_be32(bytes, 8);
  img.cols = read_be32(bytes, 12);
  check_payload(bytes.size() - 16, count * img.rows * img.cols);
  img.pixels.assign(bytes.begin() + 16, bytes.end());
  return img;
}

std::vector<std::uint8_t> parse_idx_labels(const std::vector<std::uint8_t>& bytes) {
  check_header(bytes, 8, kIdxLabelMagic);
  const std::size_t count = read_be32(bytes, 4);
  check_payload(bytes.size() - 8, count);
  std::vector<std::uint8_t> labels(bytes.begin() + 8, bytes.end());
  for (std::size_t i = 0; i < labels.size(); ++i)
    if (labels[i] >= kClasses)
      throw LabelRange("label " + std::to_string(labels[i]) + " at index " +
                       std::to_string(i) + " is outside 0..9");
  return labels;
}

std::vector<std::uint8_t> serialize_idx_images(const RawImages& images) {
  std::vector<std::uint8_t> out;
  out.reserve(16 + images.pixels.size());
  write_be32(out, kIdxImageMagic);
  write_be32(out, static_cast<std::uint32_t>(images.count()));
  write_be32(out, static_cast<std::uint32_t>(images.rows));
  write_be32(out, static_cast<std::uint32_t>(images.cols));
  out.insert(out.end(), images.pixels.begin(), images.pixels.end());
  return out;
}

std::vector<std::uint8_t> serialize_idx_labels(const std::vector<std::uint8_t>& labels) {
  std::vector<std::uint8_t> out;
  out.reserve(8 + labels.size());
  write_be32(out, kIdxLabelMagic);
  write_be32(out, static_cast<std::uint32_t>(labels.size()));
  out.insert(out.end(), labels.begin(), labels.end());
  return out;
}

Vector Dataset::one_hot(std::size_t i) const {
  Vector v(kClasses);
  v[labels.at(i)] = 1.0;
  return v;
}

Dataset normalize(const RawImages& images, const std::vector<std::uint8_t>& labels) {
  if (images.count() != labels.size())
    throw CountMismatch(std::to_string(images.count()) + " images but " +
                        std::to_string(labels.size()) + " labels");
  Dataset d;
  d.labels = labels;
  const std::size_t px = images.rows * images.cols;
  d.images.reserve(labels.size());
  for (std::size_t i = 0; i < labels.size(); ++i) {
    Vector v(px);
    for (std::size_t j = 0; j < px; ++j) v[j] = images.pixels[i * px + j] / 255.0;
    d.images.push_back(std::move(v));
  }
  return d;
}

std::vector<std::uint8_t> read_file_bytes(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw Error("cannot open " + path.string());
  std::vector<std::uint8_t> raw((std::istreambuf_iterator<char>(in)),
                                std::istreambuf_iterator<char>());
  if (raw.size() < 2 || raw[0] != 0x1f || raw[1] != 0x8b) return raw;

  gzFile gz = gzopen(path.string().c_str(), "rb");
  if (!gz) throw Error("cannot open gzip stream " + path.string());
  std::vector<std::uint8_t> out;
  std::uint8_t buf[1 << 16];
  int got = 0;
  while ((got = gzread(gz, buf, sizeof buf)) > 0) out.insert(out.end(), buf, buf + got);
  const bool failed = got < 0;
  gzclose(gz);
  if (failed) throw Truncated("corrupt gzip stream in " + path.string());
  return out;
}

Dataset load_dataset(const std::filesystem::path& images,
                     const std::filesystem::path& labels) {
  return normalize(parse_idx_images(read_file_bytes(images)),
                   parse_idx_labels(read_file_bytes(labels)));
}

Dataset head(const Dataset& d, std::size_t count) {
  if (count == 0 || count >= d.size()) return d;
  Dataset out;
  out.images.assign(d.images.begin(), d.images.begin() + count);
  out.labels.assign(d.labels.begin(), d.labels.begin() + count);
  return out;
}

}  // namespace sifrian
