#pragma once

// IDX (MNIST-style) image and label files.

#include <cstddef>
#include <cstdint>
#include <filesystem>
#include <vector>

#include "sifrian/errors.hpp"
#include "sifrian/tensor.hpp"

namespace sifrian {

class BadMagic : public Error {
 public:
  using Error::Error;
};
class Truncated : public Error {
 public:
  using Error::Error;
};
class TrailingBytes : public Error {
 public:
  using Error::Error;
};
/// A label byte outside 0..9.
class LabelRange : public Error {
 public:
  using Error::Error;
};
class CountMismatch : public Error {
 public:
  using Error::Error;
};

inline constexpr std::uint32_t kIdxImageMagic = 0x00000803;
inline constexpr std::uint32_t kIdxLabelMagic = 0x00000801;
inline constexpr std::size_t kClasses = 10;

struct RawImages {
  std::size_t rows = 0;
  std::size_t cols = 0;
  /// count * rows * cols bytes, row-major per image.
  std::vector<std::uint8_t> pixels;

  std::size_t count() const {
    return rows * cols == 0 ? 0 : pixels.size() / (rows * cols);
  }
  bool operator==(const RawImages&) const = default;
};

RawImages parse_idx_images(const std::vector<std::uint8_t>& bytes);
std::vector<std::uint8_t> parse_idx_labels(const std::vector<std::uint8_t>& bytes);

std::vector<std::uint8_t> serialize_idx_images(const RawImages& images);
std::vector<std::uint8_t> serialize_idx_labels(const std::vector<std::uint8_t>& labels);

struct Dataset {
  std::vector<Vector> images;
  std::vector<std::uint8_t> labels;

  std::size_t size() const noexcept { return labels.size(); }
  /// Length-10 target with a 1 at the label.
  Vector one_hot(std::size_t i) const;
};

/// Pixels scaled by 1/255 and paired with labels.  Throws CountMismatch.
Dataset normalize(const RawImages& images, const std::vector<std::uint8_t>& labels);

/// Whole file contents, gunzipped when the file starts with 1f 8b.
std::vector<std::uint8_t> read_file_bytes(const std::filesystem::path& path);

Dataset load_dataset(const std::filesystem::path& images,
                     const std::filesystem::path& labels);

/// First `count` items (all of them if count is 0 or larger than the set).
Dataset head(const Dataset& d, std::size_t count);

}  // namespace sifrian
