#pragma once

// Binary parameter files.  All integers and floats are little-endian:
//
//   char[8]  magic "SIFPARAM"
//   u32      format version (1)
//   u32      activation kind (0 leaky-relu, 1 relu, 2 sigmoid, 3 tanh, 4 identity)
//   f64      activation slope
//   u32      white layers
//   u32      number of sizes m
//   u64[m]   layer sizes d_0 .. d_n
//   per layer k = 1..n: f64[d_k * d_{k-1}] W(k) row-major, then f64[d_k] beta(k)

#include <cstdint>
#include <filesystem>
#include <vector>

#include "sifrian/network.hpp"

namespace sifrian {

inline constexpr std::uint32_t kParamsVersion = 1;

std::vector<std::uint8_t> serialize_params(const NetworkParams& params);
/// Throws Error on a bad magic, unknown version, or size mismatch.
NetworkParams deserialize_params(const std::vector<std::uint8_t>& bytes);

void save_params(const NetworkParams& params, const std::filesystem::path& path);
NetworkParams load_params(const std::filesystem::path& path);

}  // namespace sifrian
