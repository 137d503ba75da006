#pragma once

#include <cstdint>
#include <filesystem>
#include <string>
#include <vector>

#include "fencenet/tensor.hpp"

namespace fencenet {

template <typename T>
struct NamedParameter {
  std::string name;
  Tensor<T> tensor;
};

template <typename T>
using ParameterList = std::vector<NamedParameter<T>>;

// Parameter file layout, all integers little-endian:
//
//   magic    8 bytes  "FNPARAMS"
//   version  u32      kParamFormatVersion
//   count    u32      number of records
//   record * count:
//     name_len u32, name bytes (UTF-8, no terminator)
//     dtype    u8   (1 = float32, 2 = float64)
//     rank     u32, dims u64 * rank
//     data     numel * sizeof(dtype) bytes, IEEE-754 little-endian, row-major
inline constexpr std::uint32_t kParamFormatVersion = 1;

template <typename T>
void save_parameters(const std::filesystem::path& path, const ParameterList<T>& params);

// Reads a parameter file in file order.
template <typename T>
ParameterList<T> load_parameters(const std::filesystem::path& path);

// Copies loaded values into existing parameters, matching by name and shape.
// Throws DimensionError on any missing, extra or mis-shaped entry.
template <typename T>
void assign_parameters(ParameterList<T>& target, const ParameterList<T>& loaded);

// FNV-1a over the raw bytes of every parameter, in order.
template <typename T>
std::uint64_t parameter_checksum(const ParameterList<T>& params);

}  // namespace fencenet
