#include "fencenet/param_io.hpp"

#include <bit>
#include <cstring>
#include <fstream>
#include <unordered_map>

#include "fencenet/errors.hpp"

namespace fencenet {
namespace {

constexpr char kMagic[8] = {'F', 'N', 'P', 'A', 'R', 'A', 'M', 'S'};

static_assert(std::endian::native == std::endian::little,
              "parameter files are written in native order; big-endian hosts need byte swapping");

template <typename T>
constexpr std::uint8_t dtype_code() {
  return sizeof(T) == 4 ? 1 : 2;
}

template <typename V>
void write_raw(std::ofstream& out, const V& value) {
  out.write(reinterpret_cast<const char*>(&value), sizeof(V));
}

template <typename V>
V read_raw(std::ifstream& in, const std::filesystem::path& path) {
  V value{};
  in.read(reinterpret_cast<char*>(&value), sizeof(V));
  if (!in) throw DataError("truncated parameter file " + path.string());
  return value;
}

}  // namespace

template <typename T>
void save_parameters(const std::filesystem::path& path, const ParameterList<T>& params) {
  std::ofstream out(path, std::ios::binary | std::ios::trunc);
  if (!out) throw DataError("cannot write parameter file " + path.string());
  out.write(kMagic, sizeof(kMagic));
  write_raw(out, kParamFormatVersion);
  write_raw(out, static_cast<std::uint32_t>(params.size()));
  for (const auto& p : params) {
    write_raw(out, static_cast<std::uint32_t>(p.name.size()));
    out.write(p.name.data(), static_cast<std::streamsize>(p.name.size()));
    write_raw(out, dtype_code<T>());
    write_raw(out, static_cast<std::uint32_t>(p.tensor.rank()));
    for (auto d : p.tensor.shape()) write_raw(out, static_cast<std::uint64_t>(d));
    out.write(reinterpret_cast<const char*>(p.tensor.data().data()),
              static_cast<std::streamsize>(p.tensor.numel() * sizeof(T)));
  }
  if (!out) throw DataError("failed writing parameter file " + path.string());
}

template <typename T>
ParameterList<T> load_parameters(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw DataError("cannot open parameter file " + path.string());
  char magic[8];
  in.read(magic, sizeof(magic));
  if (!in || std::memcmp(magic, kMagic, sizeof(kMagic)) != 0) {
    throw DataError(path.string() + " is not a parameter file");
  }
  const auto version = read_raw<std::uint32_t>(in, path);
  if (version != kParamFormatVersion) {
    throw DataError("unsupported parameter format version " + std::to_string(version));
  }
  const auto count = read_raw<std::uint32_t>(in, path);
  ParameterList<T> params;
  params.reserve(count);
  for (std::uint32_t i = 0; i < count; ++i) {
    const auto name_len = read_raw<std::uint32_t>(in, path);
    std::string name(name_len, '\0');
    in.read(name.data(), name_len);
    const auto dtype = read_raw<std::uint8_t>(in, path);
    if (dtype != dtype_code<T>()) {
      throw DimensionError("parameter " + name + " has dtype code " + std::to_string(dtype) +
                           ", expected " + std::to_string(dtype_code<T>()));
    }
    const auto rank = read_raw<std::uint32_t>(in, path);
    Shape shape(rank);
    for (auto& d : shape) d = static_cast<std::size_t>(read_raw<std::uint64_t>(in, path));
    std::vector<T> values(shape_numel(shape));
    in.read(reinterpret_cast<char*>(values.data()), static_cast<std::streamsize>(values.size() * sizeof(T)));
    if (!in) throw DataError("truncated parameter file " + path.string());
    params.push_back({std::move(name), Tensor<T>::from(std::move(shape), std::move(values), true)});
  }
  return params;
}

template <typename T>
void assign_parameters(ParameterList<T>& target, const ParameterList<T>& loaded) {
  std::unordered_map<std::string, const Tensor<T>*> by_name;
  for (const auto& p : loaded) by_name.emplace(p.name, &p.tensor);
  if (by_name.size() != target.size()) {
    throw DimensionError("checkpoint has " + std::to_string(by_name.size()) + " parameters, model has " +
                         std::to_string(target.size()));
  }
  for (auto& p : target) {
    auto it = by_name.find(p.name);
    if (it == by_name.end()) throw DimensionError("checkpoint is missing parameter " + p.name);
    if (it->second->shape() != p.tensor.shape()) {
      throw DimensionError("parameter " + p.name + " has shape " + shape_string(it->second->shape()) +
                           " in checkpoint but " + shape_string(p.tensor.shape()) + " in model");
    }
    auto dst = p.tensor.mutable_data();
    auto src = it->second->data();
    std::copy(src.begin(), src.end(), dst.begin());
  }
}

template <typename T>
std::uint64_t parameter_checksum(const ParameterList<T>& params) {
  std::uint64_t hash = 1469598103934665603ULL;
  for (const auto& p : params) {
    const auto* bytes = reinterpret_cast<const unsigned char*>(p.tensor.data().data());
    for (std::size_t i = 0; i < p.tensor.numel() * sizeof(T); ++i) {
      hash ^= bytes[i];
      hash *= 1099511628211ULL;
    }
  }
  return hash;
}

template void save_parameters(const std::filesystem::path&, const ParameterList<float>&);
template void save_parameters(const std::filesystem::path&, const ParameterList<double>&);
template ParameterList<float> load_parameters(const std::filesystem::path&);
template ParameterList<double> load_parameters(const std::filesystem::path&);
template void assign_parameters(ParameterList<float>&, const ParameterList<float>&);
template void assign_parameters(ParameterList<double>&, const ParameterList<double>&);
template std::uint64_t parameter_checksum(const ParameterList<float>&);
template std::uint64_t parameter_checksum(const ParameterList<double>&);

}  // namespace fencenet
