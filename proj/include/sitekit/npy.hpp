#pragma once

#include <cstdint>
#include <filesystem>
#include <span>
#include <stdexcept>
#include <string>
#include <vector>

#include "sitekit/core.hpp"

namespace sitekit::io {

enum class NpyErrc {
  io_error = 1,
  bad_magic,
  unsupported_version,
  bad_header,
  unsupported_dtype,
  fortran_order,
  truncated,
  bad_shape,
};

class NpyError : public std::runtime_error {
 public:
  NpyError(NpyErrc code, const std::string& what) : std::runtime_error(what), code_(code) {}
  NpyErrc code() const { return code_; }

 private:
  NpyErrc code_;
};

enum class DType { f4, f8, i4, i8 };

std::string_view descr(DType t);
std::size_t item_size(DType t);

// A decoded NPY v1.0 array. `data` holds the raw little-endian payload.
struct NpyArray {
  DType dtype = DType::f8;
  std::vector<std::size_t> shape;
  std::vector<std::uint8_t> data;

  std::size_t size() const;
};

NpyArray read_npy(const std::filesystem::path& path);
NpyArray parse_npy(std::span<const std::uint8_t> bytes);

// v1.0 file with the header padded so that the payload starts on a 64-byte
// boundary, laid out exactly as numpy writes it.
std::vector<std::uint8_t> encode_npy(const NpyArray& array);
void write_npy(const std::filesystem::path& path, const NpyArray& array);

// 2-D float array (f4 or f8) widened to double.
Matrix read_matrix(const std::filesystem::path& path);
// 1-D integer array (i4 or i8).
std::vector<std::int64_t> read_labels(const std::filesystem::path& path);

// dtype must be f4 or f8; f4 narrows each value.
NpyArray matrix_array(const Matrix& m, DType dtype = DType::f8);
// dtype must be i4 or i8.
NpyArray labels_array(std::span<const std::int64_t> labels, DType dtype = DType::i8);

void write_matrix(const std::filesystem::path& path, const Matrix& m, DType dtype = DType::f8);
void write_labels(const std::filesystem::path& path, std::span<const std::int64_t> labels,
                  DType dtype = DType::i8);

}  // namespace sitekit::io
