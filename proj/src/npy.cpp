#include "sitekit/npy.hpp"

#include <algorithm>
#include <bit>
#include <cstring>
#include <fstream>
#include <iterator>
#include <regex>

namespace sitekit::io {

static_assert(std::endian::native == std::endian::little,
              "NPY payloads are read and written as little-endian");

namespace {

constexpr std::uint8_t kMagic[] = {0x93, 'N', 'U', 'M', 'P', 'Y'};
constexpr std::size_t kPrelude = 10;  // magic + version + header length
constexpr std::size_t kAlign = 64;

DType parse_descr(const std::string& s) {
  for (DType t : {DType::f4, DType::f8, DType::i4, DType::i8})
    if (descr(t) == s) return t;
  throw NpyError(NpyErrc::unsupported_dtype, "unsupported NPY dtype '" + s + "'");
}

std::string shape_literal(const std::vector<std::size_t>& shape) {
  std::string s = "(";
  for (std::size_t i = 0; i < shape.size(); ++i) {
    if (i) s += ", ";
    s += std::to_string(shape[i]);
  }
  if (shape.size() == 1) s += ",";
  return s + ")";
}

std::vector<std::size_t> parse_shape(const std::string& body) {
  std::vector<std::size_t> shape;
  std::size_t pos = 0;
  while (pos < body.size()) {
    while (pos < body.size() && (body[pos] == ' ' || body[pos] == ',')) ++pos;
    if (pos >= body.size()) break;
    std::size_t end = pos;
    while (end < body.size() && std::isdigit(static_cast<unsigned char>(body[end]))) ++end;
    if (end == pos) throw NpyError(NpyErrc::bad_header, "malformed NPY shape '" + body + "'");
    shape.push_back(std::stoull(body.substr(pos, end - pos)));
    pos = end;
  }
  return shape;
}

}  // namespace

std::string_view descr(DType t) {
  switch (t) {
    case DType::f4: return "<f4";
    case DType::f8: return "<f8";
    case DType::i4: return "<i4";
    case DType::i8: return "<i8";
  }
  return "?";
}

std::size_t item_size(DType t) { return t == DType::f4 || t == DType::i4 ? 4 : 8; }

std::size_t NpyArray::size() const {
  std::size_t n = 1;
  for (auto s : shape) n *= s;
  return n;
}

NpyArray parse_npy(std::span<const std::uint8_t> bytes) {
  if (bytes.size() < 6 || !std::equal(std::begin(kMagic), std::end(kMagic), bytes.begin()))
    throw NpyError(NpyErrc::bad_magic, "not an NPY file (bad magic)");
  if (bytes.size() < kPrelude) throw NpyError(NpyErrc::truncated, "truncated NPY prelude");
  if (bytes[6] != 1 || bytes[7] != 0)
    throw NpyError(NpyErrc::unsupported_version, "unsupported NPY version " +
                                                     std::to_string(bytes[6]) + "." +
                                                     std::to_string(bytes[7]));
  const std::size_t header_len = bytes[8] | (static_cast<std::size_t>(bytes[9]) << 8);
  if (bytes.size() < kPrelude + header_len)
    throw NpyError(NpyErrc::truncated, "truncated NPY header");
  const std::string header(reinterpret_cast<const char*>(bytes.data() + kPrelude), header_len);

  static const std::regex descr_re(R"('descr'\s*:\s*'([^']*)')");
  static const std::regex fortran_re(R"('fortran_order'\s*:\s*(True|False))");
  static const std::regex shape_re(R"('shape'\s*:\s*\(([^)]*)\))");
  std::smatch m_descr, m_fortran, m_shape;
  if (header.empty() || header.front() != '{' ||
      !std::regex_search(header, m_descr, descr_re) ||
      !std::regex_search(header, m_fortran, fortran_re) ||
      !std::regex_search(header, m_shape, shape_re))
    throw NpyError(NpyErrc::bad_header, "malformed NPY header: " + header);

  NpyArray out;
  out.dtype = parse_descr(m_descr[1]);
  if (m_fortran[1] == "True")
    throw NpyError(NpyErrc::fortran_order, "fortran_order arrays are not supported");
  out.shape = parse_shape(m_shape[1]);

  const std::size_t payload = out.size() * item_size(out.dtype);
  const std::size_t offset = kPrelude + header_len;
  if (bytes.size() - offset < payload)
    throw NpyError(NpyErrc::truncated, "truncated NPY payload: expected " +
                                           std::to_string(payload) + " bytes, found " +
                                           std::to_string(bytes.size() - offset));
  out.data.assign(bytes.begin() + static_cast<std::ptrdiff_t>(offset),
                  bytes.begin() + static_cast<std::ptrdiff_t>(offset + payload));
  return out;
}

NpyArray read_npy(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw NpyError(NpyErrc::io_error, "cannot open " + path.string());
  std::vector<std::uint8_t> bytes((std::istreambuf_iterator<char>(in)),
                                  std::istreambuf_iterator<char>());
  try {
    return parse_npy(bytes);
  } catch (const NpyError& e) {
    throw NpyError(e.code(), path.string() + ": " + e.what());
  }
}

std::vector<std::uint8_t> encode_npy(const NpyArray& array) {
  if (array.data.size() != array.size() * item_size(array.dtype))
    throw NpyError(NpyErrc::bad_shape, "payload size does not match shape");
  std::string header = "{'descr': '" + std::string(descr(array.dtype)) +
                       "', 'fortran_order': False, 'shape': " + shape_literal(array.shape) + ", }";
  // Pad with spaces and a final newline so prelude + header is a multiple of 64.
  const std::size_t unpadded = kPrelude + header.size() + 1;
  header.append((kAlign - unpadded % kAlign) % kAlign, ' ');
  header.push_back('\n');
  if (header.size() > 0xFFFF) throw NpyError(NpyErrc::bad_shape, "NPY v1.0 header too long");

  std::vector<std::uint8_t> out(std::begin(kMagic), std::end(kMagic));
  out.push_back(1);
  out.push_back(0);
  out.push_back(static_cast<std::uint8_t>(header.size() & 0xFF));
  out.push_back(static_cast<std::uint8_t>(header.size() >> 8));
  out.insert(out.end(), header.begin(), header.end());
  out.insert(out.end(), array.data.begin(), array.data.end());
  return out;
}

void write_npy(const std::filesystem::path& path, const NpyArray& array) {
  const auto bytes = encode_npy(array);
  std::ofstream out(path, std::ios::binary | std::ios::trunc);
  if (!out) throw NpyError(NpyErrc::io_error, "cannot write " + path.string());
  out.write(reinterpret_cast<const char*>(bytes.data()), static_cast<std::streamsize>(bytes.size()));
  if (!out) throw NpyError(NpyErrc::io_error, "write failed for " + path.string());
}

namespace {

template <typename T>
T load(const std::uint8_t* p) {
  T v;
  std::memcpy(&v, p, sizeof v);
  return v;
}

template <typename T>
void store(std::vector<std::uint8_t>& out, T v) {
  const auto* p = reinterpret_cast<const std::uint8_t*>(&v);
  out.insert(out.end(), p, p + sizeof v);
}

}  // namespace

Matrix read_matrix(const std::filesystem::path& path) {
  const NpyArray a = read_npy(path);
  if (a.dtype != DType::f4 && a.dtype != DType::f8)
    throw NpyError(NpyErrc::unsupported_dtype,
                   path.string() + ": features must be <f4 or <f8, got " + std::string(descr(a.dtype)));
  if (a.shape.size() != 2)
    throw NpyError(NpyErrc::bad_shape, path.string() + ": features must be 2-D");
  Matrix m(static_cast<Eigen::Index>(a.shape[0]), static_cast<Eigen::Index>(a.shape[1]));
  const std::size_t step = item_size(a.dtype);
  std::size_t k = 0;
  for (Eigen::Index i = 0; i < m.rows(); ++i)
    for (Eigen::Index j = 0; j < m.cols(); ++j, ++k) {
      const std::uint8_t* p = a.data.data() + k * step;
      m(i, j) = a.dtype == DType::f4 ? static_cast<double>(load<float>(p)) : load<double>(p);
    }
  return m;
}

std::vector<std::int64_t> read_labels(const std::filesystem::path& path) {
  const NpyArray a = read_npy(path);
  if (a.dtype != DType::i4 && a.dtype != DType::i8)
    throw NpyError(NpyErrc::unsupported_dtype,
                   path.string() + ": labels must be <i4 or <i8, got " + std::string(descr(a.dtype)));
  if (a.shape.size() != 1) throw NpyError(NpyErrc::bad_shape, path.string() + ": labels must be 1-D");
  std::vector<std::int64_t> out(a.shape[0]);
  const std::size_t step = item_size(a.dtype);
  for (std::size_t i = 0; i < out.size(); ++i) {
    const std::uint8_t* p = a.data.data() + i * step;
    out[i] = a.dtype == DType::i4 ? load<std::int32_t>(p) : load<std::int64_t>(p);
  }
  return out;
}

NpyArray matrix_array(const Matrix& m, DType dtype) {
  if (dtype != DType::f4 && dtype != DType::f8)
    throw NpyError(NpyErrc::unsupported_dtype, "matrices are stored as <f4 or <f8");
  NpyArray a;
  a.dtype = dtype;
  a.shape = {static_cast<std::size_t>(m.rows()), static_cast<std::size_t>(m.cols())};
  a.data.reserve(a.size() * item_size(dtype));
  for (Eigen::Index i = 0; i < m.rows(); ++i)
    for (Eigen::Index j = 0; j < m.cols(); ++j) {
      if (dtype == DType::f4)
        store(a.data, static_cast<float>(m(i, j)));
      else
        store(a.data, m(i, j));
    }
  return a;
}

NpyArray labels_array(std::span<const std::int64_t> labels, DType dtype) {
  if (dtype != DType::i4 && dtype != DType::i8)
    throw NpyError(NpyErrc::unsupported_dtype, "labels are stored as <i4 or <i8");
  NpyArray a;
  a.dtype = dtype;
  a.shape = {labels.size()};
  for (auto v : labels) {
    if (dtype == DType::i4) {
      if (v < INT32_MIN || v > INT32_MAX)
        throw NpyError(NpyErrc::bad_shape, "label does not fit in <i4");
      store(a.data, static_cast<std::int32_t>(v));
    } else {
      store(a.data, v);
    }
  }
  return a;
}

void write_matrix(const std::filesystem::path& path, const Matrix& m, DType dtype) {
  write_npy(path, matrix_array(m, dtype));
}

void write_labels(const std::filesystem::path& path, std::span<const std::int64_t> labels,
                  DType dtype) {
  write_npy(path, labels_array(labels, dtype));
}

}  // namespace sitekit::io
