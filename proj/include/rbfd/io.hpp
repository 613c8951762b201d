#pragma once

#include <bit>
#include <cctype>
#include <charconv>
#include <cmath>
#include <cstdint>
#include <cstdio>
#include <cstring>
#include <fstream>
#include <sstream>
#include <string>
#include <string_view>
#include <vector>

#include "rbfd/analysis.hpp"
#include "rbfd/datagen.hpp"
#include "rbfd/errors.hpp"
#include "rbfd/matrix.hpp"
#include "rbfd/model.hpp"
#include "rbfd/svd.hpp"

namespace rbfd {

/// Shortest-stable text form: 17 significant digits, so values round-trip.
inline std::string format_double(double x) {
  if (std::isnan(x)) return "nan";
  if (std::isinf(x)) return x > 0 ? "inf" : "-inf";
  char buf[32];
  std::snprintf(buf, sizeof buf, "%.17g", x);
  return buf;
}

namespace detail {

inline std::string_view trim(std::string_view s) {
  while (!s.empty() && std::isspace(static_cast<unsigned char>(s.front()))) s.remove_prefix(1);
  while (!s.empty() && std::isspace(static_cast<unsigned char>(s.back()))) s.remove_suffix(1);
  return s;
}

inline double parse_double(std::string_view field, const std::string& where) {
  field = trim(field);
  if (!field.empty() && field.front() == '+') field.remove_prefix(1);
  double value = 0.0;
  const auto [ptr, ec] = std::from_chars(field.data(), field.data() + field.size(), value);
  if (ec != std::errc() || ptr != field.data() + field.size())
    throw IoError(where + ": cannot parse number '" + std::string(field) + "'");
  return value;
}

inline std::vector<std::string_view> split_commas(std::string_view line) {
  std::vector<std::string_view> out;
  std::size_t start = 0;
  for (;;) {
    const auto pos = line.find(',', start);
    out.push_back(line.substr(start, pos == std::string_view::npos ? std::string_view::npos : pos - start));
    if (pos == std::string_view::npos) break;
    start = pos + 1;
  }
  return out;
}

inline std::vector<std::string> read_lines(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw IoError("cannot open '" + path + "' for reading");
  std::vector<std::string> lines;
  std::string line;
  while (std::getline(in, line)) {
    if (!line.empty() && line.back() == '\r') line.pop_back();
    if (!trim(line).empty()) lines.push_back(line);
  }
  return lines;
}

inline std::string read_file(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw IoError("cannot open '" + path + "' for reading");
  std::ostringstream ss;
  ss << in.rdbuf();
  return std::move(ss).str();
}

inline void write_file(const std::string& path, std::string_view content) {
  std::ofstream out(path, std::ios::binary | std::ios::trunc);
  if (!out) throw IoError("cannot open '" + path + "' for writing");
  out.write(content.data(), static_cast<std::streamsize>(content.size()));
  if (!out) throw IoError("write to '" + path + "' failed");
}

inline void append_row(std::string& out, std::span<const double> values) {
  for (std::size_t k = 0; k < values.size(); ++k) {
    if (k) out += ',';
    out += format_double(values[k]);
  }
  out += '\n';
}

inline void append_labeled_row(std::string& out, std::string_view label, std::span<const double> values) {
  out += label;
  for (double x : values) {
    out += ',';
    out += format_double(x);
  }
  out += '\n';
}

/// Parses "label,x,y,..." and checks the label and the value count.
inline std::vector<double> parse_labeled_row(const std::string& line, std::string_view label,
                                             std::size_t count, const std::string& where) {
  const auto fields = split_commas(line);
  if (trim(fields[0]) != label)
    throw IoError(where + ": expected a '" + std::string(label) + "' row, got '" + line + "'");
  if (fields.size() != count + 1)
    throw IoError(where + ": '" + std::string(label) + "' row has " + std::to_string(fields.size() - 1) +
                  " values, expected " + std::to_string(count));
  std::vector<double> out(count);
  for (std::size_t k = 0; k < count; ++k) out[k] = parse_double(fields[k + 1], where);
  return out;
}

inline std::size_t parse_count(std::string_view field, const std::string& where) {
  const double x = parse_double(field, where);
  if (!(x >= 0.0) || x != std::floor(x) || x > 1e9) throw IoError(where + ": bad count in header");
  return static_cast<std::size_t>(x);
}

inline bool ends_with(std::string_view s, std::string_view suffix) {
  if (s.size() < suffix.size()) return false;
  for (std::size_t k = 0; k < suffix.size(); ++k)
    if (std::tolower(static_cast<unsigned char>(s[s.size() - suffix.size() + k])) != suffix[k])
      return false;
  return true;
}

}  // namespace detail

using detail::write_file;

// ---------------------------------------------------------------------------
// Matrices

inline std::string matrix_to_csv(const DenseMatrix& m) {
  std::string out;
  for (std::size_t i = 0; i < m.rows(); ++i) detail::append_row(out, m.row(i));
  return out;
}

inline DenseMatrix matrix_from_csv_lines(const std::vector<std::string>& lines, const std::string& where) {
  if (lines.empty()) throw IoError(where + ": no rows");
  std::vector<double> values;
  std::size_t cols = 0;
  for (std::size_t i = 0; i < lines.size(); ++i) {
    const auto fields = detail::split_commas(lines[i]);
    if (i == 0) cols = fields.size();
    if (fields.size() != cols)
      throw IoError(where + ": row " + std::to_string(i + 1) + " has " + std::to_string(fields.size()) +
                    " columns, expected " + std::to_string(cols));
    for (auto f : fields) {
      const double x = detail::parse_double(f, where);
      if (!std::isfinite(x)) throw IoError(where + ": non-finite value in row " + std::to_string(i + 1));
      values.push_back(x);
    }
  }
  return DenseMatrix(lines.size(), cols, std::move(values));
}

inline void write_matrix_csv(const std::string& path, const DenseMatrix& m) {
  write_file(path, matrix_to_csv(m));
}

inline DenseMatrix read_matrix_csv(const std::string& path) {
  return matrix_from_csv_lines(detail::read_lines(path), path);
}

namespace detail {

template <class T>
T to_little_endian(T x) {
  if constexpr (std::endian::native == std::endian::big) {
    auto bytes = std::bit_cast<std::array<unsigned char, sizeof(T)>>(x);
    std::reverse(bytes.begin(), bytes.end());
    return std::bit_cast<T>(bytes);
  }
  return x;
}

inline constexpr char kBinaryMagic[4] = {'R', 'B', 'F', 'M'};

}  // namespace detail

/// "RBFM", u32 rows, u32 cols, then row-major little-endian float64 values.
inline std::string matrix_to_binary(const DenseMatrix& m) {
  if (m.rows() > UINT32_MAX || m.cols() > UINT32_MAX) throw IoError("matrix too large for binary format");
  std::string out(detail::kBinaryMagic, 4);
  auto put = [&](const auto& x) {
    const auto le = detail::to_little_endian(x);
    out.append(reinterpret_cast<const char*>(&le), sizeof le);
  };
  put(static_cast<std::uint32_t>(m.rows()));
  put(static_cast<std::uint32_t>(m.cols()));
  for (double x : m.values()) put(x);
  return out;
}

inline DenseMatrix matrix_from_binary(std::string_view bytes, const std::string& where) {
  if (bytes.size() < 12 || std::memcmp(bytes.data(), detail::kBinaryMagic, 4) != 0)
    throw IoError(where + ": missing RBFM header");
  auto get32 = [&](std::size_t off) {
    std::uint32_t x;
    std::memcpy(&x, bytes.data() + off, 4);
    return detail::to_little_endian(x);
  };
  const std::size_t rows = get32(4), cols = get32(8);
  if (rows == 0 || cols == 0) throw IoError(where + ": zero dimension");
  if (bytes.size() != 12 + rows * cols * 8)
    throw IoError(where + ": expected " + std::to_string(12 + rows * cols * 8) + " bytes, found " +
                  std::to_string(bytes.size()));
  std::vector<double> values(rows * cols);
  for (std::size_t k = 0; k < values.size(); ++k) {
    double x;
    std::memcpy(&x, bytes.data() + 12 + 8 * k, 8);
    x = detail::to_little_endian(x);
    if (!std::isfinite(x)) throw IoError(where + ": non-finite value at index " + std::to_string(k));
    values[k] = x;
  }
  return DenseMatrix(rows, cols, std::move(values));
}

inline void write_matrix_binary(const std::string& path, const DenseMatrix& m) {
  write_file(path, matrix_to_binary(m));
}

inline DenseMatrix read_matrix_binary(const std::string& path) {
  return matrix_from_binary(detail::read_file(path), path);
}

// ---------------------------------------------------------------------------
// Images: PGM (P2/P5) in and out; PPM (P3/P6) accepted as input via luminance.

inline GrayImage parse_netpbm(std::string_view bytes, const std::string& where) {
  std::size_t pos = 0;
  auto skip_space = [&] {
    for (;;) {
      while (pos < bytes.size() && std::isspace(static_cast<unsigned char>(bytes[pos]))) ++pos;
      if (pos < bytes.size() && bytes[pos] == '#') {
        while (pos < bytes.size() && bytes[pos] != '\n') ++pos;
        continue;
      }
      return;
    }
  };
  auto next_int = [&]() -> std::size_t {
    skip_space();
    std::size_t value = 0;
    const auto [ptr, ec] = std::from_chars(bytes.data() + pos, bytes.data() + bytes.size(), value);
    if (ec != std::errc()) throw IoError(where + ": malformed image header or data");
    pos = static_cast<std::size_t>(ptr - bytes.data());
    return value;
  };
  if (bytes.size() < 2 || bytes[0] != 'P') throw IoError(where + ": not a PGM/PPM file");
  const char kind = bytes[1];
  if (kind != '2' && kind != '3' && kind != '5' && kind != '6')
    throw IoError(where + ": unsupported netpbm variant P" + std::string(1, kind));
  pos = 2;
  const std::size_t width = next_int(), height = next_int(), maxval = next_int();
  if (width == 0 || height == 0 || maxval == 0 || maxval > 65535)
    throw IoError(where + ": invalid image dimensions or maxval");
  const bool color = kind == '3' || kind == '6';
  const bool binary = kind == '5' || kind == '6';
  const std::size_t channels = color ? 3 : 1;
  const std::size_t count = width * height * channels;
  std::vector<double> raw(count);
  if (binary) {
    ++pos;  // single whitespace byte after maxval
    const std::size_t bytes_per = maxval < 256 ? 1 : 2;
    if (bytes.size() < pos + count * bytes_per) throw IoError(where + ": truncated pixel data");
    for (std::size_t k = 0; k < count; ++k) {
      const auto* p = reinterpret_cast<const unsigned char*>(bytes.data() + pos + k * bytes_per);
      raw[k] = bytes_per == 1 ? p[0] : (p[0] << 8 | p[1]);
    }
  } else {
    for (std::size_t k = 0; k < count; ++k) raw[k] = static_cast<double>(next_int());
  }
  std::vector<double> px(width * height);
  const double scale = static_cast<double>(maxval);
  for (std::size_t k = 0; k < px.size(); ++k)
    px[k] = color ? luminance(raw[3 * k] / scale, raw[3 * k + 1] / scale, raw[3 * k + 2] / scale)
                  : raw[k] / scale;
  return GrayImage(width, height, std::move(px));
}

inline GrayImage read_image(const std::string& path) { return parse_netpbm(detail::read_file(path), path); }

/// 8-bit PGM, maxval 255; pixel p is stored as round(255 p).
inline std::string image_to_pgm(const GrayImage& image, bool binary = true) {
  std::string out = (binary ? "P5\n" : "P2\n") + std::to_string(image.width()) + " " +
                    std::to_string(image.height()) + "\n255\n";
  const auto& px = image.pixels();
  for (std::size_t k = 0; k < px.size(); ++k) {
    const auto level = static_cast<unsigned>(std::lround(px[k] * 255.0));
    if (binary) {
      out += static_cast<char>(level);
    } else {
      out += std::to_string(level);
      out += ((k + 1) % image.width() == 0) ? '\n' : ' ';
    }
  }
  return out;
}

inline void write_pgm(const std::string& path, const GrayImage& image, bool binary = true) {
  write_file(path, image_to_pgm(image, binary));
}

// ---------------------------------------------------------------------------
// Format dispatch by file extension: .bin/.rbfm binary, .pgm/.ppm image, else CSV.

enum class MatrixFormat { Csv, Binary, Pgm };

inline MatrixFormat format_for_path(std::string_view path) {
  if (detail::ends_with(path, ".bin") || detail::ends_with(path, ".rbfm")) return MatrixFormat::Binary;
  if (detail::ends_with(path, ".pgm") || detail::ends_with(path, ".ppm")) return MatrixFormat::Pgm;
  return MatrixFormat::Csv;
}

inline DenseMatrix read_matrix(const std::string& path) {
  switch (format_for_path(path)) {
    case MatrixFormat::Binary: return read_matrix_binary(path);
    case MatrixFormat::Pgm: return image_to_matrix(read_image(path));
    case MatrixFormat::Csv: break;
  }
  return read_matrix_csv(path);
}

inline void write_matrix(const std::string& path, const DenseMatrix& m) {
  switch (format_for_path(path)) {
    case MatrixFormat::Binary: return write_matrix_binary(path, m);
    case MatrixFormat::Pgm: return write_pgm(path, matrix_to_image(m));
    case MatrixFormat::Csv: break;
  }
  write_matrix_csv(path, m);
}

// ---------------------------------------------------------------------------
// Models
//
//   r,n,m,symmetric,b
//   2,100,100,1,<b>
//   a,<a_0>,...,<a_{r-1}>
//   u,<u^(k)_0>,...        one row per component
//   v,<v^(k)_0>,...        one row per component, asymmetric models only

inline std::string model_to_csv(const RbfModel& model) {
  std::string out = "r,n,m,symmetric,b\n";
  out += std::to_string(model.r()) + "," + std::to_string(model.n()) + "," + std::to_string(model.m()) +
         "," + (model.symmetric() ? "1" : "0") + "," + format_double(model.b()) + "\n";
  detail::append_labeled_row(out, "a", model.a());
  for (std::size_t k = 0; k < model.r(); ++k) detail::append_labeled_row(out, "u", model.u(k));
  if (!model.symmetric())
    for (std::size_t k = 0; k < model.r(); ++k) detail::append_labeled_row(out, "v", model.v(k));
  return out;
}

inline RbfModel model_from_csv_lines(const std::vector<std::string>& lines, const std::string& where) {
  if (lines.size() < 3 || detail::trim(lines[0]) != "r,n,m,symmetric,b")
    throw IoError(where + ": not a model file");
  const auto head = detail::split_commas(lines[1]);
  if (head.size() != 5) throw IoError(where + ": malformed model header");
  auto count = [&](std::string_view f) { return detail::parse_count(f, where); };
  const std::size_t r = count(head[0]), n = count(head[1]), m = count(head[2]), sym = count(head[3]);
  if (n == 0 || m == 0 || sym > 1 || (sym && n != m)) throw IoError(where + ": inconsistent model header");
  RbfModel model(r, n, m, sym == 1);
  model.b() = detail::parse_double(head[4], where);
  const std::size_t expected = 3 + r * (sym ? 1 : 2);
  if (lines.size() != expected)
    throw IoError(where + ": expected " + std::to_string(expected) + " lines, found " +
                  std::to_string(lines.size()));
  const auto a = detail::parse_labeled_row(lines[2], "a", r, where);
  std::copy(a.begin(), a.end(), model.a().begin());
  for (std::size_t k = 0; k < r; ++k) {
    const auto u = detail::parse_labeled_row(lines[3 + k], "u", n, where);
    std::copy(u.begin(), u.end(), model.u(k).begin());
    if (!sym) {
      const auto v = detail::parse_labeled_row(lines[3 + r + k], "v", m, where);
      std::copy(v.begin(), v.end(), model.v(k).begin());
    }
  }
  if (!model.all_finite()) throw IoError(where + ": non-finite model parameter");
  return model;
}

inline void write_model(const std::string& path, const RbfModel& model) { write_file(path, model_to_csv(model)); }

inline RbfModel read_model(const std::string& path) {
  return model_from_csv_lines(detail::read_lines(path), path);
}

// ---------------------------------------------------------------------------
// Truncated SVD, same container style as models
//
//   rank,rows,cols,symmetric
//   <rank>,<rows>,<cols>,<0|1>
//   values,...
//   left,...               one row per component
//   right,...              one row per component, general variant only

inline std::string svd_to_csv(const SvdApprox& s) {
  std::string out = "rank,rows,cols,symmetric\n";
  out += std::to_string(s.rank()) + "," + std::to_string(s.rows) + "," + std::to_string(s.cols) + "," +
         (s.symmetric ? "1" : "0") + "\n";
  detail::append_labeled_row(out, "values", s.values);
  for (const auto& l : s.left) detail::append_labeled_row(out, "left", l);
  if (!s.symmetric)
    for (const auto& r : s.right) detail::append_labeled_row(out, "right", r);
  return out;
}

inline SvdApprox svd_from_csv_lines(const std::vector<std::string>& lines, const std::string& where) {
  if (lines.size() < 3 || detail::trim(lines[0]) != "rank,rows,cols,symmetric")
    throw IoError(where + ": not an SVD file");
  const auto head = detail::split_commas(lines[1]);
  if (head.size() != 4) throw IoError(where + ": malformed SVD header");
  SvdApprox s;
  const auto rank = detail::parse_count(head[0], where);
  s.rows = detail::parse_count(head[1], where);
  s.cols = detail::parse_count(head[2], where);
  const auto sym = detail::parse_count(head[3], where);
  if (s.rows == 0 || s.cols == 0 || sym > 1 || (sym && s.rows != s.cols))
    throw IoError(where + ": inconsistent SVD header");
  s.symmetric = sym == 1;
  const std::size_t expected = 3 + rank * (s.symmetric ? 1 : 2);
  if (lines.size() != expected) throw IoError(where + ": truncated SVD file");
  s.values = detail::parse_labeled_row(lines[2], "values", rank, where);
  for (std::size_t k = 0; k < rank; ++k) {
    s.left.push_back(detail::parse_labeled_row(lines[3 + k], "left", s.rows, where));
    s.right.push_back(s.symmetric ? s.left.back()
                                  : detail::parse_labeled_row(lines[3 + rank + k], "right", s.cols, where));
  }
  return s;
}

inline void write_svd(const std::string& path, const SvdApprox& s) { write_file(path, svd_to_csv(s)); }

inline SvdApprox read_svd(const std::string& path) { return svd_from_csv_lines(detail::read_lines(path), path); }

// ---------------------------------------------------------------------------
// Point clouds: header x0,...,x{d-1}[,t], then one point per row.

inline std::string point_cloud_to_csv(const PointCloud& cloud) {
  std::string out;
  for (std::size_t d = 0; d < cloud.dim; ++d) out += (d ? ",x" : "x") + std::to_string(d);
  if (cloud.has_labels()) out += ",t";
  out += '\n';
  for (std::size_t p = 0; p < cloud.size(); ++p) {
    std::vector<double> row = cloud.points[p];
    if (cloud.has_labels()) row.push_back(cloud.labels[p]);
    detail::append_row(out, row);
  }
  return out;
}

inline PointCloud read_point_cloud(const std::string& path) {
  auto lines = detail::read_lines(path);
  if (lines.size() < 2) throw IoError(path + ": empty point cloud");
  const auto header = detail::split_commas(lines[0]);
  const bool labeled = detail::trim(header.back()) == "t";
  PointCloud cloud;
  cloud.dim = header.size() - (labeled ? 1 : 0);
  lines.erase(lines.begin());
  const auto body = matrix_from_csv_lines(lines, path);
  if (body.cols() != header.size()) throw IoError(path + ": row width does not match header");
  for (std::size_t p = 0; p < body.rows(); ++p) {
    const auto row = body.row(p);
    cloud.points.emplace_back(row.begin(), row.begin() + static_cast<std::ptrdiff_t>(cloud.dim));
    if (labeled) cloud.labels.push_back(row[cloud.dim]);
  }
  return cloud;
}

// ---------------------------------------------------------------------------
// Small CSV tables used by the CLI and experiment suites.

/// ROC as threshold,fpr,tpr rows followed by an "auc,<value>" footer line.
inline std::string roc_to_csv(const RocCurve& roc) {
  std::string out = "threshold,fpr,tpr\n";
  for (const auto& p : roc.points)
    out += format_double(p.threshold) + "," + format_double(p.fpr) + "," + format_double(p.tpr) + "\n";
  out += "auc," + format_double(roc.auc) + "\n";
  return out;
}

inline std::string curve_to_csv(const std::vector<std::pair<std::size_t, double>>& curve,
                                std::string_view first = "rank", std::string_view second = "mse") {
  std::string out = std::string(first) + "," + std::string(second) + "\n";
  for (const auto& [k, v] : curve) out += std::to_string(k) + "," + format_double(v) + "\n";
  return out;
}

inline std::string vector_to_csv(const std::vector<double>& values, std::string_view header) {
  std::string out = std::string(header) + "\n";
  for (double x : values) out += format_double(x) + "\n";
  return out;
}

/// FNV-1a over the bytes of a file's content; printed by the CLI as a quick
/// identity check for generated data.
inline std::uint64_t fnv1a(std::string_view bytes) {
  std::uint64_t h = 0xcbf29ce484222325ULL;
  for (unsigned char c : bytes) {
    h ^= c;
    h *= 0x100000001b3ULL;
  }
  return h;
}

}  // namespace rbfd
