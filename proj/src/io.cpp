#include "rsp/io.hpp"

#include <charconv>
#include <cstring>
#include <fstream>
#include <system_error>

namespace rsp {

namespace {

constexpr char kMagic[4] = {'R', 'S', 'P', 'M'};
constexpr std::uint16_t kVersion = 1;

void append_u16(std::string& out, std::uint16_t v) {
  out.push_back(static_cast<char>(v & 0xFF));
  out.push_back(static_cast<char>((v >> 8) & 0xFF));
}

void append_u64(std::string& out, std::uint64_t v) {
  for (int i = 0; i < 8; ++i) out.push_back(static_cast<char>((v >> (8 * i)) & 0xFF));
}

void append_f64(std::string& out, double d) {
  std::uint64_t bits;
  std::memcpy(&bits, &d, sizeof bits);
  append_u64(out, bits);
}

std::uint64_t take_u64(const std::string& buf, std::size_t at) {
  std::uint64_t v = 0;
  for (int i = 0; i < 8; ++i) {
    v |= static_cast<std::uint64_t>(static_cast<unsigned char>(buf[at + i])) << (8 * i);
  }
  return v;
}

std::string slurp(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw IoError("cannot open " + path.string() + " for reading");
  std::string data((std::istreambuf_iterator<char>(in)), std::istreambuf_iterator<char>());
  if (in.bad()) throw IoError("read failure on " + path.string());
  return data;
}

void spill(const std::filesystem::path& path, const std::string& data) {
  std::ofstream out(path, std::ios::binary | std::ios::trunc);
  if (!out) throw IoError("cannot open " + path.string() + " for writing");
  out.write(data.data(), static_cast<std::streamsize>(data.size()));
  out.flush();
  if (!out) throw IoError("write failure on " + path.string());
}

Matrix parse_csv(const std::string& text, const std::filesystem::path& path) {
  std::vector<std::vector<double>> rows;
  std::size_t pos = 0;
  while (pos < text.size()) {
    std::size_t eol = text.find('\n', pos);
    if (eol == std::string::npos) eol = text.size();
    std::size_t end = eol;
    if (end > pos && text[end - 1] == '\r') --end;  // tolerate CRLF
    if (end > pos) {
      std::vector<double> fields;
      std::size_t fpos = pos;
      while (fpos <= end) {
        std::size_t comma = text.find(',', fpos);
        if (comma == std::string::npos || comma > end) comma = end;
        double value = 0.0;
        const auto [ptr, ec] = std::from_chars(text.data() + fpos, text.data() + comma, value);
        if (ec != std::errc{} || ptr != text.data() + comma || !std::isfinite(value)) {
          throw IoError(path.string() + ": invalid CSV number '" +
                        text.substr(fpos, comma - fpos) + "'");
        }
        fields.push_back(value);
        if (comma == end) break;
        fpos = comma + 1;
      }
      if (!rows.empty() && fields.size() != rows.front().size()) {
        throw IoError(path.string() + ": ragged CSV (row " + std::to_string(rows.size()) +
                      " has " + std::to_string(fields.size()) + " fields)");
      }
      rows.push_back(std::move(fields));
    }
    pos = eol + 1;
  }
  if (rows.empty()) throw IoError(path.string() + ": empty CSV matrix");
  Matrix a(static_cast<Index>(rows.size()), static_cast<Index>(rows.front().size()));
  for (Index i = 0; i < a.rows(); ++i) {
    for (Index j = 0; j < a.cols(); ++j) {
      a(i, j) = rows[static_cast<std::size_t>(i)][static_cast<std::size_t>(j)];
    }
  }
  return a;
}

Matrix parse_binary(const std::string& buf, const std::filesystem::path& path) {
  if (buf.size() < 22) throw IoError(path.string() + ": truncated matrix header");
  const std::uint16_t version = static_cast<std::uint16_t>(
      static_cast<unsigned char>(buf[4]) | (static_cast<unsigned char>(buf[5]) << 8));
  if (version != kVersion) {
    throw IoError(path.string() + ": unsupported matrix version " + std::to_string(version));
  }
  const std::uint64_t rows = take_u64(buf, 6);
  const std::uint64_t cols = take_u64(buf, 14);
  if (rows == 0 || cols == 0 || rows > (1ULL << 32) || cols > (1ULL << 32)) {
    throw IoError(path.string() + ": implausible matrix shape " + std::to_string(rows) + "x" +
                  std::to_string(cols));
  }
  const std::uint64_t expected = 22 + rows * cols * 8;
  if (buf.size() != expected) {
    throw IoError(path.string() + ": size mismatch (" + std::to_string(buf.size()) +
                  " bytes, expected " + std::to_string(expected) + ")");
  }
  Matrix a(static_cast<Index>(rows), static_cast<Index>(cols));
  std::size_t at = 22;
  for (Index i = 0; i < a.rows(); ++i) {
    for (Index j = 0; j < a.cols(); ++j, at += 8) {
      const std::uint64_t bits = take_u64(buf, at);
      double d;
      std::memcpy(&d, &bits, sizeof d);
      a(i, j) = d;
    }
  }
  if (!a.allFinite()) throw IoError(path.string() + ": matrix contains non-finite entries");
  return a;
}

}  // namespace

std::string format_double(double x) {
  char buf[64];
  const auto [ptr, ec] = std::to_chars(buf, buf + sizeof buf, x);
  if (ec != std::errc{}) throw IoError("cannot format double");
  return std::string(buf, ptr);
}

std::string format_extension(MatrixFormat format) {
  return format == MatrixFormat::kCsv ? ".csv" : ".rspm";
}

void write_matrix(const std::filesystem::path& path, const Matrix& a, MatrixFormat format) {
  if (a.rows() < 1 || a.cols() < 1) throw std::invalid_argument("write_matrix: empty matrix");
  std::string out;
  if (format == MatrixFormat::kCsv) {
    for (Index i = 0; i < a.rows(); ++i) {
      for (Index j = 0; j < a.cols(); ++j) {
        if (j > 0) out.push_back(',');
        out += format_double(a(i, j));
      }
      out.push_back('\n');
    }
  } else {
    out.reserve(22 + static_cast<std::size_t>(a.size()) * 8);
    out.append(kMagic, 4);
    append_u16(out, kVersion);
    append_u64(out, static_cast<std::uint64_t>(a.rows()));
    append_u64(out, static_cast<std::uint64_t>(a.cols()));
    for (Index i = 0; i < a.rows(); ++i) {
      for (Index j = 0; j < a.cols(); ++j) append_f64(out, a(i, j));
    }
  }
  spill(path, out);
}

Matrix read_matrix(const std::filesystem::path& path) {
  const std::string buf = slurp(path);
  if (buf.size() >= 4 && std::memcmp(buf.data(), kMagic, 4) == 0) return parse_binary(buf, path);
  return parse_csv(buf, path);
}

void write_labels(const std::filesystem::path& path, const std::vector<int>& labels) {
  if (labels.empty()) throw std::invalid_argument("write_labels: empty label vector");
  std::string out;
  for (int v : labels) {
    out += std::to_string(v);
    out.push_back('\n');
  }
  spill(path, out);
}

std::vector<int> read_labels(const std::filesystem::path& path) {
  const std::string buf = slurp(path);
  std::vector<int> labels;
  std::size_t pos = 0;
  while (pos < buf.size()) {
    std::size_t eol = buf.find('\n', pos);
    if (eol == std::string::npos) eol = buf.size();
    std::size_t end = eol;
    if (end > pos && buf[end - 1] == '\r') --end;
    if (end > pos) {
      int value = 0;
      const auto [ptr, ec] = std::from_chars(buf.data() + pos, buf.data() + end, value);
      if (ec != std::errc{} || ptr != buf.data() + end || value < 0) {
        throw IoError(path.string() + ": invalid label '" + buf.substr(pos, end - pos) + "'");
      }
      labels.push_back(value);
    }
    pos = eol + 1;
  }
  if (labels.empty()) throw IoError(path.string() + ": no labels found");
  return labels;
}

void write_text_atomic(const std::filesystem::path& path, const std::string& text) {
  const std::filesystem::path tmp = path.string() + ".tmp";
  spill(tmp, text);
  std::error_code ec;
  std::filesystem::rename(tmp, path, ec);
  if (ec) throw IoError("cannot rename " + tmp.string() + " to " + path.string() + ": " + ec.message());
}

void write_json_atomic(const std::filesystem::path& path, const nlohmann::json& j) {
  write_text_atomic(path, j.dump(2) + "\n");
}

nlohmann::json read_json(const std::filesystem::path& path) {
  const std::string buf = slurp(path);
  nlohmann::json j = nlohmann::json::parse(buf, nullptr, false);
  if (j.is_discarded()) throw IoError(path.string() + ": invalid JSON");
  return j;
}

}  // namespace rsp
