#pragma once

#include "rsp/matrix.hpp"

#include <nlohmann/json.hpp>

#include <filesystem>
#include <string>
#include <vector>

namespace rsp {

/// Filesystem or format failure while reading/writing artifacts. The CLI
/// maps this to exit code 2.
class IoError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

enum class MatrixFormat { kCsv, kBinary };

/// File extension for a format: ".csv" or ".rspm".
std::string format_extension(MatrixFormat format);

/// Writes a matrix. CSV: one row per line, comma-separated, shortest
/// round-trip decimal representation. Binary: magic "RSPM", version u16 (1),
/// rows u64, cols u64, then row-major IEEE-754 doubles, all little-endian.
void write_matrix(const std::filesystem::path& path, const Matrix& a, MatrixFormat format);

/// Reads either format back, sniffing by the 4-byte magic. CSV input must be
/// rectangular with finite entries.
Matrix read_matrix(const std::filesystem::path& path);

/// One label per line, non-negative integers.
void write_labels(const std::filesystem::path& path, const std::vector<int>& labels);
std::vector<int> read_labels(const std::filesystem::path& path);

/// JSON with sorted keys and 2-space indent, written atomically
/// (temp file in the same directory, then rename).
void write_json_atomic(const std::filesystem::path& path, const nlohmann::json& j);
nlohmann::json read_json(const std::filesystem::path& path);

/// Atomic full-file text write used for checkpoints.
void write_text_atomic(const std::filesystem::path& path, const std::string& text);

/// Shortest decimal string that round-trips the double (std::to_chars).
std::string format_double(double x);

}  // namespace rsp
