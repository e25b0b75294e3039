#include "rsp/io.hpp"

#include "test_helpers.hpp"

#include <doctest.h>

#include <charconv>
#include <cstdio>
#include <cstring>
#include <fstream>

using namespace rsp;
using namespace rsp::testing;

namespace {

struct TempDir {
  std::filesystem::path path;
  TempDir() {
    path = std::filesystem::temp_directory_path() /
           ("rsp_io_test_" + std::to_string(std::rand()) + "_" +
            std::to_string(reinterpret_cast<std::uintptr_t>(this)));
    std::filesystem::create_directories(path);
  }
  ~TempDir() { std::filesystem::remove_all(path); }
};

void write_raw(const std::filesystem::path& p, const std::string& bytes) {
  std::ofstream out(p, std::ios::binary);
  out.write(bytes.data(), static_cast<std::streamsize>(bytes.size()));
}

std::string read_raw(const std::filesystem::path& p) {
  std::ifstream in(p, std::ios::binary);
  return std::string((std::istreambuf_iterator<char>(in)), std::istreambuf_iterator<char>());
}

}  // namespace

TEST_CASE("binary round trip is bitwise exact") {
  TempDir dir;
  Matrix a = random_matrix(7, 5, 1);
  a(0, 0) = 0.1;                       // not exactly representable
  a(1, 1) = -0.0;                      // signed zero survives
  a(2, 2) = 1e-308;                    // near-denormal magnitude
  a(3, 3) = 1.7976931348623157e308;    // largest finite double
  const auto p = dir.path / "a.rspm";
  write_matrix(p, a, MatrixFormat::kBinary);
  const Matrix back = read_matrix(p);
  REQUIRE(back.rows() == a.rows());
  REQUIRE(back.cols() == a.cols());
  for (Index i = 0; i < a.rows(); ++i) {
    for (Index j = 0; j < a.cols(); ++j) {
      std::uint64_t want, got;
      std::memcpy(&want, &a(i, j), 8);
      std::memcpy(&got, &back(i, j), 8);
      CHECK(want == got);
    }
  }
}

TEST_CASE("csv round trip is value exact") {
  TempDir dir;
  Matrix a = random_matrix(6, 4, 2);
  a(0, 0) = 0.1;
  a(5, 3) = -3.0;
  const auto p = dir.path / "a.csv";
  write_matrix(p, a, MatrixFormat::kCsv);
  const Matrix back = read_matrix(p);
  // Shortest round-trip formatting guarantees bit-for-bit recovery of every
  // finite value (including the sign of zero through the parser's -0 path).
  CHECK(back == a);
}

TEST_CASE("binary layout matches the documented bytes") {
  TempDir dir;
  Matrix a(1, 2);
  a(0, 0) = 1.0;
  a(0, 1) = -2.0;
  const auto p = dir.path / "g.rspm";
  write_matrix(p, a, MatrixFormat::kBinary);
  const std::string bytes = read_raw(p);
  REQUIRE(bytes.size() == 22 + 16);

  const std::string want_header =
      std::string("RSPM") +                                      // magic
      std::string("\x01\x00", 2) +                               // version 1, LE
      std::string("\x01\x00\x00\x00\x00\x00\x00\x00", 8) +       // rows = 1
      std::string("\x02\x00\x00\x00\x00\x00\x00\x00", 8);        // cols = 2
  CHECK(bytes.substr(0, 22) == want_header);

  // 1.0 = 0x3FF0000000000000, -2.0 = 0xC000000000000000, little-endian.
  const std::string one("\x00\x00\x00\x00\x00\x00\xF0\x3F", 8);
  const std::string minus_two("\x00\x00\x00\x00\x00\x00\x00\xC0", 8);
  CHECK(bytes.substr(22, 8) == one);
  CHECK(bytes.substr(30, 8) == minus_two);
}

TEST_CASE("csv output is the exact expected text") {
  TempDir dir;
  Matrix a(2, 3);
  a << 1.0, -0.5, 2.0,
       0.0, 100.0, -3.25;
  const auto p = dir.path / "g.csv";
  write_matrix(p, a, MatrixFormat::kCsv);
  CHECK(read_raw(p) == "1,-0.5,2\n0,100,-3.25\n");
}

TEST_CASE("format_double uses shortest round-trip form") {
  CHECK(format_double(1.0) == "1");
  CHECK(format_double(-0.5) == "-0.5");
  CHECK(format_double(0.1) == "0.1");
  double x;
  auto text = format_double(1.0 / 3.0);
  const auto [ptr, ec] = std::from_chars(text.data(), text.data() + text.size(), x);
  REQUIRE(ec == std::errc{});
  CHECK(x == 1.0 / 3.0);
}

TEST_CASE("format_extension maps formats to suffixes") {
  CHECK(format_extension(MatrixFormat::kCsv) == ".csv");
  CHECK(format_extension(MatrixFormat::kBinary) == ".rspm");
}

TEST_CASE("read_matrix sniffs the format from the leading bytes") {
  TempDir dir;
  const Matrix a = random_matrix(3, 3, 3);
  const auto pc = dir.path / "x.data";
  const auto pb = dir.path / "y.data";
  write_matrix(pc, a, MatrixFormat::kCsv);
  write_matrix(pb, a, MatrixFormat::kBinary);
  CHECK(read_matrix(pc).isApprox(a, 1e-15));
  CHECK(read_matrix(pb) == a);
}

TEST_CASE("csv parser tolerates CRLF and trailing blank lines") {
  TempDir dir;
  const auto p = dir.path / "crlf.csv";
  write_raw(p, "1,2\r\n3,4\r\n\r\n");
  const Matrix a = read_matrix(p);
  REQUIRE(a.rows() == 2);
  REQUIRE(a.cols() == 2);
  CHECK(a(1, 0) == 3.0);
}

TEST_CASE("matrix read failures raise IoError") {
  TempDir dir;

  CHECK_THROWS_AS(read_matrix(dir.path / "missing.csv"), IoError);

  const auto ragged = dir.path / "ragged.csv";
  write_raw(ragged, "1,2\n3\n");
  CHECK_THROWS_AS(read_matrix(ragged), IoError);

  const auto garbage = dir.path / "garbage.csv";
  write_raw(garbage, "1,abc\n");
  CHECK_THROWS_AS(read_matrix(garbage), IoError);

  const auto infinity = dir.path / "inf.csv";
  write_raw(infinity, "1,inf\n");
  CHECK_THROWS_AS(read_matrix(infinity), IoError);

  const auto empty = dir.path / "empty.csv";
  write_raw(empty, "");
  CHECK_THROWS_AS(read_matrix(empty), IoError);

  const auto partial = dir.path / "partial.csv";
  write_raw(partial, "1,2x,3\n");
  CHECK_THROWS_AS(read_matrix(partial), IoError);
}

TEST_CASE("binary read failures raise IoError") {
  TempDir dir;
  Matrix a = random_matrix(4, 4, 5);
  const auto good = dir.path / "good.rspm";
  write_matrix(good, a, MatrixFormat::kBinary);
  const std::string bytes = read_raw(good);

  const auto truncated = dir.path / "trunc.rspm";
  write_raw(truncated, bytes.substr(0, bytes.size() - 5));
  CHECK_THROWS_AS(read_matrix(truncated), IoError);

  const auto header_only = dir.path / "hdr.rspm";
  write_raw(header_only, bytes.substr(0, 10));
  CHECK_THROWS_AS(read_matrix(header_only), IoError);

  const auto bad_version = dir.path / "ver.rspm";
  std::string mutated = bytes;
  mutated[4] = 2;  // version 2
  write_raw(bad_version, mutated);
  CHECK_THROWS_AS(read_matrix(bad_version), IoError);

  const auto oversized = dir.path / "big.rspm";
  write_raw(oversized, bytes + "xx");
  CHECK_THROWS_AS(read_matrix(oversized), IoError);

  const auto nan_payload = dir.path / "nan.rspm";
  // Plant a NaN by patching the payload bytes directly.
  std::string patched = bytes;
  std::uint64_t nan_bits;
  const double nan_value = std::numeric_limits<double>::quiet_NaN();
  std::memcpy(&nan_bits, &nan_value, 8);
  for (int b = 0; b < 8; ++b) patched[22 + b] = static_cast<char>((nan_bits >> (8 * b)) & 0xFF);
  write_raw(nan_payload, patched);
  CHECK_THROWS_AS(read_matrix(nan_payload), IoError);
}

TEST_CASE("write_matrix rejects empty input") {
  TempDir dir;
  CHECK_THROWS_AS(write_matrix(dir.path / "e.csv", Matrix(), MatrixFormat::kCsv),
                  std::invalid_argument);
}

TEST_CASE("labels round trip and validate") {
  TempDir dir;
  const std::vector<int> labels = {0, 1, 1, 0, 2, 7};
  const auto p = dir.path / "labels.csv";
  write_labels(p, labels);
  CHECK(read_raw(p) == "0\n1\n1\n0\n2\n7\n");
  CHECK(read_labels(p) == labels);

  const auto negative = dir.path / "neg.csv";
  write_raw(negative, "0\n-1\n");
  CHECK_THROWS_AS(read_labels(negative), IoError);

  const auto junk = dir.path / "junk.csv";
  write_raw(junk, "0\none\n");
  CHECK_THROWS_AS(read_labels(junk), IoError);

  CHECK_THROWS_AS(read_labels(dir.path / "missing.csv"), IoError);
  CHECK_THROWS_AS(write_labels(dir.path / "x.csv", {}), std::invalid_argument);
}

TEST_CASE("atomic json writes are sorted, indented, and newline-terminated") {
  TempDir dir;
  nlohmann::json j;
  j["zeta"] = 1;
  j["alpha"] = {1, 2};
  j["mid"] = "text";
  const auto p = dir.path / "out.json";
  write_json_atomic(p, j);

  // nlohmann::json objects iterate in sorted key order, which dump preserves.
  CHECK(read_raw(p) ==
        "{\n  \"alpha\": [\n    1,\n    2\n  ],\n  \"mid\": \"text\",\n  \"zeta\": 1\n}\n");
  CHECK(!std::filesystem::exists(dir.path / "out.json.tmp"));

  const nlohmann::json back = read_json(p);
  CHECK(back["zeta"] == 1);
  CHECK(back["alpha"][1] == 2);

  const auto bad = dir.path / "bad.json";
  write_raw(bad, "{not json");
  CHECK_THROWS_AS(read_json(bad), IoError);
  CHECK_THROWS_AS(read_json(dir.path / "missing.json"), IoError);
}
