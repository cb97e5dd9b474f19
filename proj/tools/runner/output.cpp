#include "output.hpp"

#include <openssl/evp.h>

#include <cstdio>
#include <iterator>
#include <sstream>

#include "invp/error.hpp"

namespace invp::runner {

std::string fmt(double v) {
  char buf[40];
  std::snprintf(buf, sizeof buf, "%.12g", v);
  return buf;
}

CsvWriter::CsvWriter(const std::filesystem::path& path, const std::vector<std::string>& header)
    : out_(path, std::ios::binary) {
  if (!out_) throw Error(ErrorCode::kInvalidInput, "cannot write " + path.string());
  for (const auto& h : header) cell(h);
  end_row();
}

CsvWriter& CsvWriter::cell(const std::string& s) {
  if (!first_) out_ << ',';
  first_ = false;
  if (s.find_first_of(",\"\n") != std::string::npos) {
    out_ << '"';
    for (char c : s) out_ << (c == '"' ? std::string("\"\"") : std::string(1, c));
    out_ << '"';
  } else {
    out_ << s;
  }
  return *this;
}

CsvWriter& CsvWriter::cell(double v) { return cell(fmt(v)); }
CsvWriter& CsvWriter::cell(std::size_t v) { return cell(std::to_string(v)); }

void CsvWriter::end_row() {
  out_ << '\n';
  first_ = true;
}

void write_plot(const std::filesystem::path& path,
                const std::vector<std::pair<double, double>>& points) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw Error(ErrorCode::kInvalidInput, "cannot write " + path.string());
  for (const auto& [x, y] : points) out << fmt(x) << ' ' << fmt(y) << '\n';
}

std::string sha256_hex(const std::string& data) {
  unsigned char md[EVP_MAX_MD_SIZE];
  unsigned int len = 0;
  EVP_Digest(data.data(), data.size(), md, &len, EVP_sha256(), nullptr);
  static const char* hex = "0123456789abcdef";
  std::string out;
  for (unsigned i = 0; i < len; ++i) {
    out += hex[md[i] >> 4];
    out += hex[md[i] & 15];
  }
  return out;
}

std::string sha256_file(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  std::string data((std::istreambuf_iterator<char>(in)), std::istreambuf_iterator<char>());
  return sha256_hex(data);
}

}  // namespace invp::runner
