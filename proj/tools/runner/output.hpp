#pragma once

#include <filesystem>
#include <fstream>
#include <string>
#include <vector>

namespace invp::runner {

// Numbers in every output file use this format.
std::string fmt(double v);

class CsvWriter {
 public:
  CsvWriter(const std::filesystem::path& path, const std::vector<std::string>& header);
  CsvWriter& cell(double v);
  CsvWriter& cell(const std::string& s);
  CsvWriter& cell(std::size_t v);
  void end_row();

 private:
  std::ofstream out_;
  bool first_ = true;
};

// Two-column "x y" plot data.
void write_plot(const std::filesystem::path& path,
                const std::vector<std::pair<double, double>>& points);

std::string sha256_hex(const std::string& data);
std::string sha256_file(const std::filesystem::path& path);

}  // namespace invp::runner
