#pragma once

#include <filesystem>
#include <fstream>
#include <string>
#include <vector>

#include <Eigen/Dense>

#include "gpdistill/gpr.hpp"
#include "gpdistill/laplace.hpp"

namespace gpdistill {

// Locale-independent, 17 significant digits. Non-finite values become
// "inf", "-inf" and "nan".
std::string format_double(double v);

// Strict parse of a whole field; throws ParseError.
double parse_double(const std::string& field);

class CsvWriter {
 public:
  CsvWriter(const std::filesystem::path& path, const std::vector<std::string>& header);

  CsvWriter& add(double v);
  CsvWriter& add(long long v);
  CsvWriter& add(int v) { return add(static_cast<long long>(v)); }
  CsvWriter& add(std::size_t v) { return add(static_cast<long long>(v)); }
  CsvWriter& add(const std::string& v);
  CsvWriter& add(const char* v) { return add(std::string(v)); }
  void end_row();
  std::size_t rows() const { return rows_; }
  const std::filesystem::path& path() const { return path_; }

 private:
  std::ofstream out_;
  std::filesystem::path path_;
  std::size_t columns_;
  std::string row_;
  std::size_t pending_ = 0;
  std::size_t rows_ = 0;
};

struct CsvTable {
  std::vector<std::string> header;
  std::vector<std::vector<std::string>> rows;

  std::size_t column(const std::string& name) const;  // throws ParseError if absent
};

CsvTable read_csv(const std::filesystem::path& path);

// Header x1,...,xd,y with numeric fields.
Dataset read_dataset_csv(const std::filesystem::path& path);
void write_dataset_csv(const std::filesystem::path& path, const Points& xs, const Eigen::VectorXd& ys);

// Same format; y must lie in [0, 1].
BinaryDataset read_binary_dataset_csv(const std::filesystem::path& path);

}  // namespace gpdistill
