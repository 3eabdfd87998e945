#include "gpdistill/csv.hpp"

#include <charconv>
#include <cmath>
#include <sstream>

#include "gpdistill/errors.hpp"

namespace gpdistill {

std::string format_double(double v) {
  if (std::isnan(v)) return "nan";
  if (std::isinf(v)) return v > 0 ? "inf" : "-inf";
  char buf[64];
  const auto res = std::to_chars(buf, buf + sizeof(buf), v, std::chars_format::general, 17);
  return std::string(buf, res.ptr);
}

double parse_double(const std::string& field) {
  if (field == "nan") return std::nan("");
  if (field == "inf") return HUGE_VAL;
  if (field == "-inf") return -HUGE_VAL;
  double v = 0.0;
  const char* first = field.data();
  const char* last = first + field.size();
  if (first != last && *first == '+') ++first;
  const auto res = std::from_chars(first, last, v);
  if (res.ec != std::errc() || res.ptr != last || first == last)
    throw ParseError("not a number: '" + field + "'");
  return v;
}

namespace {

std::string quote_if_needed(const std::string& s) {
  if (s.find_first_of(",\"\n\r") == std::string::npos) return s;
  std::string out = "\"";
  for (char c : s) {
    if (c == '"') out += '"';
    out += c;
  }
  return out + "\"";
}

std::vector<std::string> split_line(const std::string& line, std::size_t lineno) {
  std::vector<std::string> fields;
  std::string cur;
  bool quoted = false;
  for (std::size_t i = 0; i < line.size(); ++i) {
    const char c = line[i];
    if (quoted) {
      if (c == '"') {
        if (i + 1 < line.size() && line[i + 1] == '"') {
          cur += '"';
          ++i;
        } else {
          quoted = false;
        }
      } else {
        cur += c;
      }
    } else if (c == '"') {
      quoted = true;
    } else if (c == ',') {
      fields.push_back(std::move(cur));
      cur.clear();
    } else {
      cur += c;
    }
  }
  if (quoted) throw ParseError("line " + std::to_string(lineno) + ": unterminated quote");
  fields.push_back(std::move(cur));
  return fields;
}

std::string trim(const std::string& s) {
  const auto b = s.find_first_not_of(" \t\r");
  if (b == std::string::npos) return {};
  const auto e = s.find_last_not_of(" \t\r");
  return s.substr(b, e - b + 1);
}

}  // namespace

CsvWriter::CsvWriter(const std::filesystem::path& path, const std::vector<std::string>& header)
    : out_(path, std::ios::binary | std::ios::trunc), path_(path), columns_(header.size()) {
  if (!out_) throw Error("cannot open '" + path.string() + "' for writing");
  for (std::size_t i = 0; i < header.size(); ++i) out_ << (i ? "," : "") << quote_if_needed(header[i]);
  out_ << '\n';
}

CsvWriter& CsvWriter::add(double v) { return add(format_double(v)); }

CsvWriter& CsvWriter::add(long long v) { return add(std::to_string(v)); }

CsvWriter& CsvWriter::add(const std::string& v) {
  if (pending_ == columns_) {
    row_.clear();
    pending_ = 0;
    throw InvalidArgument("CsvWriter: too many fields in row of " + path_.string());
  }
  if (pending_) row_ += ',';
  row_ += quote_if_needed(v);
  ++pending_;
  return *this;
}

void CsvWriter::end_row() {
  if (pending_ != columns_) {
    const std::size_t got = pending_;
    row_.clear();
    pending_ = 0;
    throw InvalidArgument("CsvWriter: row has " + std::to_string(got) + " fields, header has " +
                          std::to_string(columns_));
  }
  out_ << row_ << '\n';
  row_.clear();
  pending_ = 0;
  ++rows_;
  if (!out_) throw Error("write failed for '" + path_.string() + "'");
}

std::size_t CsvTable::column(const std::string& name) const {
  for (std::size_t i = 0; i < header.size(); ++i)
    if (header[i] == name) return i;
  throw ParseError("missing column '" + name + "'");
}

CsvTable read_csv(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw ParseError("cannot open '" + path.string() + "'");
  CsvTable t;
  std::string line;
  std::size_t lineno = 0;
  while (std::getline(in, line)) {
    ++lineno;
    if (!line.empty() && line.back() == '\r') line.pop_back();
    if (trim(line).empty()) continue;
    auto fields = split_line(line, lineno);
    for (auto& f : fields) f = trim(f);
    if (t.header.empty()) {
      t.header = std::move(fields);
      continue;
    }
    if (fields.size() != t.header.size())
      throw ParseError(path.string() + ":" + std::to_string(lineno) + ": expected " +
                       std::to_string(t.header.size()) + " fields, got " + std::to_string(fields.size()));
    t.rows.push_back(std::move(fields));
  }
  if (t.header.empty()) throw ParseError("'" + path.string() + "' is empty");
  return t;
}

Dataset read_dataset_csv(const std::filesystem::path& path) {
  const CsvTable t = read_csv(path);
  const std::size_t cols = t.header.size();
  if (cols < 2 || t.header.back() != "y")
    throw ParseError(path.string() + ": header must be x1,...,xd,y");
  for (std::size_t j = 0; j + 1 < cols; ++j)
    if (t.header[j] != "x" + std::to_string(j + 1))
      throw ParseError(path.string() + ": header must be x1,...,xd,y (column " + std::to_string(j + 1) + " is '" +
                       t.header[j] + "')");
  if (t.rows.empty()) throw ParseError(path.string() + ": no data rows");
  Dataset d;
  const auto n = static_cast<Eigen::Index>(t.rows.size());
  d.xs.resize(n, static_cast<Eigen::Index>(cols - 1));
  d.ys.resize(n);
  for (Eigen::Index i = 0; i < n; ++i) {
    const auto& row = t.rows[static_cast<std::size_t>(i)];
    for (std::size_t j = 0; j + 1 < cols; ++j) d.xs(i, static_cast<Eigen::Index>(j)) = parse_double(row[j]);
    d.ys(i) = parse_double(row.back());
  }
  if (!d.xs.allFinite() || !d.ys.allFinite()) throw ParseError(path.string() + ": non-finite value");
  return d;
}

void write_dataset_csv(const std::filesystem::path& path, const Points& xs, const Eigen::VectorXd& ys) {
  std::vector<std::string> header;
  for (Eigen::Index j = 0; j < xs.cols(); ++j) header.push_back("x" + std::to_string(j + 1));
  header.push_back("y");
  CsvWriter w(path, header);
  for (Eigen::Index i = 0; i < xs.rows(); ++i) {
    for (Eigen::Index j = 0; j < xs.cols(); ++j) w.add(xs(i, j));
    w.add(ys(i));
    w.end_row();
  }
}

BinaryDataset read_binary_dataset_csv(const std::filesystem::path& path) {
  Dataset d = read_dataset_csv(path);
  if (!(d.ys.array() >= 0.0 && d.ys.array() <= 1.0).all())
    throw ParseError(path.string() + ": classification targets must lie in [0, 1]");
  return BinaryDataset{std::move(d.xs), std::move(d.ys)};
}

}  // namespace gpdistill
