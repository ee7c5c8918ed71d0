#ifndef RQDA_CSV_HPP
#define RQDA_CSV_HPP

#include <charconv>
#include <cmath>
#include <cstddef>
#include <fstream>
#include <ostream>
#include <sstream>
#include <string>
#include <string_view>
#include <vector>

#include "rqda/error.hpp"
#include "rqda/types.hpp"

namespace rqda::csv {

// Numeric CSV: a header row, comma separated, '.' decimals, no missing values.
struct Table {
  std::vector<std::string> header;
  Matrix values;
};

/// Shortest decimal string that round-trips to the same double.
inline std::string format_double(double v) {
  char buf[32];
  const auto res = std::to_chars(buf, buf + sizeof(buf), v);
  return std::string(buf, res.ptr);
}

namespace detail {

inline std::string_view trim(std::string_view s) {
  while (!s.empty() && (s.front() == ' ' || s.front() == '\t')) s.remove_prefix(1);
  while (!s.empty() && (s.back() == ' ' || s.back() == '\t' || s.back() == '\r')) s.remove_suffix(1);
  return s;
}

inline std::vector<std::string_view> split(std::string_view line) {
  std::vector<std::string_view> out;
  for (;;) {
    const auto pos = line.find(',');
    out.push_back(trim(line.substr(0, pos)));
    if (pos == std::string_view::npos) break;
    line.remove_prefix(pos + 1);
  }
  return out;
}

} // namespace detail

inline Table parse(std::istream& in, const std::string& source = "<input>") {
  std::string line;
  std::size_t line_no = 0;
  Table t;
  bool have_header = false;
  std::vector<std::vector<double>> rows;
  while (std::getline(in, line)) {
    ++line_no;
    if (line_no == 1 && line.starts_with("\xEF\xBB\xBF")) {
      line.erase(0, 3);
    }
    if (detail::trim(line).empty()) continue;
    const auto fields = detail::split(line);
    if (!have_header) {
      for (auto f : fields) t.header.emplace_back(f);
      have_header = true;
      continue;
    }
    if (fields.size() != t.header.size()) {
      throw DataError(source + ":" + std::to_string(line_no) + ": expected " + std::to_string(t.header.size()) +
                      " fields, found " + std::to_string(fields.size()));
    }
    std::vector<double> row(fields.size());
    for (std::size_t j = 0; j < fields.size(); ++j) {
      const auto f = fields[j];
      const auto res = std::from_chars(f.data(), f.data() + f.size(), row[j]);
      if (f.empty() || res.ec != std::errc() || res.ptr != f.data() + f.size() || !std::isfinite(row[j])) {
        throw DataError(source + ":" + std::to_string(line_no) + ": column '" + t.header[j] +
                        "' has non-numeric or missing value '" + std::string(f) + "'");
      }
    }
    rows.push_back(std::move(row));
  }
  if (!have_header) {
    throw DataError(source + ": empty data file");
  }
  if (rows.empty()) {
    throw DataError(source + ": no data rows");
  }
  t.values.resize(static_cast<Eigen::Index>(rows.size()), static_cast<Eigen::Index>(t.header.size()));
  for (std::size_t i = 0; i < rows.size(); ++i) {
    for (std::size_t j = 0; j < rows[i].size(); ++j) {
      t.values(static_cast<Eigen::Index>(i), static_cast<Eigen::Index>(j)) = rows[i][j];
    }
  }
  return t;
}

inline Table read(const std::string& path) {
  std::ifstream in(path);
  if (!in) {
    throw DataError("cannot open '" + path + "'");
  }
  return parse(in, path);
}

struct LabeledData {
  Matrix X;
  Labels y;
  std::vector<std::string> feature_names;
};

inline std::ptrdiff_t find_column(const Table& t, std::string_view name) {
  for (std::size_t j = 0; j < t.header.size(); ++j) {
    if (t.header[j] == name) return static_cast<std::ptrdiff_t>(j);
  }
  return -1;
}

/// Splits off the named label column; every other column is a feature. With
/// `require_label` false a missing label column is allowed and y is empty.
inline LabeledData split_label(const Table& t, std::string_view label_col, bool require_label = true) {
  const auto label = find_column(t, label_col);
  if (label < 0 && require_label) {
    throw DataError("label column '" + std::string(label_col) + "' not found");
  }
  LabeledData d;
  std::vector<Eigen::Index> features;
  for (std::size_t j = 0; j < t.header.size(); ++j) {
    if (static_cast<std::ptrdiff_t>(j) != label) {
      features.push_back(static_cast<Eigen::Index>(j));
      d.feature_names.push_back(t.header[j]);
    }
  }
  if (features.empty()) {
    throw DataError("no feature columns");
  }
  d.X.resize(t.values.rows(), static_cast<Eigen::Index>(features.size()));
  for (std::size_t k = 0; k < features.size(); ++k) {
    d.X.col(static_cast<Eigen::Index>(k)) = t.values.col(features[k]);
  }
  if (label >= 0) {
    d.y.resize(static_cast<std::size_t>(t.values.rows()));
    for (Eigen::Index i = 0; i < t.values.rows(); ++i) {
      const double v = t.values(i, label);
      if (v != 0.0 && v != 1.0) {
        throw DataError("labels must be 0/1 (data row " + std::to_string(i + 1) + " has " + format_double(v) + ")");
      }
      d.y[static_cast<std::size_t>(i)] = static_cast<int>(v);
    }
  }
  return d;
}

inline void write_header(std::ostream& out, const std::vector<std::string>& header) {
  for (std::size_t j = 0; j < header.size(); ++j) {
    out << (j ? "," : "") << header[j];
  }
  out << '\n';
}

} // namespace rqda::csv

#endif // RQDA_CSV_HPP
