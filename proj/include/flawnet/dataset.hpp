#pragma once

#include <cmath>
#include <fstream>
#include <sstream>
#include <string>
#include <vector>

#include "flawnet/csv.hpp"
#include "flawnet/matrix.hpp"

namespace flawnet {

/// Aligned per-function feature vectors for the two modalities plus binary
/// flaw labels. Immutable by convention once loaded or generated.
struct BimodalDataset {
  std::vector<std::string> ids;
  Matrix x;  // n × dim_x source-modality features
  Matrix y;  // n × dim_y binary-modality features
  std::vector<int> labels;               // 0 = not flawed, 1 = flawed
  std::vector<std::string> x_names;      // feature names without the src_ prefix
  std::vector<std::string> y_names;      // feature names without the bin_ prefix

  std::size_t size() const { return ids.size(); }
  std::size_t dim_x() const { return x.cols(); }
  std::size_t dim_y() const { return y.cols(); }

  void validate() const {
    if (x.rows() != size() || y.rows() != size() || labels.size() != size())
      throw DataError("dataset row counts disagree");
    if (x_names.size() != dim_x() || y_names.size() != dim_y())
      throw DataError("dataset feature name counts disagree");
    for (int l : labels)
      if (l != 0 && l != 1) throw DataError("dataset label outside {0,1}");
    if (!all_finite(x) || !all_finite(y)) throw DataError("dataset contains non-finite values");
  }
};

/// Loads the interchange CSV: header `id,label,src_*...,bin_*...`, one row
/// per function. Every validation failure reports its 1-based line number.
inline BimodalDataset load_dataset_csv(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw DataError("cannot open dataset file '" + path + "'");
  std::string line;
  if (!std::getline(in, line)) throw DataError("dataset file '" + path + "' is empty");
  if (!line.empty() && line.back() == '\r') line.pop_back();

  const auto header = parse_csv_line(line, 1);
  if (header.size() < 2 || header[0] != "id" || header[1] != "label")
    throw DataError("line 1: header must start with 'id,label'");
  BimodalDataset ds;
  bool in_bin = false;
  for (std::size_t i = 2; i < header.size(); ++i) {
    const auto& h = header[i];
    if (h.rfind("src_", 0) == 0) {
      if (in_bin) throw DataError("line 1: src_ column after bin_ columns");
      ds.x_names.push_back(h.substr(4));
    } else if (h.rfind("bin_", 0) == 0) {
      in_bin = true;
      ds.y_names.push_back(h.substr(4));
    } else {
      throw DataError("line 1: header field '" + h + "' must start with src_ or bin_");
    }
  }
  for (std::size_t i = 0; i < header.size(); ++i)
    for (std::size_t j = i + 1; j < header.size(); ++j)
      if (header[i] == header[j])
        throw DataError("line 1: duplicate header field '" + header[i] + "'");

  const std::size_t dx = ds.x_names.size(), dy = ds.y_names.size();
  std::vector<double> xdata, ydata;
  std::size_t line_no = 1;
  while (std::getline(in, line)) {
    ++line_no;
    if (!line.empty() && line.back() == '\r') line.pop_back();
    if (line.empty()) continue;
    const auto fields = parse_csv_line(line, line_no);
    if (fields.size() != header.size())
      throw DataError("line " + std::to_string(line_no) + ": expected " +
                      std::to_string(header.size()) + " fields, got " +
                      std::to_string(fields.size()));
    ds.ids.push_back(fields[0]);
    if (fields[1] == "0") ds.labels.push_back(0);
    else if (fields[1] == "1") ds.labels.push_back(1);
    else
      throw DataError("line " + std::to_string(line_no) + ": label '" + fields[1] +
                      "' outside {0,1}");
    for (std::size_t c = 0; c < dx + dy; ++c) {
      const double v = parse_double_cell(fields[2 + c], line_no);
      if (!std::isfinite(v))
        throw DataError("line " + std::to_string(line_no) + ": non-finite feature value");
      (c < dx ? xdata : ydata).push_back(v);
    }
  }
  const std::size_t n = ds.ids.size();
  ds.x = Matrix(n, dx);
  ds.y = Matrix(n, dy);
  ds.x.data() = std::move(xdata);
  ds.y.data() = std::move(ydata);
  ds.validate();
  return ds;
}

inline void write_dataset_csv(const BimodalDataset& ds, const std::string& path) {
  ds.validate();
  std::ofstream out(path);
  if (!out) throw Error("cannot write dataset file '" + path + "'");
  out << "id,label";
  for (const auto& n : ds.x_names) out << ',' << csv_escape("src_" + n);
  for (const auto& n : ds.y_names) out << ',' << csv_escape("bin_" + n);
  out << '\n';
  for (std::size_t i = 0; i < ds.size(); ++i) {
    out << csv_escape(ds.ids[i]) << ',' << ds.labels[i];
    for (std::size_t j = 0; j < ds.dim_x(); ++j) out << ',' << format_double(ds.x(i, j));
    for (std::size_t j = 0; j < ds.dim_y(); ++j) out << ',' << format_double(ds.y(i, j));
    out << '\n';
  }
  if (!out) throw Error("failed writing dataset file '" + path + "'");
}

}  // namespace flawnet
