#pragma once

#include <cstdio>
#include <fstream>
#include <sstream>
#include <string>
#include <vector>

#include <json.hpp>

#include "flawnet/experiments.hpp"
#include "flawnet/serialize.hpp"

namespace flawnet {

inline nlohmann::json to_json(const TrainReport& r) {
  return {
      {"config", to_json(r.config)},
      {"seed", r.seed},
      {"lambda_resolved", r.lambda_resolved},
      {"rep_train_loss", r.rep_train_loss},
      {"rep_val_loss", r.rep_val_loss},
      {"rep_selected_epoch", r.rep_selected_epoch},
      {"head_train_loss", r.head_train_loss},
      {"head_val_accuracy", r.head_val_accuracy},
      {"head_selected_epoch", r.head_selected_epoch},
      {"test_balanced_accuracy", r.test_balanced_accuracy},
      {"test_balanced_accuracy_x_only", r.test_balanced_accuracy_x_only},
  };
}

inline nlohmann::json to_json(const CvReport& r) {
  nlohmann::json folds = nlohmann::json::array();
  for (const auto& f : r.folds) folds.push_back(to_json(f));
  return {
      {"config", to_json(r.config)},
      {"seed", r.seed},
      {"folds", std::move(folds)},
      {"mean_test_balanced_accuracy", r.mean_test_balanced_accuracy},
      {"std_test_balanced_accuracy", r.std_test_balanced_accuracy},
      {"mean_test_balanced_accuracy_x_only", r.mean_test_balanced_accuracy_x_only},
  };
}

inline nlohmann::json to_json(const SweepTable& t) {
  nlohmann::json rows = nlohmann::json::array();
  for (std::size_t r = 0; r < t.row_labels.size(); ++r) {
    nlohmann::json cells = nlohmann::json::array();
    for (std::size_t c = 0; c < t.archs.size(); ++c) {
      cells.push_back({{"arch", to_string(t.archs[c])}, {"cv", to_json(t.cells[r][c])}});
    }
    rows.push_back({{"label", t.row_labels[r]}, {"cells", std::move(cells)}});
  }
  nlohmann::json archs = nlohmann::json::array();
  for (auto a : t.archs) archs.push_back(to_string(a));
  return {
      {"format", "flawnet-sweep"}, {"version", 1},
      {"kind", to_string(t.kind)}, {"seed", t.seed},
      {"base_config", to_json(t.base)}, {"row_header", t.row_header},
      {"archs", std::move(archs)}, {"rows", std::move(rows)},
  };
}

inline TrainReport train_report_from_json(const nlohmann::json& j) {
  TrainReport r;
  r.config = arch_config_from_json(j.at("config"));
  r.seed = j.at("seed").get<std::uint64_t>();
  r.lambda_resolved = j.at("lambda_resolved").get<double>();
  r.rep_train_loss = j.at("rep_train_loss").get<std::vector<double>>();
  r.rep_val_loss = j.at("rep_val_loss").get<std::vector<double>>();
  r.rep_selected_epoch = j.at("rep_selected_epoch").get<std::size_t>();
  r.head_train_loss = j.at("head_train_loss").get<std::vector<double>>();
  r.head_val_accuracy = j.at("head_val_accuracy").get<std::vector<double>>();
  r.head_selected_epoch = j.at("head_selected_epoch").get<std::size_t>();
  r.test_balanced_accuracy = j.at("test_balanced_accuracy").get<double>();
  r.test_balanced_accuracy_x_only = j.at("test_balanced_accuracy_x_only").get<double>();
  return r;
}

inline CvReport cv_report_from_json(const nlohmann::json& j) {
  CvReport r;
  r.config = arch_config_from_json(j.at("config"));
  r.seed = j.at("seed").get<std::uint64_t>();
  for (const auto& f : j.at("folds")) r.folds.push_back(train_report_from_json(f));
  r.mean_test_balanced_accuracy = j.at("mean_test_balanced_accuracy").get<double>();
  r.std_test_balanced_accuracy = j.at("std_test_balanced_accuracy").get<double>();
  r.mean_test_balanced_accuracy_x_only =
      j.at("mean_test_balanced_accuracy_x_only").get<double>();
  return r;
}

inline SweepTable sweep_from_json(const nlohmann::json& j) {
  if (j.value("format", "") != "flawnet-sweep") throw DataError("not a flawnet-sweep file");
  SweepTable t;
  t.kind = parse_sweep_kind(j.at("kind").get<std::string>());
  t.seed = j.at("seed").get<std::uint64_t>();
  t.base = arch_config_from_json(j.at("base_config"));
  t.row_header = j.at("row_header").get<std::string>();
  for (const auto& a : j.at("archs")) t.archs.push_back(parse_arch_kind(a.get<std::string>()));
  for (const auto& row : j.at("rows")) {
    t.row_labels.push_back(row.at("label").get<std::string>());
    std::vector<CvReport> cells;
    for (const auto& cell : row.at("cells")) cells.push_back(cv_report_from_json(cell.at("cv")));
    t.cells.push_back(std::move(cells));
  }
  return t;
}

inline SweepTable load_sweep_json(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw DataError("cannot open sweep file '" + path + "'");
  nlohmann::json doc;
  try {
    in >> doc;
  } catch (const nlohmann::json::exception& e) {
    throw DataError(std::string("sweep file is malformed: ") + e.what());
  }
  return sweep_from_json(doc);
}

namespace detail {

inline std::string fixed3(double v) {
  char buf[32];
  std::snprintf(buf, sizeof buf, "%.3f", v);
  return buf;
}

}  // namespace detail

/// One data row per sweep cell: configuration columns first, then the mean
/// and sample standard deviation of test balanced accuracy.
inline std::string sweep_to_csv(const SweepTable& t) {
  std::ostringstream out;
  out << "sweep,row,arch,layer_width,layer_depth,lambda,init,augmented,"
         "mean_balanced_accuracy,std_balanced_accuracy\n";
  for (std::size_t r = 0; r < t.row_labels.size(); ++r) {
    for (std::size_t c = 0; c < t.archs.size(); ++c) {
      const CvReport& cv = t.cells[r][c];
      out << to_string(t.kind) << ',' << csv_escape(t.row_labels[r]) << ','
          << to_string(t.archs[c]) << ',' << cv.config.layer_width << ','
          << cv.config.layer_depth << ','
          << (cv.config.lambda_auto ? std::string("auto") : format_double(cv.config.lambda))
          << ',' << to_string(cv.config.init) << ',' << (cv.config.augment_train ? 1 : 0) << ','
          << format_double(cv.mean_test_balanced_accuracy) << ','
          << format_double(cv.std_test_balanced_accuracy) << '\n';
    }
  }
  return out.str();
}

/// Markdown table with one row per swept value and one column per
/// architecture; the best cell per architecture column is bold.
inline std::string sweep_to_markdown(const SweepTable& t) {
  std::ostringstream out;
  out << "| " << t.row_header << " |";
  for (auto a : t.archs) out << ' ' << display_name(a) << " |";
  out << "\n|---|";
  for (std::size_t c = 0; c < t.archs.size(); ++c) out << "---|";
  out << '\n';
  std::vector<std::size_t> best_row(t.archs.size(), 0);
  for (std::size_t c = 0; c < t.archs.size(); ++c)
    for (std::size_t r = 1; r < t.row_labels.size(); ++r)
      if (t.cells[r][c].mean_test_balanced_accuracy >
          t.cells[best_row[c]][c].mean_test_balanced_accuracy)
        best_row[c] = r;
  for (std::size_t r = 0; r < t.row_labels.size(); ++r) {
    out << "| " << t.row_labels[r] << " |";
    for (std::size_t c = 0; c < t.archs.size(); ++c) {
      const std::string v = detail::fixed3(t.cells[r][c].mean_test_balanced_accuracy);
      out << ' ' << (r == best_row[c] ? "**" + v + "**" : v) << " |";
    }
    out << '\n';
  }
  return out.str();
}

inline void write_text_file(const std::string& path, const std::string& text) {
  std::ofstream out(path);
  if (!out) throw Error("cannot write file '" + path + "'");
  out << text;
  if (!out) throw Error("failed writing file '" + path + "'");
}

inline void write_json_file(const std::string& path, const nlohmann::json& doc) {
  write_text_file(path, doc.dump(2) + "\n");
}

}  // namespace flawnet
