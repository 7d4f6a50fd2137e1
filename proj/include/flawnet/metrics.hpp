#pragma once

#include <vector>

#include "flawnet/error.hpp"
#include "flawnet/matrix.hpp"

namespace flawnet {

/// Mean of per-class recalls, i.e. accuracy weighted by inverse class size.
inline double balanced_accuracy(const std::vector<int>& predictions,
                                const std::vector<int>& labels) {
  if (predictions.size() != labels.size())
    throw DataError("balanced_accuracy: prediction/label counts differ");
  double count[2] = {0.0, 0.0};
  double hit[2] = {0.0, 0.0};
  for (std::size_t i = 0; i < labels.size(); ++i) {
    const int l = labels[i];
    if (l != 0 && l != 1) throw DataError("balanced_accuracy: label outside {0,1}");
    count[l] += 1.0;
    if (predictions[i] == l) hit[l] += 1.0;
  }
  if (count[0] == 0.0 || count[1] == 0.0)
    throw DataError("balanced_accuracy: labels contain a single class");
  return 0.5 * (hit[0] / count[0] + hit[1] / count[1]);
}

/// Argmax over the two columns; ties go to class 0.
inline std::vector<int> argmax_labels(const Matrix& scores) {
  std::vector<int> out(scores.rows());
  for (std::size_t i = 0; i < scores.rows(); ++i) out[i] = scores(i, 1) > scores(i, 0) ? 1 : 0;
  return out;
}

}  // namespace flawnet
