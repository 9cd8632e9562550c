#pragma once

#include <vector>

namespace umig {

/// Maximum-weight assignment on a rows x cols weight matrix (Hungarian
/// method). result[i] is the column given to row i, or -1. Pairs of zero
/// or negative weight are never reported.
std::vector<int> max_weight_assignment(const std::vector<std::vector<double>>& weights);

}  // namespace umig
