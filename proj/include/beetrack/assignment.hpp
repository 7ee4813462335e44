#pragma once

#include <cstddef>
#include <span>
#include <utility>
#include <vector>

namespace beetrack {

/// Dense rows x cols matrix of correspondence probabilities, row-major.
class ScoreMatrix {
public:
    ScoreMatrix() = default;
    ScoreMatrix(std::size_t rows, std::size_t cols, double fill = 0.0)
        : rows_(rows), cols_(cols), probs_(rows * cols, fill) {}

    std::size_t rows() const { return rows_; }
    std::size_t cols() const { return cols_; }
    bool empty() const { return rows_ == 0 || cols_ == 0; }

    double& operator()(std::size_t r, std::size_t c) { return probs_[r * cols_ + c]; }
    double operator()(std::size_t r, std::size_t c) const { return probs_[r * cols_ + c]; }

    std::span<const double> values() const { return probs_; }

private:
    std::size_t rows_ = 0;
    std::size_t cols_ = 0;
    std::vector<double> probs_;
};

using Match = std::pair<std::size_t, std::size_t>;

/// Maximum-total-probability assignment followed by rejection of pairs
/// below `threshold`.
///
/// Runs the Hungarian algorithm on cost = 1 - prob over the whole matrix;
/// rectangular inputs behave as if padded with dummy rows/columns that are
/// never preferred over a real entry. Pairs with prob < threshold are then
/// dropped. Result is sorted by row. Throws InvalidInput on NaN entries or a
/// threshold outside [0, 1].
std::vector<Match> solve_assignment(const ScoreMatrix& m, double threshold);

/// An allowed (row, col) pair of a sparse problem.
struct Edge {
    std::size_t row;
    std::size_t col;
    double prob;
};

/// Same contract as solve_assignment on a matrix where every pair not listed
/// in `edges` is forbidden. Independent connected components are solved
/// separately, which keeps per-frame cost proportional to local density.
std::vector<Match> solve_sparse_assignment(std::size_t rows, std::size_t cols,
                                           std::span<const Edge> edges, double threshold);

} // namespace beetrack
