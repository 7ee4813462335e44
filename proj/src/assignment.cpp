#include "beetrack/assignment.hpp"

#include "beetrack/errors.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numeric>

namespace beetrack {
namespace {

// Shortest augmenting path Hungarian method on an n x m cost matrix with
// n <= m. Returns, for each row, the assigned column.
std::vector<std::size_t> hungarian_min_cost(const std::vector<double>& cost, std::size_t n, std::size_t m) {
    constexpr double inf = std::numeric_limits<double>::infinity();
    std::vector<double> u(n + 1, 0.0), v(m + 1, 0.0);
    std::vector<std::size_t> p(m + 1, 0), way(m + 1, 0);
    std::vector<double> minv(m + 1);
    std::vector<char> used(m + 1);

    for (std::size_t i = 1; i <= n; ++i) {
        p[0] = i;
        std::size_t j0 = 0;
        std::fill(minv.begin(), minv.end(), inf);
        std::fill(used.begin(), used.end(), 0);
        do {
            used[j0] = 1;
            const std::size_t i0 = p[j0];
            double delta = inf;
            std::size_t j1 = 0;
            for (std::size_t j = 1; j <= m; ++j) {
                if (used[j]) continue;
                const double cur = cost[(i0 - 1) * m + (j - 1)] - u[i0] - v[j];
                if (cur < minv[j]) {
                    minv[j] = cur;
                    way[j] = j0;
                }
                if (minv[j] < delta) {
                    delta = minv[j];
                    j1 = j;
                }
            }
            for (std::size_t j = 0; j <= m; ++j) {
                if (used[j]) {
                    u[p[j]] += delta;
                    v[j] -= delta;
                } else {
                    minv[j] -= delta;
                }
            }
            j0 = j1;
        } while (p[j0] != 0);
        do {
            const std::size_t j1 = way[j0];
            p[j0] = p[j1];
            j0 = j1;
        } while (j0 != 0);
    }

    std::vector<std::size_t> row_to_col(n, 0);
    for (std::size_t j = 1; j <= m; ++j)
        if (p[j] != 0) row_to_col[p[j] - 1] = j - 1;
    return row_to_col;
}

void check_threshold(double threshold) {
    if (!(threshold >= 0.0 && threshold <= 1.0))
        throw InvalidInput("assignment threshold must lie in [0, 1]");
}

// Full matching of the smaller side; (row, col) pairs in matrix coordinates.
std::vector<Match> full_matching(const ScoreMatrix& m) {
    const bool transpose = m.rows() > m.cols();
    const std::size_t n = transpose ? m.cols() : m.rows();
    const std::size_t k = transpose ? m.rows() : m.cols();
    std::vector<double> cost(n * k);
    for (std::size_t i = 0; i < n; ++i)
        for (std::size_t j = 0; j < k; ++j)
            cost[i * k + j] = 1.0 - (transpose ? m(j, i) : m(i, j));

    const auto assigned = hungarian_min_cost(cost, n, k);
    std::vector<Match> out;
    out.reserve(n);
    for (std::size_t i = 0; i < n; ++i)
        out.emplace_back(transpose ? assigned[i] : i, transpose ? i : assigned[i]);
    return out;
}

} // namespace

std::vector<Match> solve_assignment(const ScoreMatrix& m, double threshold) {
    check_threshold(threshold);
    for (double p : m.values())
        if (std::isnan(p)) throw InvalidInput("solve_assignment: NaN probability in score matrix");
    if (m.empty()) return {};

    std::vector<Match> out;
    for (const auto& [r, c] : full_matching(m))
        if (m(r, c) >= threshold) out.emplace_back(r, c);
    std::sort(out.begin(), out.end());
    return out;
}

std::vector<Match> solve_sparse_assignment(std::size_t rows, std::size_t cols,
                                           std::span<const Edge> edges, double threshold) {
    check_threshold(threshold);
    for (const auto& e : edges) {
        if (std::isnan(e.prob)) throw InvalidInput("solve_sparse_assignment: NaN probability");
        if (e.row >= rows || e.col >= cols) throw InvalidInput("solve_sparse_assignment: edge out of range");
    }

    // Union-find over rows [0, rows) and cols [rows, rows + cols).
    std::vector<std::size_t> parent(rows + cols);
    std::iota(parent.begin(), parent.end(), std::size_t{0});
    auto find = [&](std::size_t x) {
        while (parent[x] != x) x = parent[x] = parent[parent[x]];
        return x;
    };
    for (const auto& e : edges) {
        const auto a = find(e.row), b = find(rows + e.col);
        if (a != b) parent[std::max(a, b)] = std::min(a, b);
    }

    // Group by component root, preserving index order inside each group.
    std::vector<std::vector<std::size_t>> comp_rows(rows + cols), comp_cols(rows + cols);
    for (std::size_t r = 0; r < rows; ++r) comp_rows[find(r)].push_back(r);
    for (std::size_t c = 0; c < cols; ++c) comp_cols[find(rows + c)].push_back(c);

    std::vector<std::size_t> local(rows + cols, 0);
    for (std::size_t root = 0; root < rows + cols; ++root) {
        for (std::size_t i = 0; i < comp_rows[root].size(); ++i) local[comp_rows[root][i]] = i;
        for (std::size_t j = 0; j < comp_cols[root].size(); ++j) local[rows + comp_cols[root][j]] = j;
    }
    std::vector<std::vector<const Edge*>> comp_edges(rows + cols);
    for (const auto& e : edges) comp_edges[find(e.row)].push_back(&e);

    std::vector<Match> out;
    for (std::size_t root = 0; root < rows + cols; ++root) {
        if (comp_rows[root].empty() || comp_cols[root].empty()) continue;
        ScoreMatrix sub(comp_rows[root].size(), comp_cols[root].size(), 0.0);
        std::vector<char> allowed(sub.rows() * sub.cols(), 0);
        for (const Edge* e : comp_edges[root]) {
            const auto i = local[e->row], j = local[rows + e->col];
            sub(i, j) = e->prob;
            allowed[i * sub.cols() + j] = 1;
        }
        for (const auto& [i, j] : full_matching(sub)) {
            if (!allowed[i * sub.cols() + j] || sub(i, j) < threshold) continue;
            out.emplace_back(comp_rows[root][i], comp_cols[root][j]);
        }
    }
    std::sort(out.begin(), out.end());
    return out;
}

} // namespace beetrack
