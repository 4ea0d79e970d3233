#pragma once

#include "delaylab/types.hpp"

#include <optional>
#include <vector>

namespace delaylab {

/// Arc (from, to): agent `from` influences agent `to`, i.e. a_{to,from} > 0.
struct Arc {
    int from = 0;
    int to = 0;
    friend bool operator==(const Arc&, const Arc&) = default;
};

class SkeletonGraph {
public:
    SkeletonGraph() = default;
    SkeletonGraph(int nodes, double threshold);

    void add_arc(int from, int to);

    [[nodiscard]] int nodes() const noexcept { return nodes_; }
    [[nodiscard]] double threshold() const noexcept { return threshold_; }
    [[nodiscard]] const std::vector<Arc>& arcs() const noexcept { return arcs_; }
    [[nodiscard]] bool has_arc(int from, int to) const;
    /// Nodes reachable from `root` along arc directions (root included).
    [[nodiscard]] std::vector<bool> reachable_from(int root) const;

private:
    int nodes_ = 0;
    double threshold_ = 0.0;
    std::vector<Arc> arcs_;
    std::vector<char> adjacency_;  // row = from, column = to
};

/// Arcs (j, i) for every off-diagonal entry matrix(i, j) >= epsilon.
[[nodiscard]] SkeletonGraph epsilon_skeleton(const Matrix& matrix, double epsilon);

struct QuasiStrongVerdict {
    bool connected = false;
    std::optional<int> root;  ///< smallest-index witness when connected
};

[[nodiscard]] QuasiStrongVerdict is_quasi_strongly_connected(const SkeletonGraph& graph);
[[nodiscard]] bool is_strongly_connected(const SkeletonGraph& graph);

/// Connected components of the undirected version of the graph; component
/// labels are assigned in order of the smallest member.
[[nodiscard]] std::vector<int> weak_components(const SkeletonGraph& graph);

}  // namespace delaylab
