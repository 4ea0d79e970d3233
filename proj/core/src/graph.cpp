#include "delaylab/graph.hpp"

#include <deque>
#include <string>

namespace delaylab {

SkeletonGraph::SkeletonGraph(int nodes, double threshold)
    : nodes_(nodes), threshold_(threshold),
      adjacency_(static_cast<std::size_t>(nodes) * static_cast<std::size_t>(nodes), 0) {
    if (nodes < 0) throw ArgumentError("SkeletonGraph: negative node count");
}

void SkeletonGraph::add_arc(int from, int to) {
    if (from < 0 || to < 0 || from >= nodes_ || to >= nodes_)
        throw OutOfRangeError("SkeletonGraph::add_arc: node index out of range");
    auto& cell = adjacency_[static_cast<std::size_t>(from) * nodes_ + to];
    if (cell) return;
    cell = 1;
    arcs_.push_back({from, to});
}

bool SkeletonGraph::has_arc(int from, int to) const {
    if (from < 0 || to < 0 || from >= nodes_ || to >= nodes_) return false;
    return adjacency_[static_cast<std::size_t>(from) * nodes_ + to] != 0;
}

std::vector<bool> SkeletonGraph::reachable_from(int root) const {
    std::vector<bool> seen(static_cast<std::size_t>(nodes_), false);
    if (root < 0 || root >= nodes_) return seen;
    std::deque<int> queue{root};
    seen[root] = true;
    while (!queue.empty()) {
        const int u = queue.front();
        queue.pop_front();
        for (int v = 0; v < nodes_; ++v) {
            if (!seen[v] && adjacency_[static_cast<std::size_t>(u) * nodes_ + v]) {
                seen[v] = true;
                queue.push_back(v);
            }
        }
    }
    return seen;
}

SkeletonGraph epsilon_skeleton(const Matrix& matrix, double epsilon) {
    if (matrix.rows() != matrix.cols()) throw ArgumentError("epsilon_skeleton: matrix must be square");
    const int n = static_cast<int>(matrix.rows());
    SkeletonGraph graph(n, epsilon);
    for (int i = 0; i < n; ++i)
        for (int j = 0; j < n; ++j)
            if (i != j && matrix(i, j) >= epsilon) graph.add_arc(j, i);
    return graph;
}

QuasiStrongVerdict is_quasi_strongly_connected(const SkeletonGraph& graph) {
    const int n = graph.nodes();
    if (n == 0) return {};
    for (int root = 0; root < n; ++root) {
        const auto seen = graph.reachable_from(root);
        bool all = true;
        for (bool s : seen) all = all && s;
        if (all) return {true, root};
    }
    return {};
}

bool is_strongly_connected(const SkeletonGraph& graph) {
    const int n = graph.nodes();
    if (n == 0) return false;
    // Node 0 must reach everyone, and everyone must reach node 0.
    SkeletonGraph reversed(n, graph.threshold());
    for (const auto& arc : graph.arcs()) reversed.add_arc(arc.to, arc.from);
    for (bool s : graph.reachable_from(0))
        if (!s) return false;
    for (bool s : reversed.reachable_from(0))
        if (!s) return false;
    return true;
}

std::vector<int> weak_components(const SkeletonGraph& graph) {
    const int n = graph.nodes();
    SkeletonGraph undirected(n, graph.threshold());
    for (const auto& arc : graph.arcs()) {
        undirected.add_arc(arc.from, arc.to);
        undirected.add_arc(arc.to, arc.from);
    }
    std::vector<int> label(static_cast<std::size_t>(n), -1);
    int next = 0;
    for (int v = 0; v < n; ++v) {
        if (label[v] >= 0) continue;
        const auto seen = undirected.reachable_from(v);
        for (int u = 0; u < n; ++u)
            if (seen[u]) label[u] = next;
        ++next;
    }
    return label;
}

}  // namespace delaylab
