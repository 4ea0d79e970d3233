#include "delaylab/geometry.hpp"

#include <Eigen/LU>

#include <algorithm>
#include <limits>
#include <vector>

namespace delaylab {

namespace {

// Calls f(subset) for every subset of {0..count-1} with 1 <= size <= max_size.
template <class F>
void for_each_subset(int count, int max_size, F&& f) {
    std::vector<int> pick;
    auto rec = [&](auto&& self, int next) -> void {
        if (!pick.empty()) f(pick);
        if (static_cast<int>(pick.size()) == max_size) return;
        for (int v = next; v < count; ++v) {
            pick.push_back(v);
            self(self, v + 1);
            pick.pop_back();
        }
    };
    rec(rec, 0);
}

}  // namespace

double distance_to_hull(const Eigen::RowVectorXd& point, const Matrix& vertices) {
    if (vertices.rows() == 0) throw ArgumentError("distance_to_hull: empty vertex set");
    const auto m = vertices.cols();
    if (point.size() != m) throw ArgumentError("distance_to_hull: dimension mismatch");
    if (m > 3) throw ArgumentError("distance_to_hull: dimensions above 3 are not supported");

    double best = std::numeric_limits<double>::infinity();
    const int count = static_cast<int>(vertices.rows());
    for_each_subset(count, static_cast<int>(m) + 1, [&](const std::vector<int>& s) {
        const auto k = static_cast<Eigen::Index>(s.size()) - 1;
        const Eigen::RowVectorXd v0 = vertices.row(s[0]);
        if (k == 0) {
            best = std::min(best, (point - v0).norm());
            return;
        }
        Matrix d(k, m);
        for (Eigen::Index r = 0; r < k; ++r) d.row(r) = vertices.row(s[static_cast<std::size_t>(r) + 1]) - v0;
        const Matrix gram = d * d.transpose();
        Eigen::FullPivLU<Matrix> lu(gram);
        lu.setThreshold(1e-12);
        if (lu.rank() < k) return;  // degenerate subset, covered by a smaller one
        const Vector c = lu.solve(d * (point - v0).transpose());
        const double lead = 1.0 - c.sum();
        if (lead < -1e-12 || (c.array() < -1e-12).any()) return;
        const Eigen::RowVectorXd q = v0 + c.transpose() * d;
        best = std::min(best, (point - q).norm());
    });
    return best;
}

double distance_to_ball(const Eigen::RowVectorXd& point, const Eigen::RowVectorXd& center, double radius) {
    if (point.size() != center.size()) throw ArgumentError("distance_to_ball: dimension mismatch");
    if (!(radius >= 0.0)) throw ArgumentError("distance_to_ball: negative radius");
    return std::max(0.0, (point - center).norm() - radius);
}

}  // namespace delaylab
