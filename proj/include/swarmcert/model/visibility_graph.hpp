#ifndef SWARMCERT_MODEL_VISIBILITY_GRAPH_HPP
#define SWARMCERT_MODEL_VISIBILITY_GRAPH_HPP

#include <algorithm>
#include <set>
#include <stdexcept>
#include <utility>
#include <vector>

namespace swarmcert::model {

// Undirected intervisibility graph over robots 1..N.
class VisibilityGraph {
public:
    VisibilityGraph() = default;
    explicit VisibilityGraph(int n_robots) : n_(n_robots) {
        if (n_robots < 1) throw std::invalid_argument("VisibilityGraph: need >= 1 robot");
    }

    static VisibilityGraph complete(int n) {
        VisibilityGraph g(n);
        for (int i = 1; i <= n; ++i)
            for (int j = i + 1; j <= n; ++j) g.add_edge(i, j);
        return g;
    }

    static VisibilityGraph star(int n, int center = 1) {
        VisibilityGraph g(n);
        for (int i = 1; i <= n; ++i)
            if (i != center) g.add_edge(center, i);
        return g;
    }

    static VisibilityGraph cycle(int n) {
        VisibilityGraph g(n);
        for (int i = 1; i <= n; ++i) g.add_edge(i, i % n + 1);
        return g;
    }

    int n_robots() const { return n_; }

    void add_edge(int i, int j) {
        if (i == j) throw std::invalid_argument("VisibilityGraph: self-loop");
        if (i < 1 || j < 1 || i > n_ || j > n_)
            throw std::invalid_argument("VisibilityGraph: robot id out of range");
        edges_.insert({std::min(i, j), std::max(i, j)});
    }

    bool has_edge(int i, int j) const {
        return edges_.count({std::min(i, j), std::max(i, j)}) > 0;
    }

    const std::set<std::pair<int, int>>& edges() const { return edges_; }

    std::vector<int> neighbors(int i) const {
        std::vector<int> out;
        for (const auto& [a, b] : edges_) {
            if (a == i) out.push_back(b);
            if (b == i) out.push_back(a);
        }
        return out;
    }

    int degree(int i) const { return static_cast<int>(neighbors(i).size()); }

    int max_degree() const {
        int d = 0;
        for (int i = 1; i <= n_; ++i) d = std::max(d, degree(i));
        return d;
    }

    bool connected() const {
        if (n_ == 1) return true;
        std::vector<bool> seen(n_ + 1, false);
        std::vector<int> stack{1};
        seen[1] = true;
        int count = 1;
        while (!stack.empty()) {
            const int v = stack.back();
            stack.pop_back();
            for (int w : neighbors(v)) {
                if (!seen[w]) {
                    seen[w] = true;
                    ++count;
                    stack.push_back(w);
                }
            }
        }
        return count == n_;
    }

private:
    int n_ = 1;
    std::set<std::pair<int, int>> edges_;
};

}  // namespace swarmcert::model

#endif
