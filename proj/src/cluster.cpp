#include "sedigest/cluster.hpp"

#include <algorithm>
#include <cmath>
#include <deque>
#include <limits>
#include <numeric>
#include <set>

namespace sedigest::cluster {
namespace {

std::pair<int, int> ordered(int a, int b) { return a < b ? std::pair{a, b} : std::pair{b, a}; }

struct UnionFind {
    std::vector<int> parent;
    explicit UnionFind(int n) : parent(n) { std::iota(parent.begin(), parent.end(), 0); }
    int find(int x) {
        while (parent[x] != x) {
            parent[x] = parent[parent[x]];
            x = parent[x];
        }
        return x;
    }
};

// Dendrogram node for ids >= n_points; children may be points or nodes.
struct Merge {
    int left, right;
    double weight;
    int size;
};

}  // namespace

void ClusterParams::validate() const {
    if (min_cluster_size < 2) {
        throw UsageError("min_cluster_size must be at least 2, got " +
                         std::to_string(min_cluster_size));
    }
    if (min_samples < 0) throw UsageError("min_samples must not be negative");
    if (effective_min_samples() > min_cluster_size) {
        throw UsageError("min_samples must not exceed min_cluster_size");
    }
}

int Clustering::cluster_count() const {
    int count = 0;
    for (int label : labels) count = std::max(count, label + 1);
    return count;
}

std::vector<int> Clustering::cluster_sizes() const {
    std::vector<int> sizes(cluster_count(), 0);
    for (int label : labels) {
        if (label >= 0) ++sizes[label];
    }
    return sizes;
}

int Clustering::outlier_count() const {
    return static_cast<int>(std::count(labels.begin(), labels.end(), -1));
}

namespace {

double euclidean(const Eigen::VectorXf& a, const Eigen::VectorXf& b) {
    double sum = 0.0;
    for (Eigen::Index l = 0; l < a.size(); ++l) {
        double diff = double(a[l]) - double(b[l]);
        sum += diff * diff;
    }
    return std::sqrt(sum);
}

}  // namespace

double MutualReachability::distance(std::size_t i, std::size_t j) const {
    return euclidean(points[i], points[j]);
}

double MutualReachability::operator()(std::size_t i, std::size_t j) const {
    return std::max({core[i], core[j], distance(i, j)});
}

std::vector<double> core_distances(const std::vector<Eigen::VectorXf>& points, int k) {
    const auto n = static_cast<int>(points.size());
    if (k < 1) throw UsageError("core distance neighbour count must be positive");
    if (k > n - 1) {
        throw UsageError("core distance neighbour count " + std::to_string(k) +
                         " exceeds point count minus one (" + std::to_string(n - 1) + ")");
    }
    std::vector<double> core(n);
    std::vector<double> dists;
    dists.reserve(n - 1);
    for (int i = 0; i < n; ++i) {
        dists.clear();
        for (int j = 0; j < n; ++j) {
            if (j != i) dists.push_back(euclidean(points[i], points[j]));
        }
        std::nth_element(dists.begin(), dists.begin() + (k - 1), dists.end());
        core[i] = dists[k - 1];
    }
    return core;
}

std::vector<Edge> minimum_spanning_tree(const MutualReachability& graph) {
    const auto n = static_cast<int>(graph.size());
    if (n < 2) throw UsageError("spanning tree requires at least two points");
    constexpr double kInf = std::numeric_limits<double>::infinity();
    std::vector<char> in_tree(n, 0);
    std::vector<double> best(n, kInf);
    std::vector<int> from(n, 0);
    in_tree[0] = 1;
    for (int v = 1; v < n; ++v) best[v] = graph(0, v);

    std::vector<Edge> edges;
    edges.reserve(n - 1);
    for (int step = 1; step < n; ++step) {
        int u = -1;
        for (int v = 0; v < n; ++v) {
            if (in_tree[v]) continue;
            if (u < 0 || best[v] < best[u] ||
                (best[v] == best[u] && ordered(from[v], v) < ordered(from[u], u))) {
                u = v;
            }
        }
        auto [a, b] = ordered(from[u], u);
        edges.push_back({a, b, best[u]});
        in_tree[u] = 1;
        for (int v = 0; v < n; ++v) {
            if (in_tree[v]) continue;
            double w = graph(u, v);
            if (w < best[v] || (w == best[v] && ordered(u, v) < ordered(from[v], v))) {
                best[v] = w;
                from[v] = u;
            }
        }
    }
    return edges;
}

std::vector<CondensedNode> condense(std::vector<Edge> edges, int n_points,
                                    int min_cluster_size) {
    if (static_cast<int>(edges.size()) != n_points - 1) {
        throw UsageError("condense expects a spanning tree (n-1 edges)");
    }
    std::sort(edges.begin(), edges.end(), [](const Edge& x, const Edge& y) {
        if (x.weight != y.weight) return x.weight < y.weight;
        return ordered(x.a, x.b) < ordered(y.a, y.b);
    });

    // Single-linkage dendrogram: merge node ids start at n_points.
    std::vector<Merge> merges;
    merges.reserve(n_points - 1);
    UnionFind uf(2 * n_points - 1);
    std::vector<int> top(2 * n_points - 1);  // representative -> dendrogram node
    std::iota(top.begin(), top.end(), 0);
    auto node_size = [&](int id) {
        return id < n_points ? 1 : merges[id - n_points].size;
    };
    for (const Edge& e : edges) {
        int ra = top[uf.find(e.a)];
        int rb = top[uf.find(e.b)];
        int id = n_points + static_cast<int>(merges.size());
        merges.push_back({ra, rb, e.weight, node_size(ra) + node_size(rb)});
        uf.parent[uf.find(e.a)] = uf.find(e.b);
        top[uf.find(e.b)] = id;
    }

    auto lambda_of = [](double weight) {
        return weight > 0.0 ? std::min(1.0 / weight, kMaxLambda) : kMaxLambda;
    };
    auto points_under = [&](int id, auto&& emit) {
        std::deque<int> queue{id};
        while (!queue.empty()) {
            int cur = queue.front();
            queue.pop_front();
            if (cur < n_points) {
                emit(cur);
            } else {
                queue.push_back(merges[cur - n_points].left);
                queue.push_back(merges[cur - n_points].right);
            }
        }
    };

    std::vector<CondensedNode> tree;
    if (merges.empty()) return tree;
    const int root_node = 2 * n_points - 2;
    std::vector<int> relabel(2 * n_points - 1, -1);
    relabel[root_node] = n_points;
    int next_label = n_points + 1;
    std::deque<int> queue{root_node};
    while (!queue.empty()) {
        int node = queue.front();
        queue.pop_front();
        const Merge& merge = merges[node - n_points];
        const double lambda = lambda_of(merge.weight);
        const int label = relabel[node];
        int sides[2] = {merge.left, merge.right};
        bool big[2];
        for (int s = 0; s < 2; ++s) big[s] = node_size(sides[s]) >= min_cluster_size;
        if (big[0] && big[1]) {
            for (int side : sides) {
                relabel[side] = next_label++;
                tree.push_back({label, relabel[side], lambda, node_size(side)});
                if (side >= n_points) queue.push_back(side);
            }
        } else {
            for (int s = 0; s < 2; ++s) {
                if (big[s]) {
                    // Lone survivor keeps the parent's identity.
                    relabel[sides[s]] = label;
                    if (sides[s] >= n_points) queue.push_back(sides[s]);
                } else {
                    points_under(sides[s],
                                 [&](int p) { tree.push_back({label, p, lambda, 1}); });
                }
            }
        }
    }
    return tree;
}

Clustering extract(const std::vector<CondensedNode>& tree, int n_points) {
    Clustering result;
    result.labels.assign(n_points, -1);
    result.condensed_tree = tree;
    if (tree.empty()) return result;

    const int root = n_points;
    std::map<int, double> birth;
    birth[root] = 0.0;
    for (const auto& rec : tree) {
        if (rec.child >= n_points) birth[rec.child] = rec.lambda;
    }
    std::map<int, double>& stability = result.stabilities;
    for (const auto& [id, unused] : birth) stability[id] = 0.0;
    for (const auto& rec : tree) {
        stability[rec.parent] += (rec.lambda - birth.at(rec.parent)) * rec.size;
    }

    std::map<int, std::vector<int>> cluster_children;
    std::map<int, int> point_parent;
    for (const auto& rec : tree) {
        if (rec.child >= n_points) {
            cluster_children[rec.parent].push_back(rec.child);
        } else {
            point_parent[rec.child] = rec.parent;
        }
    }

    // Excess of mass, leaves first (child ids always exceed their parent's).
    std::vector<int> candidates;
    for (const auto& [id, unused] : stability) {
        if (id != root) candidates.push_back(id);
    }
    std::sort(candidates.rbegin(), candidates.rend());
    std::map<int, char> selected;
    std::map<int, double> propagated = stability;
    for (int c : candidates) {
        double subtree = 0.0;
        for (int child : cluster_children[c]) subtree += propagated[child];
        if (subtree > stability[c]) {
            selected[c] = 0;
            propagated[c] = subtree;
        } else {
            selected[c] = 1;
            std::deque<int> queue(cluster_children[c].begin(), cluster_children[c].end());
            while (!queue.empty()) {
                int d = queue.front();
                queue.pop_front();
                selected[d] = 0;
                const auto& kids = cluster_children[d];
                queue.insert(queue.end(), kids.begin(), kids.end());
            }
        }
    }
    if (candidates.empty()) selected[root] = 1;  // no split ever qualified
    for (const auto& [c, on] : selected) {
        if (on) result.selected.push_back(c);
    }

    // Points inherit the nearest selected ancestor of their exit cluster.
    std::map<int, int> parent_of;
    for (const auto& [parent, children] : cluster_children) {
        for (int child : children) parent_of[child] = parent;
    }
    std::map<int, std::vector<int>> members;
    for (const auto& [point, exit_cluster] : point_parent) {
        int c = exit_cluster;
        while (c != root && !selected[c]) c = parent_of.at(c);
        if (selected[c]) members[c].push_back(point);
    }

    // Dense labels by descending size; ties to the earliest member.
    std::vector<std::pair<int, const std::vector<int>*>> order;
    for (const auto& [c, pts] : members) order.emplace_back(c, &pts);
    std::stable_sort(order.begin(), order.end(), [](const auto& x, const auto& y) {
        if (x.second->size() != y.second->size()) return x.second->size() > y.second->size();
        return *std::min_element(x.second->begin(), x.second->end()) <
               *std::min_element(y.second->begin(), y.second->end());
    });
    for (std::size_t label = 0; label < order.size(); ++label) {
        for (int p : *order[label].second) result.labels[p] = static_cast<int>(label);
    }
    return result;
}

Clustering cluster_documents(const std::vector<vector_space::DocVector>& vectors,
                             const ClusterParams& params, WarningLog* warnings) {
    params.validate();
    const auto n = static_cast<int>(vectors.size());
    std::vector<int> subset;  // indices of documents with a usable embedding
    std::vector<Eigen::VectorXf> points;
    for (int i = 0; i < n; ++i) {
        const auto& v = vectors[i];
        if (v.full.size() == 0 || !(v.full.array() != 0.0f).any()) continue;
        subset.push_back(i);
        points.push_back(v.reduced.size() > 0 ? v.reduced : v.full);
    }

    Clustering result;
    result.labels.assign(n, -1);
    const auto m = static_cast<int>(points.size());
    if (m < params.min_cluster_size) {
        warn(warnings, "only " + std::to_string(m) + " usable documents for clustering " +
                           "(min_cluster_size " + std::to_string(params.min_cluster_size) +
                           "); everything is an outlier");
        return result;
    }

    const int k = std::min(params.effective_min_samples(), m - 1);
    std::vector<double> core = core_distances(points, k);
    MutualReachability graph{points, core};
    std::vector<Edge> mst = minimum_spanning_tree(graph);
    std::vector<CondensedNode> tree = condense(std::move(mst), m, params.min_cluster_size);
    Clustering sub = extract(tree, m);

    // Rewrite subset ids back into corpus positions (clusters shift to n+…).
    for (int i = 0; i < m; ++i) result.labels[subset[i]] = sub.labels[i];
    auto remap = [&](int id) { return id < m ? subset[id] : n + (id - m); };
    result.condensed_tree.reserve(sub.condensed_tree.size());
    for (const auto& rec : sub.condensed_tree) {
        result.condensed_tree.push_back(
            {remap(rec.parent), remap(rec.child), rec.lambda, rec.size});
    }
    for (const auto& [id, s] : sub.stabilities) result.stabilities[n + (id - m)] = s;
    result.selected.reserve(sub.selected.size());
    for (int id : sub.selected) result.selected.push_back(n + (id - m));
    return result;
}

nlohmann::json params_to_json(const ClusterParams& params) {
    return {{"min_cluster_size", params.min_cluster_size},
            {"min_samples", params.effective_min_samples()},
            {"metric", "euclidean"}};
}

ClusterParams params_from_json(const nlohmann::json& j) {
    ClusterParams params;
    if (j.contains("min_cluster_size")) params.min_cluster_size = j.at("min_cluster_size");
    if (j.contains("min_samples") && !j.at("min_samples").is_null()) {
        params.min_samples = j.at("min_samples");
    }
    if (j.contains("metric") && j.at("metric") != "euclidean") {
        throw UsageError("unsupported cluster metric: " + j.at("metric").get<std::string>());
    }
    params.validate();
    return params;
}

nlohmann::json clustering_to_json(const Clustering& clustering, const ClusterParams& params) {
    nlohmann::json tree = nlohmann::json::array();
    for (const auto& rec : clustering.condensed_tree) {
        tree.push_back({rec.parent, rec.child, rec.lambda, rec.size});
    }
    nlohmann::json stabilities = nlohmann::json::object();
    for (const auto& [id, s] : clustering.stabilities) {
        stabilities[std::to_string(id)] = s;
    }
    return {{"labels", clustering.labels},
            {"params", params_to_json(params)},
            {"condensed_tree", tree},
            {"stabilities", stabilities},
            {"selected", clustering.selected}};
}

Clustering clustering_from_json(const nlohmann::json& j) {
    Clustering clustering;
    clustering.labels = j.at("labels").get<std::vector<int>>();
    for (const auto& rec : j.at("condensed_tree")) {
        clustering.condensed_tree.push_back(
            {rec.at(0).get<int>(), rec.at(1).get<int>(), rec.at(2).get<double>(),
             rec.at(3).get<int>()});
    }
    for (const auto& [key, value] : j.at("stabilities").items()) {
        clustering.stabilities[std::stoi(key)] = value.get<double>();
    }
    if (j.contains("selected")) clustering.selected = j.at("selected").get<std::vector<int>>();
    return clustering;
}

}  // namespace sedigest::cluster
