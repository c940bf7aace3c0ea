#include <algorithm>
#include <cmath>
#include <random>
#include <set>
#include <vector>

#include "doctest.h"
#include "sedigest/cluster.hpp"
#include "support/oracles.hpp"

using namespace sedigest;
using namespace sedigest::cluster;

namespace {

Eigen::VectorXf p2(float x, float y) {
    Eigen::VectorXf v(2);
    v << x, y;
    return v;
}

// Same arithmetic as the library's metric: float coords widened to double.
double dist2(const Eigen::VectorXf& a, const Eigen::VectorXf& b) {
    double sum = 0.0;
    for (Eigen::Index i = 0; i < a.size(); ++i) {
        double d = double(a[i]) - double(b[i]);
        sum += d * d;
    }
    return std::sqrt(sum);
}

std::vector<std::vector<double>> distance_matrix(const std::vector<Eigen::VectorXf>& pts) {
    std::size_t n = pts.size();
    std::vector<std::vector<double>> dist(n, std::vector<double>(n, 0.0));
    for (std::size_t i = 0; i < n; ++i) {
        for (std::size_t j = i + 1; j < n; ++j) {
            dist[i][j] = dist[j][i] = dist2(pts[i], pts[j]);
        }
    }
    return dist;
}

std::vector<Eigen::VectorXf> random_points(std::mt19937_64& gen, int n) {
    std::uniform_real_distribution<float> coord(0.0f, 10.0f);
    std::vector<Eigen::VectorXf> pts;
    pts.reserve(n);
    for (int i = 0; i < n; ++i) pts.push_back(p2(coord(gen), coord(gen)));
    return pts;
}

// Two tight blobs far apart; indices 0-4 near (1,1), 5-10 near (10,10). No
// point sits at the origin: the zero vector means "failed to embed".
std::vector<Eigen::VectorXf> two_blobs() {
    return {p2(1.0f, 1.0f),   p2(1.1f, 1.0f),   p2(1.0f, 1.1f),  p2(1.1f, 1.1f),
            p2(1.05f, 1.05f), p2(10.0f, 10.0f), p2(10.1f, 10.0f), p2(10.0f, 10.1f),
            p2(10.1f, 10.1f), p2(10.05f, 10.05f), p2(10.02f, 10.08f)};
}

Clustering run_hdbscan(const std::vector<Eigen::VectorXf>& pts, int min_cluster_size) {
    int n = static_cast<int>(pts.size());
    int k = std::min(min_cluster_size, n - 1);
    auto core = core_distances(pts, k);
    MutualReachability graph{pts, core};
    auto mst = minimum_spanning_tree(graph);
    auto tree = condense(std::move(mst), n, min_cluster_size);
    return extract(tree, n);
}

}  // namespace

TEST_SUITE("cluster") {
    TEST_CASE("params validation") {
        ClusterParams p;
        CHECK_NOTHROW(p.validate());
        CHECK(p.effective_min_samples() == 15);
        p.min_samples = 5;
        CHECK(p.effective_min_samples() == 5);
        CHECK_NOTHROW(p.validate());
        p.min_samples = 16;
        CHECK_THROWS_AS(p.validate(), UsageError);
        p.min_samples = -1;
        CHECK_THROWS_AS(p.validate(), UsageError);
        p.min_samples = 0;
        p.min_cluster_size = 1;
        CHECK_THROWS_AS(p.validate(), UsageError);
    }

    TEST_CASE("core distances on a line") {
        std::vector<Eigen::VectorXf> pts;
        for (float x : {0.0f, 1.0f, 3.0f, 7.0f}) {
            Eigen::VectorXf v(1);
            v << x;
            pts.push_back(v);
        }
        auto k1 = core_distances(pts, 1);
        CHECK(k1 == std::vector<double>{1.0, 1.0, 2.0, 4.0});
        auto k2 = core_distances(pts, 2);
        CHECK(k2 == std::vector<double>{3.0, 2.0, 3.0, 6.0});
        CHECK_THROWS_AS(core_distances(pts, 0), UsageError);
        CHECK_THROWS_AS(core_distances(pts, 4), UsageError);
    }

    TEST_CASE("core distances match the brute-force oracle") {
        std::mt19937_64 gen(501);
        for (int trial = 0; trial < 25; ++trial) {
            int n = 5 + static_cast<int>(gen() % 20);
            auto pts = random_points(gen, n);
            auto dist = distance_matrix(pts);
            for (int k : {1, 2, n - 1}) {
                CAPTURE(trial);
                CAPTURE(k);
                auto fast = core_distances(pts, k);
                auto brute = oracle::core_distances_brute(dist, k);
                REQUIRE(fast.size() == brute.size());
                for (std::size_t i = 0; i < fast.size(); ++i) {
                    CHECK(fast[i] == brute[i]);
                }
            }
        }
    }

    TEST_CASE("mutual reachability dominates both core distances") {
        auto pts = two_blobs();
        auto core = core_distances(pts, 3);
        MutualReachability graph{pts, core};
        for (std::size_t i = 0; i < pts.size(); ++i) {
            for (std::size_t j = 0; j < pts.size(); ++j) {
                if (i == j) continue;
                double mr = graph(i, j);
                CHECK(mr >= core[i]);
                CHECK(mr >= core[j]);
                CHECK(mr >= graph.distance(i, j));
                CHECK(mr ==
                      std::max({core[i], core[j], graph.distance(i, j)}));
            }
        }
    }

    TEST_CASE("MST total matches exhaustive tree enumeration") {
        std::mt19937_64 gen(77);
        for (int trial = 0; trial < 100; ++trial) {
            int n = 3 + static_cast<int>(gen() % 6);  // 3..8
            auto pts = random_points(gen, n);
            int k = std::min(2, n - 1);
            auto core = core_distances(pts, k);
            MutualReachability graph{pts, core};

            auto dist = distance_matrix(pts);
            auto brute_core = oracle::core_distances_brute(dist, k);
            std::vector<std::vector<double>> mr(n, std::vector<double>(n, 0.0));
            for (int i = 0; i < n; ++i) {
                for (int j = 0; j < n; ++j) {
                    if (i != j) {
                        mr[i][j] = std::max({brute_core[i], brute_core[j], dist[i][j]});
                    }
                }
            }

            auto mst = minimum_spanning_tree(graph);
            REQUIRE(mst.size() == static_cast<std::size_t>(n - 1));
            std::vector<double> weights;
            std::set<int> touched;
            for (const auto& e : mst) {
                CHECK(e.a < e.b);
                weights.push_back(e.weight);
                touched.insert(e.a);
                touched.insert(e.b);
            }
            CHECK(touched.size() == static_cast<std::size_t>(n));  // spanning
            CAPTURE(trial);
            CAPTURE(n);
            CHECK(oracle::sorted_sum(weights) == oracle::mst_min_total(mr));
        }
    }

    TEST_CASE("MST tie-break picks the smaller ordered pair") {
        // Four identical points: every weight is 0, so edge choice is pure
        // tie-breaking and must be reproducible.
        std::vector<Eigen::VectorXf> pts(4, p2(1.0f, 1.0f));
        auto core = core_distances(pts, 2);
        MutualReachability graph{pts, core};
        auto mst = minimum_spanning_tree(graph);
        REQUIRE(mst.size() == 3);
        for (std::size_t i = 0; i < mst.size(); ++i) {
            CHECK(mst[i].weight == 0.0);
            CHECK(mst[i].a == 0);
            CHECK(mst[i].b == static_cast<int>(i) + 1);
        }
    }

    TEST_CASE("two separated blobs condense into two clusters") {
        auto pts = two_blobs();
        auto clustering = run_hdbscan(pts, 3);
        CHECK(clustering.cluster_count() == 2);
        CHECK(clustering.outlier_count() == 0);

        // Bigger blob (6 points, indices 5-10) takes label 0.
        auto sizes = clustering.cluster_sizes();
        REQUIRE(sizes.size() == 2);
        CHECK(sizes[0] == 6);
        CHECK(sizes[1] == 5);
        for (int i = 0; i < 5; ++i) CHECK(clustering.labels[i] == 1);
        for (int i = 5; i < 11; ++i) CHECK(clustering.labels[i] == 0);

        // Condensed tree: root is id n, every record names the parent the
        // child actually leaves, lambdas are positive and finite.
        int n = static_cast<int>(pts.size());
        bool saw_root_split = false;
        for (const auto& rec : clustering.condensed_tree) {
            CHECK(rec.parent >= n);
            CHECK(rec.lambda > 0.0);
            CHECK(rec.lambda <= kMaxLambda);
            CHECK(rec.size >= 1);
            if (rec.parent == n && rec.child >= n) saw_root_split = true;
        }
        CHECK(saw_root_split);
        CHECK(clustering.selected.size() == 2);
    }

    TEST_CASE("equal-size blobs order labels by smallest member") {
        // Blob containing point 0 sits far from the origin but must still
        // take label 0 on the size tie.
        std::vector<Eigen::VectorXf> pts = {
            p2(20.0f, 20.0f), p2(20.1f, 20.0f), p2(20.0f, 20.1f), p2(20.1f, 20.1f),
            p2(0.0f, 0.0f),   p2(0.1f, 0.0f),   p2(0.0f, 0.1f),   p2(0.1f, 0.1f),
        };
        auto clustering = run_hdbscan(pts, 3);
        REQUIRE(clustering.cluster_count() == 2);
        CHECK(clustering.labels[0] == 0);
        CHECK(clustering.labels[4] == 1);
    }

    TEST_CASE("identical points: root rescue keeps everyone") {
        std::vector<Eigen::VectorXf> pts(6, p2(2.0f, 3.0f));
        auto clustering = run_hdbscan(pts, 2);
        CHECK(clustering.cluster_count() == 1);
        CHECK(clustering.outlier_count() == 0);
        for (int label : clustering.labels) CHECK(label == 0);
        REQUIRE(clustering.selected.size() == 1);
        CHECK(clustering.selected[0] == 6);  // the root itself
    }

    TEST_CASE("extraction total equals the best antichain") {
        std::mt19937_64 gen(4242);
        int nontrivial = 0;
        for (int trial = 0; trial < 50; ++trial) {
            int n = 8 + static_cast<int>(gen() % 7);  // 8..14
            auto pts = random_points(gen, n);
            int k = std::min(2, n - 1);
            auto core = core_distances(pts, k);
            MutualReachability graph{pts, core};
            auto mst = minimum_spanning_tree(graph);
            auto tree = condense(std::move(mst), n, 2);
            auto clustering = extract(tree, n);

            CAPTURE(trial);
            CAPTURE(n);
            double got = oracle::selected_stability(clustering, n);
            double best = oracle::best_antichain_stability(tree, clustering.stabilities, n);
            CHECK(got == doctest::Approx(best).epsilon(1e-9));
            if (best > 0.0) ++nontrivial;

            // Selected clusters must form an antichain and carry the labels.
            std::set<int> selected(clustering.selected.begin(), clustering.selected.end());
            for (const auto& rec : tree) {
                if (rec.child >= n && selected.count(rec.child)) {
                    CHECK(!selected.count(rec.parent));
                }
            }
        }
        CHECK(nontrivial > 25);  // the comparison must actually bite
    }

    TEST_CASE("labels are a permutation-invariant partition") {
        std::mt19937_64 gen(90210);
        auto pts = random_points(gen, 24);
        auto base = run_hdbscan(pts, 3);

        std::vector<int> perm(pts.size());
        for (std::size_t i = 0; i < perm.size(); ++i) perm[i] = static_cast<int>(i);
        std::shuffle(perm.begin(), perm.end(), gen);
        std::vector<Eigen::VectorXf> shuffled(pts.size());
        for (std::size_t i = 0; i < perm.size(); ++i) shuffled[i] = pts[perm[i]];
        auto moved = run_hdbscan(shuffled, 3);

        // Compare the partitions as sets of member-id sets.
        auto partition = [](const std::vector<int>& labels,
                            const std::vector<int>& id_of) {
            std::map<int, std::set<int>> groups;
            std::set<int> outliers;
            for (std::size_t i = 0; i < labels.size(); ++i) {
                int original = id_of.empty() ? static_cast<int>(i) : id_of[i];
                if (labels[i] < 0) {
                    outliers.insert(original);
                } else {
                    groups[labels[i]].insert(original);
                }
            }
            std::set<std::set<int>> sets;
            for (auto& [label, members] : groups) sets.insert(members);
            return std::make_pair(sets, outliers);
        };
        CHECK(partition(base.labels, {}) == partition(moved.labels, perm));
    }

    TEST_CASE("clustering JSON round trip") {
        auto pts = two_blobs();
        auto clustering = run_hdbscan(pts, 3);
        ClusterParams params;
        params.min_cluster_size = 3;

        auto j = clustering_to_json(clustering, params);
        CHECK(j.at("params").at("min_cluster_size") == 3);
        CHECK(j.at("params").at("min_samples") == 3);
        CHECK(j.at("params").at("metric") == "euclidean");
        REQUIRE(j.contains("selected"));

        auto back = clustering_from_json(j);
        CHECK(back.labels == clustering.labels);
        CHECK(back.selected == clustering.selected);
        CHECK(back.stabilities.size() == clustering.stabilities.size());
        for (const auto& [id, s] : clustering.stabilities) {
            CHECK(back.stabilities.at(id) == doctest::Approx(s).epsilon(1e-12));
        }
        REQUIRE(back.condensed_tree.size() == clustering.condensed_tree.size());
        for (std::size_t i = 0; i < back.condensed_tree.size(); ++i) {
            CHECK(back.condensed_tree[i].parent == clustering.condensed_tree[i].parent);
            CHECK(back.condensed_tree[i].child == clustering.condensed_tree[i].child);
            CHECK(back.condensed_tree[i].size == clustering.condensed_tree[i].size);
        }

        auto p = params_from_json(params_to_json(params));
        CHECK(p.min_cluster_size == 3);
        CHECK(p.min_samples == 3);

        auto bad = params_to_json(params);
        bad["metric"] = "cosine";
        CHECK_THROWS_AS(params_from_json(bad), UsageError);
    }

    TEST_CASE("cluster_documents: zero vectors are outliers, ids remap") {
        auto pts = two_blobs();
        std::vector<vector_space::DocVector> docs;
        for (std::size_t i = 0; i < pts.size(); ++i) {
            docs.push_back({static_cast<std::int64_t>(100 + i), pts[i], {}});
        }
        // Splice two un-embeddable documents into the middle.
        vector_space::DocVector empty1{900, Eigen::VectorXf::Zero(2), {}};
        vector_space::DocVector empty2{901, Eigen::VectorXf(), {}};
        docs.insert(docs.begin() + 3, empty1);
        docs.push_back(empty2);

        ClusterParams params;
        params.min_cluster_size = 3;
        WarningLog warnings;
        auto clustering = cluster_documents(docs, params, &warnings);

        REQUIRE(clustering.labels.size() == docs.size());
        CHECK(clustering.labels[3] == -1);               // zero vector
        CHECK(clustering.labels.back() == -1);           // empty vector
        CHECK(clustering.cluster_count() == 2);
        CHECK(clustering.outlier_count() == 2);
        CHECK(warnings.empty());

        int n = static_cast<int>(docs.size());
        for (const auto& rec : clustering.condensed_tree) CHECK(rec.parent >= n);
        for (int id : clustering.selected) CHECK(id >= n);
    }

    TEST_CASE("cluster_documents prefers the reduced vector when present") {
        // Full vectors are all identical; reduced vectors split in two. If
        // the reduced side is used, two clusters appear.
        std::vector<vector_space::DocVector> docs;
        auto pts = two_blobs();
        for (std::size_t i = 0; i < pts.size(); ++i) {
            docs.push_back({static_cast<std::int64_t>(i), p2(1.0f, 1.0f), pts[i]});
        }
        ClusterParams params;
        params.min_cluster_size = 3;
        auto clustering = cluster_documents(docs, params, nullptr);
        CHECK(clustering.cluster_count() == 2);
    }

    TEST_CASE("cluster_documents warns and bails below min_cluster_size") {
        std::vector<vector_space::DocVector> docs = {
            {1, p2(0.0f, 0.0f), {}},
            {2, p2(1.0f, 0.0f), {}},
            {3, Eigen::VectorXf::Zero(2), {}},
        };
        ClusterParams params;
        params.min_cluster_size = 3;  // only 2 usable points
        WarningLog warnings;
        auto clustering = cluster_documents(docs, params, &warnings);
        CHECK(clustering.labels == std::vector<int>{-1, -1, -1});
        CHECK(clustering.cluster_count() == 0);
        REQUIRE(warnings.size() == 1);
        CHECK(warnings[0].find("outlier") != std::string::npos);
    }
}
