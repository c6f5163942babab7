#include <gtest/gtest.h>

#include <array>
#include <cmath>
#include <numeric>

#include "pwlab/errors.hpp"
#include "pwlab/evaluation.hpp"
#include "pwlab/forest.hpp"
#include "pwlab/rng.hpp"

using namespace pwlab;

namespace {

TrainConfig exact_config(std::size_t d) {
    TrainConfig c;
    c.n_trees = 1;
    c.min_leaf = 1;
    c.bootstrap = false;
    c.features_per_split = static_cast<std::uint32_t>(d);
    return c;
}

double accuracy(const Tree& t, const Matrix& m) {
    std::size_t ok = 0;
    for (std::size_t i = 0; i < m.rows(); ++i) ok += (t.predict(m.x[i]) > 0.5) == (m.y[i] == 1);
    return static_cast<double>(ok) / static_cast<double>(m.rows());
}

struct Split {
    std::size_t feature;
    double threshold;
};

/// Exhaustive root split: every feature, every midpoint, score compared as
/// an exact fraction, first strictly-better candidate kept.
std::optional<Split> brute_force_root(const Matrix& m, std::uint32_t min_leaf) {
    std::optional<Split> best;
    long long best_num = 0, best_den = 1;
    for (std::size_t f = 0; f < m.cols(); ++f) {
        std::vector<double> vals;
        for (const auto& r : m.x) vals.push_back(r[f]);
        std::sort(vals.begin(), vals.end());
        vals.erase(std::unique(vals.begin(), vals.end()), vals.end());
        for (std::size_t k = 0; k + 1 < vals.size(); ++k) {
            const double t = vals[k] + (vals[k + 1] - vals[k]) / 2;
            long long pl = 0, ql = 0, pr = 0, qr = 0;
            for (std::size_t i = 0; i < m.rows(); ++i) {
                const bool left = m.x[i][f] <= t;
                (m.y[i] ? (left ? pl : pr) : (left ? ql : qr))++;
            }
            const long long nl = pl + ql, nr = pr + qr;
            if (nl < min_leaf || nr < min_leaf) continue;
            const long long num = (pl * pl + ql * ql) * nr + (pr * pr + qr * qr) * nl;
            const long long den = nl * nr;
            if (!best || num * best_den > best_num * den) {
                best = Split{f, t};
                best_num = num;
                best_den = den;
            }
        }
    }
    return best;
}

Matrix random_matrix(Rng& rng, std::size_t rows, std::size_t cols, int levels) {
    Matrix m;
    for (std::size_t i = 0; i < rows; ++i) {
        std::vector<double> r;
        for (std::size_t j = 0; j < cols; ++j) r.push_back(static_cast<double>(rng.below(levels)));
        m.x.push_back(r);
        m.y.push_back(static_cast<int>(rng.below(2)));
    }
    m.y[0] = 0;
    m.y[1] = 1;
    return m;
}

/// Two noisy Gaussian-ish blobs.
Matrix blobs(std::uint64_t seed, std::size_t n, std::size_t d) {
    Rng rng(seed);
    Matrix m;
    for (std::size_t i = 0; i < n; ++i) {
        const int y = static_cast<int>(i % 2);
        std::vector<double> r;
        for (std::size_t j = 0; j < d; ++j) {
            double v = 0;
            for (int k = 0; k < 4; ++k) v += rng.uniform01();
            r.push_back(v + (j < 2 ? 0.8 * y : 0.0));
        }
        m.x.push_back(r);
        m.y.push_back(y);
    }
    return m;
}

double brute_auroc(const std::vector<double>& s, const std::vector<int>& y) {
    double wins = 0;
    long long pairs = 0;
    for (std::size_t i = 0; i < s.size(); ++i) {
        for (std::size_t j = 0; j < s.size(); ++j) {
            if (y[i] != 1 || y[j] != 0) continue;
            ++pairs;
            wins += s[i] > s[j] ? 1.0 : s[i] == s[j] ? 0.5 : 0.0;
        }
    }
    return wins / static_cast<double>(pairs);
}

}  // namespace

TEST(Tree, SeparableOneFeatureIsDepthOne) {
    Matrix m{{{1}, {2}, {3}, {7}, {8}, {9}}, {0, 0, 0, 1, 1, 1}};
    Rng rng(1);
    const auto t = train_tree(m, exact_config(1), rng);
    EXPECT_EQ(t.depth(), 1u);
    EXPECT_EQ(t.nodes[0].threshold, 5.0);
    EXPECT_EQ(accuracy(t, m), 1.0);
}

TEST(Tree, ConstantFeaturesGiveThePrior) {
    Matrix m{{{1, 1}, {1, 1}, {1, 1}, {1, 1}}, {0, 1, 1, 1}};
    Rng rng(1);
    const auto t = train_tree(m, exact_config(2), rng);
    ASSERT_EQ(t.nodes.size(), 1u);
    EXPECT_EQ(t.nodes[0].fraction, 0.75);
}

TEST(Tree, SingleClassIsFlaggedDegenerate) {
    Matrix m{{{1}, {2}, {3}}, {1, 1, 1}};
    Rng rng(1);
    const auto t = train_tree(m, exact_config(1), rng);
    EXPECT_TRUE(t.degenerate);
    ASSERT_EQ(t.nodes.size(), 1u);
    EXPECT_EQ(t.nodes[0].fraction, 1.0);
}

TEST(Tree, XorNeedsDepthTwo) {
    Matrix m{{{0, 0}, {0, 1}, {1, 0}, {1, 1}}, {0, 1, 1, 0}};
    // Exhaustive: no single split separates XOR, some depth-2 tree does.
    for (std::size_t f = 0; f < 2; ++f) {
        Tree stump;
        stump.nodes = {TreeNode{static_cast<int>(f), 0.5, 1, 2}, TreeNode{}, TreeNode{}};
        stump.nodes[1].fraction = 0.5;
        stump.nodes[2].fraction = 0.5;
        EXPECT_LT(accuracy(stump, m), 1.0);
    }
    Rng rng(3);
    const auto t = train_tree(m, exact_config(2), rng);
    EXPECT_EQ(t.depth(), 2u);
    EXPECT_EQ(accuracy(t, m), 1.0);
    EXPECT_EQ(t.nodes[0].feature, 0);
    EXPECT_EQ(t.nodes[0].threshold, 0.5);
}

TEST(Tree, RootSplitMatchesExhaustiveSearch) {
    Rng gen(77);
    for (int trial = 0; trial < 300; ++trial) {
        const auto m = random_matrix(gen, 6 + gen.below(20), 1 + gen.below(4), 2 + static_cast<int>(gen.below(5)));
        const std::uint32_t min_leaf = 1 + static_cast<std::uint32_t>(gen.below(3));
        auto cfg = exact_config(m.cols());
        cfg.min_leaf = min_leaf;
        Rng rng(1);
        const auto t = train_tree(m, cfg, rng);
        const auto want = brute_force_root(m, min_leaf);
        const int pos = std::accumulate(m.y.begin(), m.y.end(), 0);
        if (!want || pos == 0 || pos == static_cast<int>(m.rows()) || m.rows() < 2 * min_leaf) {
            EXPECT_TRUE(t.nodes[0].leaf()) << trial;
            continue;
        }
        ASSERT_FALSE(t.nodes[0].leaf()) << trial;
        EXPECT_EQ(static_cast<std::size_t>(t.nodes[0].feature), want->feature) << trial;
        EXPECT_EQ(t.nodes[0].threshold, want->threshold) << trial;
    }
}

TEST(Tree, LeafFractionsAndThresholdsAreSane) {
    const auto m = blobs(4, 120, 6);
    TrainConfig cfg;
    cfg.n_trees = 10;
    const auto forest = train_forest(m, cfg, "features/1", {"a", "b", "c", "d", "e", "f"});
    for (const auto& t : forest.trees) {
        EXPECT_LE(t.depth(), cfg.max_depth);
        for (const auto& n : t.nodes) {
            EXPECT_GE(n.fraction, 0.0);
            EXPECT_LE(n.fraction, 1.0);
            EXPECT_TRUE(std::isfinite(n.threshold));
            if (n.leaf()) EXPECT_GE(n.samples, cfg.min_leaf);
        }
    }
}

TEST(Forest, DeterministicAndJobsIndependent) {
    const auto m = blobs(8, 150, 5);
    TrainConfig cfg;
    cfg.n_trees = 24;
    cfg.seed = 99;
    const std::vector<std::string> names = {"a", "b", "c", "d", "e"};
    const auto one = serialize_forest(train_forest(m, cfg, "features/1", names, 1), 3);
    EXPECT_EQ(serialize_forest(train_forest(m, cfg, "features/1", names, 1), 3), one);
    EXPECT_EQ(serialize_forest(train_forest(m, cfg, "features/1", names, 4), 3), one);
    EXPECT_EQ(serialize_forest(train_forest(m, cfg, "features/1", names, 7), 3), one);
}

TEST(Forest, SingleTreeUsesStreamZero) {
    const auto m = blobs(2, 80, 4);
    TrainConfig cfg;
    cfg.n_trees = 1;
    cfg.seed = 5;
    const auto forest = train_forest(m, cfg, "features/1", {"a", "b", "c", "d"});
    Rng rng(derive_stream_seed(5, 0));
    EXPECT_EQ(forest.trees[0], train_tree(m, cfg, rng));
}

TEST(Forest, PredictIsTheMeanLeafFraction) {
    Forest f;
    f.registry = "features/1";
    f.feature_names = {"x"};
    for (double v : {0.2, 0.5, 0.8}) {
        Tree t;
        t.nodes = {TreeNode{0, 1.0, 1, 2}, TreeNode{}, TreeNode{}};
        t.nodes[1].fraction = v;
        t.nodes[2].fraction = 1.0 - v;
        f.trees.push_back(t);
    }
    EXPECT_DOUBLE_EQ(predict(f, {0.0}), 0.5);
    EXPECT_DOUBLE_EQ(predict(f, {2.0}), (0.8 + 0.5 + 0.2) / 3.0);
    Forest ones;
    ones.trees.assign(4, Tree{{TreeNode{}}, false});
    for (auto& t : ones.trees) t.nodes[0].fraction = 1.0;
    EXPECT_EQ(predict(ones, {3.0}), 1.0);
    EXPECT_THROW(predict(f, {0.0}, "features/2"), RegistryMismatch);
    EXPECT_DOUBLE_EQ(predict(f, {0.0}, "features/1"), 0.5);
}

TEST(Forest, PredictIgnoresTreeOrder) {
    const auto m = blobs(6, 100, 4);
    TrainConfig cfg;
    cfg.n_trees = 15;
    auto f = train_forest(m, cfg, "features/1", {"a", "b", "c", "d"});
    auto g = f;
    std::reverse(g.trees.begin(), g.trees.end());
    std::rotate(g.trees.begin(), g.trees.begin() + 4, g.trees.end());
    for (const auto& x : m.x) EXPECT_NEAR(predict(f, x), predict(g, x), 1e-12);
}

TEST(Forest, SerializationRoundTrip) {
    const auto m = blobs(1, 60, 3);
    TrainConfig cfg;
    cfg.n_trees = 5;
    const auto f = train_forest(m, cfg, "features/1", {"a", "b", "c"});
    std::uint64_t seed = 0;
    const auto bytes = serialize_forest(f, 77);
    const auto back = deserialize_forest(bytes, &seed);
    EXPECT_EQ(seed, 77u);
    EXPECT_EQ(back, f);
    EXPECT_EQ(serialize_forest(back, 77), bytes);
    auto foreign = bytes;
    foreign.replace(foreign.find("forest/1"), 8, "forest/0");
    EXPECT_THROW(deserialize_forest(foreign), VersionMismatch);
    EXPECT_THROW(deserialize_forest(bytes.substr(0, bytes.size() / 2)), ParseError);
}

TEST(TrainConfigTest, Validation) {
    TrainConfig c;
    EXPECT_NO_THROW(c.validate());
    EXPECT_EQ(c.split_features(31), 6u);
    EXPECT_EQ(c.split_features(16), 4u);
    c.n_trees = 0;
    EXPECT_THROW(c.validate(), ConfigError);
    c = TrainConfig{};
    c.k_folds = 1;
    EXPECT_THROW(c.validate(), ConfigError);
}

TEST(Auroc, Examples) {
    EXPECT_EQ(auroc({0.9, 0.8, 0.2, 0.1}, {1, 1, 0, 0}), 1.0);
    EXPECT_EQ(auroc({0.4, 0.4, 0.4, 0.4}, {1, 0, 1, 0}), 0.5);
    const std::vector<double> s = {0.9, 0.8, 0.8, 0.8, 0.1};
    const std::vector<int> y = {1, 1, 1, 0, 0};
    EXPECT_DOUBLE_EQ(brute_auroc(s, y), 5.0 / 6.0);
    EXPECT_DOUBLE_EQ(auroc(s, y), 5.0 / 6.0);
    EXPECT_THROW(auroc({0.1, 0.2}, {1, 1}), DegenerateData);
}

TEST(Auroc, MatchesPairCountingAndIsMonotoneInvariant) {
    Rng rng(12);
    for (int trial = 0; trial < 200; ++trial) {
        const std::size_t n = 4 + rng.below(40);
        std::vector<double> s;
        std::vector<int> y;
        for (std::size_t i = 0; i < n; ++i) {
            s.push_back(static_cast<double>(rng.below(8)) / 8.0);
            y.push_back(static_cast<int>(i < 2 ? i : rng.below(2)));
        }
        const double a = auroc(s, y);
        EXPECT_NEAR(a, brute_auroc(s, y), 1e-12);
        const double k = 0.5 + rng.uniform01() * 3;
        std::vector<double> t;
        for (double v : s) t.push_back(std::exp(k * v) * 10 - 4);
        EXPECT_NEAR(auroc(t, y), a, 1e-12);
    }
}

TEST(ThresholdMetrics, WeightedPerClassOracle) {
    Rng rng(31);
    for (int trial = 0; trial < 100; ++trial) {
        std::vector<double> s;
        std::vector<int> y;
        const std::size_t n = 4 + rng.below(30);
        for (std::size_t i = 0; i < n; ++i) {
            s.push_back(rng.uniform01());
            y.push_back(static_cast<int>(i < 2 ? i : rng.below(2)));
        }
        s[0] = 0.5;  // exactly at the threshold counts as negative
        long long tp = 0, fp = 0, tn = 0, fn = 0;
        for (std::size_t i = 0; i < n; ++i) {
            const bool p = s[i] > 0.5;
            (y[i] ? (p ? tp : fn) : (p ? fp : tn))++;
        }
        auto prf = [](long long t, long long f_pos, long long f_neg) {
            const double p = t + f_pos ? double(t) / double(t + f_pos) : 0.0;
            const double r = t + f_neg ? double(t) / double(t + f_neg) : 0.0;
            const double f = p + r > 0 ? 2 * p * r / (p + r) : 0.0;
            return std::array<double, 3>{p, r, f};
        };
        const auto pos = prf(tp, fp, fn);
        const auto neg = prf(tn, fn, fp);
        const double wp = double(tp + fn) / double(n), wn = double(tn + fp) / double(n);
        const auto m = threshold_metrics(s, y);
        EXPECT_NEAR(m.precision, wp * pos[0] + wn * neg[0], 1e-12);
        EXPECT_NEAR(m.recall, wp * pos[1] + wn * neg[1], 1e-12);
        EXPECT_NEAR(m.f_measure, wp * pos[2] + wn * neg[2], 1e-9);
        EXPECT_EQ(m.n, n);
    }
}

TEST(Folds, StratifiedPartition) {
    std::vector<int> y;
    for (int i = 0; i < 53; ++i) y.push_back(i % 3 == 0);
    const auto folds = stratified_folds(y, 5, 8);
    ASSERT_EQ(folds.size(), 5u);
    std::vector<int> seen(y.size(), 0);
    std::vector<std::size_t> pos_counts;
    for (const auto& f : folds) {
        std::size_t pos = 0;
        for (auto i : f) {
            ++seen[i];
            pos += y[i];
        }
        EXPECT_GT(pos, 0u);
        EXPECT_LT(pos, f.size());
        pos_counts.push_back(pos);
    }
    EXPECT_TRUE(std::all_of(seen.begin(), seen.end(), [](int c) { return c == 1; }));
    const auto [lo, hi] = std::minmax_element(pos_counts.begin(), pos_counts.end());
    EXPECT_LE(*hi - *lo, 1u);
    EXPECT_EQ(stratified_folds(y, 5, 8), folds);
    EXPECT_NE(stratified_folds(y, 5, 9), folds);
}

TEST(Folds, TooFewSamples) {
    EXPECT_THROW(stratified_folds({1, 1, 0, 0, 0, 0, 0}, 3, 1), TooFewSamples);
    // A corpus without paywalled sites has no positives at all.
    Matrix null_corpus;
    for (int i = 0; i < 20; ++i) {
        null_corpus.x.push_back(std::vector<double>(31, 0.0));
        null_corpus.y.push_back(0);
    }
    EXPECT_THROW(kfold_eval(null_corpus, TrainConfig{}), TooFewSamples);
}

TEST(KFold, WeightedAverageAndJobsIndependence) {
    const auto m = blobs(21, 200, 6);
    TrainConfig cfg;
    cfg.n_trees = 20;
    const auto a = kfold_eval(m, cfg, 1);
    const auto b = kfold_eval(m, cfg, 3);
    ASSERT_EQ(a.folds.size(), 5u);
    double wa = 0;
    std::size_t n = 0;
    for (std::size_t k = 0; k < 5; ++k) {
        EXPECT_EQ(a.folds[k].auroc, b.folds[k].auroc);
        EXPECT_EQ(a.folds[k].f_measure, b.folds[k].f_measure);
        wa += a.folds[k].auroc * static_cast<double>(a.folds[k].n);
        n += a.folds[k].n;
        for (double v : {a.folds[k].precision, a.folds[k].recall, a.folds[k].f_measure, a.folds[k].auroc}) {
            EXPECT_GE(v, 0.0);
            EXPECT_LE(v, 1.0);
        }
    }
    EXPECT_EQ(n, m.rows());
    EXPECT_NEAR(a.weighted.auroc, wa / static_cast<double>(n), 1e-12);
    EXPECT_GT(a.weighted.auroc, 0.75);
    EXPECT_EQ(serialize_metrics(a, 1, "features/1", "kfold"), serialize_metrics(b, 1, "features/1", "kfold"));
    const auto table = metrics_table(a);
    for (auto h : {"Precision", "Recall", "F-Measure", "AUROC"}) EXPECT_NE(table.find(h), std::string::npos);
}
