#include "pwlab/forest.hpp"

#include <algorithm>
#include <cmath>
#include <exception>
#include <mutex>
#include <numeric>
#include <thread>

#include "json_util.hpp"
#include "pwlab/errors.hpp"
#include "pwlab/version.hpp"

namespace pwlab {

void TrainConfig::validate() const {
    if (n_trees < 1) throw ConfigError("n_trees must be >= 1");
    if (k_folds < 2) throw ConfigError("k_folds must be >= 2");
    if (min_leaf < 1) throw ConfigError("min_leaf must be >= 1");
    if (max_depth < 1) throw ConfigError("max_depth must be >= 1");
    if (features_per_split && *features_per_split < 1) throw ConfigError("features_per_split must be >= 1");
}

std::uint32_t TrainConfig::split_features(std::size_t d) const {
    if (d == 0) return 0;
    std::uint32_t m = features_per_split ? *features_per_split
                                         : static_cast<std::uint32_t>(std::ceil(std::sqrt(static_cast<double>(d))));
    return std::min<std::uint32_t>(m, static_cast<std::uint32_t>(d));
}

double Tree::predict(const std::vector<double>& x) const {
    std::size_t i = 0;
    while (!nodes[i].leaf()) {
        const auto& n = nodes[i];
        i = static_cast<std::size_t>(x[static_cast<std::size_t>(n.feature)] <= n.threshold ? n.left : n.right);
    }
    return nodes[i].fraction;
}

std::size_t Tree::depth() const {
    std::vector<std::size_t> d(nodes.size(), 0);
    std::size_t best = 0;
    for (std::size_t i = 0; i < nodes.size(); ++i) {
        best = std::max(best, d[i]);
        if (!nodes[i].leaf()) {
            d[static_cast<std::size_t>(nodes[i].left)] = d[i] + 1;
            d[static_cast<std::size_t>(nodes[i].right)] = d[i] + 1;
        }
    }
    return best;
}

namespace {

using i128 = __int128;

/// Score of a split as a fraction num/den where score = a/nl + b/nr with
/// a = pl^2 + ql^2, b = pr^2 + qr^2.
struct Score {
    i128 num = 0;
    i128 den = 1;
};

Score split_score(std::int64_t pl, std::int64_t nl, std::int64_t pr, std::int64_t nr) {
    const i128 ql = nl - pl;
    const i128 qr = nr - pr;
    const i128 a = static_cast<i128>(pl) * pl + ql * ql;
    const i128 b = static_cast<i128>(pr) * pr + qr * qr;
    return {a * nr + b * nl, static_cast<i128>(nl) * nr};
}

bool greater(const Score& s, const Score& t) { return s.num * t.den > t.num * s.den; }

double midpoint(double lo, double hi) {
    double m = lo + (hi - lo) / 2.0;
    if (!(m < hi)) m = lo;
    return m;
}

class Grower {
public:
    Grower(const Matrix& data, const TrainConfig& cfg, Rng& rng) : data_(data), cfg_(cfg), rng_(rng) {}

    Tree grow(std::vector<std::size_t> sample) {
        build(sample, 0);
        return std::move(tree_);
    }

private:
    int build(std::vector<std::size_t>& idx, std::uint32_t depth) {
        std::int64_t pos = 0;
        for (auto i : idx) pos += data_.y[i];
        const auto n = static_cast<std::int64_t>(idx.size());
        const int id = static_cast<int>(tree_.nodes.size());
        TreeNode node;
        node.fraction = n ? static_cast<double>(pos) / static_cast<double>(n) : 0.0;
        node.samples = static_cast<std::uint32_t>(n);
        tree_.nodes.push_back(node);

        const bool pure = pos == 0 || pos == n;
        if (pure || depth >= cfg_.max_depth || n < 2 * static_cast<std::int64_t>(cfg_.min_leaf)) return id;

        const auto d = data_.cols();
        std::vector<std::size_t> features(d);
        std::iota(features.begin(), features.end(), 0);
        const auto m = cfg_.split_features(d);
        for (std::size_t k = 0; k < m; ++k) {
            const auto j = k + static_cast<std::size_t>(rng_.below(d - k));
            std::swap(features[k], features[j]);
        }
        features.resize(m);
        std::sort(features.begin(), features.end());

        std::optional<Score> best;
        std::size_t best_feature = 0;
        double best_threshold = 0.0;
        std::vector<std::size_t> order(idx);
        for (auto f : features) {
            std::sort(order.begin(), order.end(), [&](std::size_t a, std::size_t b) {
                const double va = data_.x[a][f];
                const double vb = data_.x[b][f];
                return va < vb || (va == vb && a < b);
            });
            std::int64_t left_pos = 0;
            for (std::size_t k = 0; k + 1 < order.size(); ++k) {
                left_pos += data_.y[order[k]];
                const double lo = data_.x[order[k]][f];
                const double hi = data_.x[order[k + 1]][f];
                if (!(lo < hi)) continue;
                const auto nl = static_cast<std::int64_t>(k + 1);
                const auto nr = n - nl;
                if (nl < cfg_.min_leaf || nr < cfg_.min_leaf) continue;
                const auto s = split_score(left_pos, nl, pos - left_pos, nr);
                // Features ascend and thresholds ascend within a feature, so
                // only a strictly better score replaces the incumbent.
                if (!best || greater(s, *best)) {
                    best = s;
                    best_feature = f;
                    best_threshold = midpoint(lo, hi);
                }
            }
        }
        if (!best) return id;

        std::vector<std::size_t> left;
        std::vector<std::size_t> right;
        for (auto i : idx) (data_.x[i][best_feature] <= best_threshold ? left : right).push_back(i);
        idx.clear();
        idx.shrink_to_fit();
        const int l = build(left, depth + 1);
        const int r = build(right, depth + 1);
        auto& self = tree_.nodes[static_cast<std::size_t>(id)];
        self.feature = static_cast<int>(best_feature);
        self.threshold = best_threshold;
        self.left = l;
        self.right = r;
        return id;
    }

    const Matrix& data_;
    const TrainConfig& cfg_;
    Rng& rng_;
    Tree tree_;
};

}  // namespace

Tree train_tree(const Matrix& data, const TrainConfig& config, Rng& rng) {
    config.validate();
    if (data.rows() == 0) throw DegenerateData("cannot train on an empty dataset");
    const auto n = data.rows();
    std::size_t pos = 0;
    for (int y : data.y) pos += y != 0;
    if (pos == 0 || pos == n) {
        Tree t;
        t.nodes.push_back({-1, 0.0, -1, -1, pos == n ? 1.0 : 0.0, static_cast<std::uint32_t>(n)});
        t.degenerate = true;
        return t;
    }
    std::vector<std::size_t> sample(n);
    if (config.bootstrap) {
        for (auto& s : sample) s = static_cast<std::size_t>(rng.below(n));
    } else {
        std::iota(sample.begin(), sample.end(), 0);
    }
    return Grower(data, config, rng).grow(std::move(sample));
}

Forest train_forest(const Matrix& data, const TrainConfig& config, std::string registry,
                    std::vector<std::string> feature_names, unsigned jobs) {
    config.validate();
    Forest f{std::move(registry), std::move(feature_names), config, {}};
    f.trees.resize(config.n_trees);
    auto work = [&](std::size_t t) {
        Rng rng(derive_stream_seed(config.seed, t));
        f.trees[t] = train_tree(data, config, rng);
    };
    jobs = std::max(1u, std::min<unsigned>(jobs, config.n_trees));
    if (jobs == 1) {
        for (std::size_t t = 0; t < config.n_trees; ++t) work(t);
        return f;
    }
    std::vector<std::thread> threads;
    std::exception_ptr failure;
    std::mutex failure_mu;
    for (unsigned w = 0; w < jobs; ++w) {
        threads.emplace_back([&, w] {
            try {
                for (std::size_t t = w; t < config.n_trees; t += jobs) work(t);
            } catch (...) {
                std::lock_guard lock(failure_mu);
                if (!failure) failure = std::current_exception();
            }
        });
    }
    for (auto& th : threads) th.join();
    if (failure) std::rethrow_exception(failure);
    return f;
}

double predict(const Forest& forest, const std::vector<double>& x) {
    if (forest.trees.empty()) return 0.0;
    double sum = 0.0;
    for (const auto& t : forest.trees) sum += t.predict(x);
    return sum / static_cast<double>(forest.trees.size());
}

double predict(const Forest& forest, const std::vector<double>& x, std::string_view registry) {
    if (registry != forest.registry) {
        throw RegistryMismatch("forest registry '" + forest.registry + "' vs feature registry '" +
                               std::string(registry) + "'");
    }
    if (x.size() != forest.feature_names.size()) {
        throw RegistryMismatch("feature vector has " + std::to_string(x.size()) + " values, forest expects " +
                               std::to_string(forest.feature_names.size()));
    }
    return predict(forest, x);
}

// ---------------------------------------------------------------------------

std::string serialize_forest(const Forest& f, std::uint64_t dataset_seed) {
    using nlohmann::ordered_json;
    ordered_json j;
    j["format"] = kForestFormat;
    j["tool_version"] = kToolVersion;
    j["seed"] = dataset_seed;
    j["registry"] = f.registry;
    j["feature_names"] = f.feature_names;
    ordered_json c;
    c["n_trees"] = f.config.n_trees;
    c["max_depth"] = f.config.max_depth;
    c["min_leaf"] = f.config.min_leaf;
    c["features_per_split"] =
        f.config.features_per_split ? ordered_json(*f.config.features_per_split) : ordered_json(nullptr);
    c["bootstrap"] = f.config.bootstrap;
    c["seed"] = f.config.seed;
    c["k_folds"] = f.config.k_folds;
    j["config"] = std::move(c);
    auto trees = ordered_json::array();
    for (const auto& t : f.trees) {
        ordered_json tj;
        tj["degenerate"] = t.degenerate;
        auto nodes = ordered_json::array();
        for (const auto& n : t.nodes) {
            // [feature, threshold, left, right, fraction, samples]
            nodes.push_back(ordered_json::array({n.feature, n.threshold, n.left, n.right, n.fraction, n.samples}));
        }
        tj["nodes"] = std::move(nodes);
        trees.push_back(std::move(tj));
    }
    j["trees"] = std::move(trees);
    return j.dump() + "\n";
}

Forest deserialize_forest(std::string_view bytes, std::uint64_t* dataset_seed) {
    const auto j = jsonutil::parse(bytes);
    jsonutil::Reader r(j, "");
    r.expect_format(kForestFormat);
    if (dataset_seed) *dataset_seed = r.u64("seed");
    Forest f;
    f.registry = r.str("registry");
    auto names = r.arr("feature_names");
    for (std::size_t i = 0; i < names.size(); ++i) f.feature_names.push_back(names.str_at(i));
    auto c = r.obj("config");
    f.config.n_trees = static_cast<std::uint32_t>(c.u64("n_trees"));
    f.config.max_depth = static_cast<std::uint32_t>(c.u64("max_depth"));
    f.config.min_leaf = static_cast<std::uint32_t>(c.u64("min_leaf"));
    if (auto fps = c.opt_i64("features_per_split")) f.config.features_per_split = static_cast<std::uint32_t>(*fps);
    f.config.bootstrap = c.boolean("bootstrap");
    f.config.seed = c.u64("seed");
    f.config.k_folds = static_cast<std::uint32_t>(c.u64("k_folds"));
    auto trees = r.arr("trees");
    for (std::size_t t = 0; t < trees.size(); ++t) {
        auto tr = trees.obj_at(t);
        Tree tree;
        tree.degenerate = tr.boolean("degenerate");
        auto nodes = tr.arr("nodes");
        for (std::size_t k = 0; k < nodes.size(); ++k) {
            const auto& a = nodes.raw_at(k);
            if (!a.is_array() || a.size() != 6 || !a[0].is_number_integer() || !a[1].is_number() ||
                !a[2].is_number_integer() || !a[3].is_number_integer() || !a[4].is_number() ||
                !a[5].is_number_unsigned()) {
                throw SchemaError(nodes.path_at(k) + ": expected [feature, threshold, left, right, fraction, samples]");
            }
            TreeNode n{a[0].get<int>(), a[1].get<double>(), a[2].get<int>(), a[3].get<int>(), a[4].get<double>(),
                       a[5].get<std::uint32_t>()};
            const auto count = static_cast<int>(nodes.size());
            if (!n.leaf() && (n.left <= static_cast<int>(k) || n.right <= static_cast<int>(k) || n.left >= count ||
                              n.right >= count || n.feature >= static_cast<int>(f.feature_names.size()))) {
                throw SchemaError(nodes.path_at(k) + ": child or feature index out of range");
            }
            if (!std::isfinite(n.threshold) || n.fraction < 0.0 || n.fraction > 1.0) {
                throw SchemaError(nodes.path_at(k) + ": threshold must be finite and fraction in [0,1]");
            }
            tree.nodes.push_back(n);
        }
        if (tree.nodes.empty()) throw SchemaError(trees.path_at(t) + ": tree has no nodes");
        f.trees.push_back(std::move(tree));
    }
    return f;
}

}  // namespace pwlab
