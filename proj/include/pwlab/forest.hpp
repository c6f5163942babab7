#pragma once

// Binary random forest: CART trees grown on Gini impurity over random
// feature subsets, averaged leaf fractions at prediction time.

#include <cstddef>
#include <cstdint>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

#include "pwlab/rng.hpp"

namespace pwlab {

struct TrainConfig {
    std::uint32_t n_trees = 100;
    std::uint32_t max_depth = 12;
    std::uint32_t min_leaf = 2;
    std::optional<std::uint32_t> features_per_split;  // default ceil(sqrt(d))
    bool bootstrap = true;
    std::uint64_t seed = 42;
    std::uint32_t k_folds = 5;

    /// Throws ConfigError on n_trees < 1, k_folds < 2, min_leaf < 1 or
    /// max_depth < 1.
    void validate() const;
    std::uint32_t split_features(std::size_t d) const;

    friend bool operator==(const TrainConfig&, const TrainConfig&) = default;
};

/// Row-major training matrix with 0/1 labels.
struct Matrix {
    std::vector<std::vector<double>> x;
    std::vector<int> y;

    std::size_t rows() const { return x.size(); }
    std::size_t cols() const { return x.empty() ? 0 : x.front().size(); }
};

struct TreeNode {
    int feature = -1;  // -1 marks a leaf
    double threshold = 0.0;  // go left when x[feature] <= threshold
    int left = -1;
    int right = -1;
    double fraction = 0.0;  // positive fraction of the training samples reaching the node
    std::uint32_t samples = 0;

    bool leaf() const { return feature < 0; }
    friend bool operator==(const TreeNode&, const TreeNode&) = default;
};

struct Tree {
    std::vector<TreeNode> nodes;  // nodes[0] is the root
    bool degenerate = false;      // trained on single-class data

    double predict(const std::vector<double>& x) const;
    std::size_t depth() const;
    friend bool operator==(const Tree&, const Tree&) = default;
};

/// Grows one tree. Split choice maximizes sum over children of
/// (pos^2 + neg^2) / n, compared exactly in integers; ties go to the lowest
/// feature index, then the lowest threshold. Thresholds are midpoints of
/// consecutive distinct values. A single-class input yields one leaf with
/// `degenerate` set.
Tree train_tree(const Matrix& data, const TrainConfig& config, Rng& rng);

struct Forest {
    std::string registry;
    std::vector<std::string> feature_names;
    TrainConfig config;
    std::vector<Tree> trees;

    friend bool operator==(const Forest&, const Forest&) = default;
};

/// Tree t is trained from Rng(derive_stream_seed(config.seed, t)); the
/// result does not depend on `jobs`.
Forest train_forest(const Matrix& data, const TrainConfig& config, std::string registry,
                    std::vector<std::string> feature_names, unsigned jobs = 1);

/// Mean leaf fraction over the trees.
double predict(const Forest& forest, const std::vector<double>& x);
/// Same, after checking the vector's registry. Throws RegistryMismatch.
double predict(const Forest& forest, const std::vector<double>& x, std::string_view registry);

std::string serialize_forest(const Forest& forest, std::uint64_t dataset_seed);
Forest deserialize_forest(std::string_view bytes, std::uint64_t* dataset_seed = nullptr);

}  // namespace pwlab
