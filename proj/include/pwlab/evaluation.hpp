#pragma once

// Threshold metrics, AUROC and stratified k-fold evaluation of forests.

#include <cstddef>
#include <cstdint>
#include <string>
#include <vector>

#include "pwlab/dataset.hpp"
#include "pwlab/forest.hpp"

namespace pwlab {

inline constexpr double kDecisionThreshold = 0.5;

struct FoldMetrics {
    std::size_t fold = 0;
    std::size_t n = 0;
    double precision = 0.0;
    double recall = 0.0;
    double f_measure = 0.0;
    double auroc = 0.0;
};

struct EvalMetrics {
    std::vector<FoldMetrics> folds;
    FoldMetrics weighted;  // fold-size weighted average; fold field unused
};

/// Probability that a random positive outscores a random negative, ties
/// counted as one half (midrank statistic). Throws DegenerateData when a
/// class is missing.
double auroc(const std::vector<double>& scores, const std::vector<int>& labels);

/// Positive iff score > 0.5. Precision, recall and F are computed per class
/// (undefined precision counts as 0) and averaged with class-support weights.
FoldMetrics threshold_metrics(const std::vector<double>& scores, const std::vector<int>& labels);

/// Stratified assignment: each class shuffled with a seed-derived stream,
/// then dealt round-robin. Throws TooFewSamples when a class has fewer
/// than k members.
std::vector<std::vector<std::size_t>> stratified_folds(const std::vector<int>& labels, std::uint32_t k,
                                                       std::uint64_t seed);

/// Trains on k-1 folds and scores the held-out fold, k times.
EvalMetrics kfold_eval(const Matrix& data, const TrainConfig& config, unsigned jobs = 1);

/// Scores `data` with an already trained forest (one "fold").
EvalMetrics evaluate(const Forest& forest, const Matrix& data);

/// Labeled rows of a dataset as a training matrix.
Matrix to_matrix(const Dataset& ds);

std::string serialize_metrics(const EvalMetrics& m, std::uint64_t seed, const std::string& registry,
                              const std::string& mode);
/// Human-readable table: Precision, Recall, F-Measure, AUROC rows.
std::string metrics_table(const EvalMetrics& m);

}  // namespace pwlab
