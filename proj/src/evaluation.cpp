#include "pwlab/evaluation.hpp"

#include <algorithm>
#include <cstdio>
#include <numeric>

#include "json.hpp"
#include "pwlab/errors.hpp"
#include "pwlab/version.hpp"

namespace pwlab {

double auroc(const std::vector<double>& scores, const std::vector<int>& labels) {
    const auto n = scores.size();
    std::vector<std::size_t> order(n);
    std::iota(order.begin(), order.end(), 0);
    std::sort(order.begin(), order.end(), [&](std::size_t a, std::size_t b) { return scores[a] < scores[b]; });
    // Midranks, 1-based, doubled to stay integral.
    std::vector<std::int64_t> rank2(n);
    for (std::size_t i = 0; i < n;) {
        std::size_t j = i;
        while (j + 1 < n && scores[order[j + 1]] == scores[order[i]]) ++j;
        const auto r2 = static_cast<std::int64_t>(i + 1 + j + 1);
        for (std::size_t k = i; k <= j; ++k) rank2[order[k]] = r2;
        i = j + 1;
    }
    std::int64_t pos = 0;
    std::int64_t sum2 = 0;
    for (std::size_t i = 0; i < n; ++i) {
        if (labels[i]) {
            ++pos;
            sum2 += rank2[i];
        }
    }
    const auto neg = static_cast<std::int64_t>(n) - pos;
    if (pos == 0 || neg == 0) throw DegenerateData("AUROC needs both classes");
    const double u2 = static_cast<double>(sum2 - pos * (pos + 1));
    return u2 / (2.0 * static_cast<double>(pos) * static_cast<double>(neg));
}

FoldMetrics threshold_metrics(const std::vector<double>& scores, const std::vector<int>& labels) {
    std::size_t tp = 0, fp = 0, tn = 0, fn = 0;
    for (std::size_t i = 0; i < scores.size(); ++i) {
        const bool pred = scores[i] > kDecisionThreshold;
        if (pred && labels[i]) ++tp;
        if (pred && !labels[i]) ++fp;
        if (!pred && !labels[i]) ++tn;
        if (!pred && labels[i]) ++fn;
    }
    auto ratio = [](std::size_t a, std::size_t b) { return b ? static_cast<double>(a) / static_cast<double>(b) : 0.0; };
    auto f1 = [](double p, double r) { return p + r > 0 ? 2 * p * r / (p + r) : 0.0; };
    const double p1 = ratio(tp, tp + fp), r1 = ratio(tp, tp + fn);
    const double p0 = ratio(tn, tn + fn), r0 = ratio(tn, tn + fp);
    const double s1 = static_cast<double>(tp + fn), s0 = static_cast<double>(tn + fp);
    const double n = s0 + s1;
    FoldMetrics m;
    m.n = scores.size();
    if (n == 0) return m;
    m.precision = (s1 * p1 + s0 * p0) / n;
    m.recall = (s1 * r1 + s0 * r0) / n;
    m.f_measure = (s1 * f1(p1, r1) + s0 * f1(p0, r0)) / n;
    return m;
}

std::vector<std::vector<std::size_t>> stratified_folds(const std::vector<int>& labels, std::uint32_t k,
                                                       std::uint64_t seed) {
    if (k < 2) throw ConfigError("k_folds must be >= 2");
    std::vector<std::size_t> by_class[2];
    for (std::size_t i = 0; i < labels.size(); ++i) by_class[labels[i] ? 1 : 0].push_back(i);
    for (int c = 0; c < 2; ++c) {
        if (by_class[c].size() < k) {
            throw TooFewSamples("class " + std::to_string(c) + " has " + std::to_string(by_class[c].size()) +
                                " samples, need at least " + std::to_string(k) + " for " + std::to_string(k) +
                                " folds");
        }
    }
    Rng rng(derive_stream_seed(seed, 0x5f01d));
    std::vector<std::vector<std::size_t>> folds(k);
    for (auto& members : by_class) {
        rng.shuffle(members);
        for (std::size_t i = 0; i < members.size(); ++i) folds[i % k].push_back(members[i]);
    }
    for (auto& f : folds) std::sort(f.begin(), f.end());
    return folds;
}

namespace {

FoldMetrics score_fold(const Forest& forest, const Matrix& data, const std::vector<std::size_t>& rows) {
    std::vector<double> scores;
    std::vector<int> labels;
    for (auto i : rows) {
        scores.push_back(predict(forest, data.x[i]));
        labels.push_back(data.y[i]);
    }
    auto m = threshold_metrics(scores, labels);
    m.auroc = auroc(scores, labels);
    return m;
}

FoldMetrics weighted_average(const std::vector<FoldMetrics>& folds) {
    FoldMetrics w;
    double total = 0;
    for (const auto& f : folds) {
        const double n = static_cast<double>(f.n);
        total += n;
        w.precision += n * f.precision;
        w.recall += n * f.recall;
        w.f_measure += n * f.f_measure;
        w.auroc += n * f.auroc;
        w.n += f.n;
    }
    if (total > 0) {
        w.precision /= total;
        w.recall /= total;
        w.f_measure /= total;
        w.auroc /= total;
    }
    return w;
}

}  // namespace

EvalMetrics kfold_eval(const Matrix& data, const TrainConfig& config, unsigned jobs) {
    config.validate();
    const auto folds = stratified_folds(data.y, config.k_folds, config.seed);
    EvalMetrics out;
    for (std::size_t f = 0; f < folds.size(); ++f) {
        Matrix train;
        std::vector<bool> held(data.rows(), false);
        for (auto i : folds[f]) held[i] = true;
        for (std::size_t i = 0; i < data.rows(); ++i) {
            if (held[i]) continue;
            train.x.push_back(data.x[i]);
            train.y.push_back(data.y[i]);
        }
        auto cfg = config;
        cfg.seed = derive_stream_seed(config.seed, 1000 + f);
        const auto forest = train_forest(train, cfg, "", {}, jobs);
        auto m = score_fold(forest, data, folds[f]);
        m.fold = f;
        out.folds.push_back(m);
    }
    out.weighted = weighted_average(out.folds);
    return out;
}

EvalMetrics evaluate(const Forest& forest, const Matrix& data) {
    std::vector<std::size_t> all(data.rows());
    std::iota(all.begin(), all.end(), 0);
    EvalMetrics out;
    out.folds.push_back(score_fold(forest, data, all));
    out.weighted = out.folds.front();
    return out;
}

Matrix to_matrix(const Dataset& ds) {
    Matrix m;
    for (const auto* r : ds.labeled()) {
        m.x.push_back(r->values);
        m.y.push_back(*r->label ? 1 : 0);
    }
    return m;
}

std::string serialize_metrics(const EvalMetrics& m, std::uint64_t seed, const std::string& registry,
                              const std::string& mode) {
    using nlohmann::ordered_json;
    auto row = [](const FoldMetrics& f) {
        ordered_json j;
        j["n"] = f.n;
        j["precision"] = f.precision;
        j["recall"] = f.recall;
        j["f_measure"] = f.f_measure;
        j["auroc"] = f.auroc;
        return j;
    };
    ordered_json j;
    j["format"] = kMetricsFormat;
    j["tool_version"] = kToolVersion;
    j["seed"] = seed;
    j["registry"] = registry;
    j["mode"] = mode;
    j["threshold"] = kDecisionThreshold;
    auto folds = ordered_json::array();
    for (const auto& f : m.folds) {
        auto r = row(f);
        r["fold"] = f.fold;
        folds.push_back(std::move(r));
    }
    j["folds"] = std::move(folds);
    j["weighted"] = row(m.weighted);
    return j.dump(2) + "\n";
}

std::string metrics_table(const EvalMetrics& m) {
    std::string out = "Metric      ";
    for (const auto& f : m.folds) {
        char buf[32];
        std::snprintf(buf, sizeof buf, "  fold%-3zu", f.fold);
        out += buf;
    }
    out += "  weighted\n";
    auto line = [&](const char* name, double FoldMetrics::*field) {
        char buf[64];
        std::snprintf(buf, sizeof buf, "%-12s", name);
        out += buf;
        for (const auto& f : m.folds) {
            std::snprintf(buf, sizeof buf, "  %7.4f", f.*field);
            out += buf;
        }
        std::snprintf(buf, sizeof buf, "  %8.4f\n", m.weighted.*field);
        out += buf;
    };
    line("Precision", &FoldMetrics::precision);
    line("Recall", &FoldMetrics::recall);
    line("F-Measure", &FoldMetrics::f_measure);
    line("AUROC", &FoldMetrics::auroc);
    return out;
}

}  // namespace pwlab
