#pragma once

// Synthetic publisher corpus: deterministic generation of site plans from
// a GeneratorConfig, and the deterministic article text every plan implies.

#include <cstddef>
#include <filesystem>
#include <span>
#include <string>
#include <vector>

#include "pwlab/core.hpp"
#include "pwlab/policy.hpp"

namespace pwlab {

struct Corpus {
    CorpusManifest manifest;
    std::vector<SitePlan> plans;  // same order as manifest.sites()

    const SitePlan* find(std::string_view site_id) const;
};

/// Largest-remainder apportionment of `n` items over `shares`; remainder
/// ties go to the lower index. Every count is within 1 of n * share.
std::vector<std::size_t> largest_remainder(std::size_t n, std::span<const double> shares);

/// Deterministic in config.seed. Category counts (paywalled, kind,
/// mechanism, quota, respawn, referrer allowlist, distractor, feed) are
/// apportioned by largest remainder, then assigned to sites by shuffling.
Corpus gen_corpus(const GeneratorConfig& config);

std::string article_title(const SitePlan& plan, ArticleId article);
std::vector<std::string> article_paragraphs(const SitePlan& plan, ArticleId article);

/// The text a reader sees for an unrestricted article: its paragraphs
/// joined by "\n". Bypass success is judged against this.
std::string full_article_text(const SitePlan& plan, ArticleId article);

/// Writes manifest.json plus plans/<site_id>.json under `dir`.
void write_corpus(const Corpus& corpus, const std::filesystem::path& dir);
/// Reads a corpus directory and checks labels against the plans.
Corpus read_corpus(const std::filesystem::path& dir);

}  // namespace pwlab
