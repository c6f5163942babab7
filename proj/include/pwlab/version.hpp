#pragma once

namespace pwlab {

inline constexpr const char* kToolVersion = "pwlab/0.3.0";
inline constexpr const char* kGeneratorVersion = "gen/2";

inline constexpr const char* kSnapshotFormat = "snapshot/1";
inline constexpr const char* kCorpusFormat = "corpus/1";
inline constexpr const char* kPlanFormat = "plan/1";
inline constexpr const char* kGenConfigFormat = "gencfg/1";
inline constexpr const char* kCrawlFormat = "crawl/1";
inline constexpr const char* kDatasetFormat = "dataset/1";
inline constexpr const char* kLexiconFormat = "lexicon/1";
inline constexpr const char* kForestFormat = "forest/1";
inline constexpr const char* kMetricsFormat = "metrics/1";
inline constexpr const char* kBypassFormat = "bypass/1";
inline constexpr const char* kAdoptionFormat = "adoption/1";
inline constexpr const char* kRunConfigFormat = "run/1";

}  // namespace pwlab
