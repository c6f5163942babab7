#pragma once

// Site-level feature vectors computed from the cookie-jar and clean crawls.
// Registry "features/1": 18 text, 6 structural and 7 visual features.

#include <optional>
#include <string>
#include <vector>

#include "pwlab/core.hpp"
#include "pwlab/lexicon.hpp"

namespace pwlab {

inline constexpr const char* kFeatureRegistry = "features/1";
inline constexpr std::size_t kTextFeatureCount = 18;
inline constexpr std::size_t kStructuralFeatureCount = 6;
inline constexpr std::size_t kVisualFeatureCount = 7;
inline constexpr std::size_t kFeatureCount = kTextFeatureCount + kStructuralFeatureCount + kVisualFeatureCount;

/// Names in registry order.
const std::vector<std::string>& feature_names();
std::size_t feature_index(std::string_view name);

struct FeatureVector {
    std::string site_id;
    std::vector<double> values;
    std::optional<bool> label;

    friend bool operator==(const FeatureVector&, const FeatureVector&) = default;
};

/// Per-page measurements the features aggregate.
struct PageMeasures {
    bool failed = false;
    bool has_feed = false;
    bool has_main_content = false;
    std::size_t main_chars = 0;
    std::size_t text_nodes = 0;     // visible, outside overlays
    std::size_t overlay_nodes = 0;  // visible, inside overlays
    std::size_t obscured_nodes = 0;
    std::size_t viewport_nodes = 0;
    // [group][location]: readermode, overlay, elsewhere
    bool phrase[3][3] = {};
};

PageMeasures measure_page(const PageSnapshot& page, const Lexicon& lexicon);

/// Group x location x crawl fractions over valid page pairs:
/// text.<group>.<readermode|overlay|elsewhere>.<cookiejar|clean>.
std::vector<double> text_features(const SiteCrawl& crawl, const Lexicon& lexicon);
/// has_feed; mean text-node delta (clean - cookiejar); fraction of pages
/// without main content (cookiejar, clean); mean and max main-content
/// character delta (clean - cookiejar).
std::vector<double> structural_features(const SiteCrawl& crawl);
/// Mean obscured text nodes (cookiejar); mean and max obscured delta
/// (cookiejar - clean); max and mean in-viewport delta (clean - cookiejar);
/// mean overlay text nodes (cookiejar); mean overlay delta (cookiejar - clean).
std::vector<double> visual_features(const SiteCrawl& crawl);

/// Only pages fetched successfully in both crawls count. Throws EmptyCrawl
/// when there is no such pair.
FeatureVector assemble(const SiteCrawl& crawl, const Lexicon& lexicon);

}  // namespace pwlab
