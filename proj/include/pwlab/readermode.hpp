#pragma once

// Main-content ("readermode") extraction over a recorded page: a text
// density heuristic that ignores navigation, asides, headers, footers and
// overlays.

#include <cstddef>
#include <optional>
#include <string>
#include <vector>

#include "pwlab/core.hpp"

namespace pwlab {

inline constexpr std::size_t kMinMainContentChars = 140;

struct MainContent {
    NodeId container = 0;
    std::vector<NodeId> node_ids;  // text nodes, document order
    std::string text;              // node texts joined by "\n"
    std::size_t char_count = 0;    // code points of `text`

    friend bool operator==(const MainContent&, const MainContent&) = default;
};

/// Candidates are elements with at least one direct <p> child, outside
/// boilerplate subtrees and overlays. Score = text chars / descendant
/// element count; link-dominated candidates (link text > half) are
/// dropped. Highest score wins, lowest id on ties; none when the winner
/// has fewer than kMinMainContentChars characters.
std::optional<MainContent> extract_main_content(const PageSnapshot& snapshot);

/// Main-content text a reader can actually see: the extraction minus text
/// nodes covered by an overlay. Empty when there is no main content.
std::string readable_main_text(const PageSnapshot& snapshot);

}  // namespace pwlab
