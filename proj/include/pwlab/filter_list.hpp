#pragma once

// Ad-block style filter lists, restricted to three rule forms: `||host^`
// domain anchors, plain substrings and `!` comments. Anything else is
// skipped with a warning rather than rejected.

#include <cstddef>
#include <string>
#include <string_view>
#include <vector>

namespace pwlab {

enum class RuleKind { domain_anchor, substring, comment };

struct FilterRule {
    std::string raw;
    RuleKind kind = RuleKind::substring;
    std::string pattern;  // lowercase host for anchors, lowercase needle for substrings

    /// Comments never match; anchors match the host or any subdomain.
    bool matches(std::string_view url) const;
};

struct FilterWarning {
    std::size_t line = 0;  // 1-based
    std::string text;
    std::string reason;
};

struct FilterList {
    std::vector<FilterRule> rules;
    std::vector<FilterWarning> skipped;

    bool matches(std::string_view url) const;
};

/// Never throws. rules.size() + skipped.size() equals the number of lines
/// that are not blank.
FilterList parse_filter_list(std::string_view text);

/// Convenience: one pattern per element.
FilterList parse_filter_patterns(const std::vector<std::string>& patterns);

}  // namespace pwlab
