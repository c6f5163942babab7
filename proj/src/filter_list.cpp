#include "pwlab/filter_list.hpp"

#include "pwlab/text.hpp"
#include "pwlab/url.hpp"

namespace pwlab {

bool FilterRule::matches(std::string_view url) const {
    switch (kind) {
        case RuleKind::comment:
            return false;
        case RuleKind::domain_anchor: {
            const auto host = host_of(url);
            return !host.empty() && host_matches_domain(host, pattern);
        }
        case RuleKind::substring:
            return text::to_lower(url).find(pattern) != std::string::npos;
    }
    return false;
}

bool FilterList::matches(std::string_view url) const {
    for (const auto& r : rules) {
        if (r.matches(url)) return true;
    }
    return false;
}

namespace {

bool host_chars(std::string_view s) {
    if (s.empty() || s.front() == '.' || s.back() == '.') return false;
    for (char c : s) {
        const bool ok = (c >= 'a' && c <= 'z') || (c >= '0' && c <= '9') || c == '-' || c == '.';
        if (!ok) return false;
    }
    return true;
}

}  // namespace

FilterList parse_filter_list(std::string_view input) {
    FilterList out;
    std::size_t line_no = 0;
    for (auto& raw_line : text::split(input, '\n')) {
        ++line_no;
        const auto line = text::trim(raw_line);
        if (line.empty()) continue;
        auto skip = [&](std::string reason) { out.skipped.push_back({line_no, line, std::move(reason)}); };

        if (line[0] == '!') {
            out.rules.push_back({line, RuleKind::comment, ""});
        } else if (line[0] == '[') {
            skip("list header");
        } else if (line.rfind("@@", 0) == 0) {
            skip("exception rules are not supported");
        } else if (line.find("##") != std::string::npos || line.find("#@#") != std::string::npos ||
                   line.find("#?#") != std::string::npos) {
            skip("element hiding rules are not supported");
        } else if (line.rfind("||", 0) == 0) {
            const auto body = text::to_lower(line.substr(2));
            if (body.size() >= 2 && body.back() == '^' && host_chars(std::string_view(body).substr(0, body.size() - 1))) {
                out.rules.push_back({line, RuleKind::domain_anchor, body.substr(0, body.size() - 1)});
            } else {
                skip("only ||host^ anchors are supported");
            }
        } else if (line.find_first_of("|*^$") != std::string::npos) {
            skip("wildcards, anchors and options are not supported");
        } else {
            out.rules.push_back({line, RuleKind::substring, text::to_lower(line)});
        }
    }
    return out;
}

FilterList parse_filter_patterns(const std::vector<std::string>& patterns) {
    return parse_filter_list(text::join(patterns, "\n"));
}

}  // namespace pwlab
