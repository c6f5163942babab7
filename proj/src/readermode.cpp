#include "pwlab/readermode.hpp"

#include <algorithm>
#include <functional>

#include "pwlab/text.hpp"

namespace pwlab {

namespace {

bool boilerplate(std::string_view tag) {
    static constexpr std::string_view kTags[] = {"nav", "aside", "footer", "header", "script",
                                                 "style", "head", "noscript", "form"};
    return std::find(std::begin(kTags), std::end(kTags), tag) != std::end(kTags);
}

struct Stats {
    std::size_t chars = 0;
    std::size_t link_chars = 0;
    std::size_t elements = 0;
    std::vector<NodeId> texts;
};

}  // namespace

std::optional<MainContent> extract_main_content(const PageSnapshot& snap) {
    std::vector<NodeId> candidates;
    std::function<void(NodeId, bool)> scan = [&](NodeId id, bool excluded) {
        const auto* n = snap.find(id);
        if (n->is_text()) return;
        excluded = excluded || boilerplate(n->tag) || n->z_index > 0;
        if (!excluded) {
            for (auto c : snap.children(id)) {
                if (snap.find(c)->tag == "p") {
                    candidates.push_back(id);
                    break;
                }
            }
        }
        for (auto c : snap.children(id)) scan(c, excluded);
    };
    scan(snap.root().id, false);

    std::function<void(NodeId, bool, Stats&)> collect = [&](NodeId id, bool in_link, Stats& s) {
        const auto* n = snap.find(id);
        if (n->is_text()) {
            const auto len = text::utf8_length(*n->text);
            s.chars += len;
            if (in_link) s.link_chars += len;
            s.texts.push_back(id);
            return;
        }
        if (n->z_index > 0 || boilerplate(n->tag)) return;
        for (auto c : snap.children(id)) {
            const auto* cn = snap.find(c);
            if (!cn->is_text() && cn->z_index <= 0 && !boilerplate(cn->tag)) ++s.elements;
            collect(c, in_link || n->tag == "a", s);
        }
    };

    std::optional<NodeId> best;
    Stats best_stats;
    // score comparison a.chars / a.elements > b.chars / b.elements, exactly
    auto better = [](const Stats& a, const Stats& b) { return a.chars * b.elements > b.chars * a.elements; };
    std::sort(candidates.begin(), candidates.end());
    for (auto id : candidates) {
        Stats s;
        collect(id, snap.find(id)->tag == "a", s);
        if (s.elements == 0 || s.chars == 0) continue;
        if (2 * s.link_chars > s.chars) continue;
        if (!best || better(s, best_stats)) {
            best = id;
            best_stats = std::move(s);
        }
    }
    if (!best || best_stats.chars < kMinMainContentChars) return std::nullopt;

    MainContent mc;
    mc.container = *best;
    mc.node_ids = best_stats.texts;
    std::vector<std::string> parts;
    for (auto id : mc.node_ids) parts.push_back(*snap.find(id)->text);
    mc.text = text::join(parts, "\n");
    mc.char_count = text::utf8_length(mc.text);
    return mc;
}

std::string readable_main_text(const PageSnapshot& snap) {
    const auto mc = extract_main_content(snap);
    if (!mc) return "";
    std::vector<std::string> parts;
    for (auto id : mc->node_ids) {
        const auto* n = snap.find(id);
        if (n->visible && !n->obscured_by) parts.push_back(*n->text);
    }
    return text::join(parts, "\n");
}

}  // namespace pwlab
