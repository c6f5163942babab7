#include "pwlab/features.hpp"

#include <algorithm>

#include "pwlab/errors.hpp"
#include "pwlab/readermode.hpp"
#include "pwlab/text.hpp"

namespace pwlab {

namespace {

constexpr const char* kLocations[] = {"readermode", "overlay", "elsewhere"};
constexpr const char* kCrawls[] = {"cookiejar", "clean"};

std::vector<std::string> build_names() {
    std::vector<std::string> n;
    for (auto g : kLexiconGroups) {
        for (auto loc : kLocations) {
            for (auto c : kCrawls) n.push_back("text." + std::string(g) + "." + loc + "." + c);
        }
    }
    for (auto s : {"struct.has_feed", "struct.text_nodes.delta_mean", "struct.readermode_missing.cookiejar",
                   "struct.readermode_missing.clean", "struct.readermode_chars.delta_mean",
                   "struct.readermode_chars.delta_max"}) {
        n.emplace_back(s);
    }
    for (auto s : {"visual.obscured.cookiejar_mean", "visual.obscured.delta_mean", "visual.obscured.delta_max",
                   "visual.viewport.delta_max", "visual.viewport.delta_mean", "visual.overlay_text.cookiejar_mean",
                   "visual.overlay_text.delta_mean"}) {
        n.emplace_back(s);
    }
    return n;
}

bool is_feed_link(const DomNode& n) {
    if (n.tag != "link") return false;
    const auto rel = n.attr("rel");
    const auto type = n.attr("type");
    if (!rel || !type || text::to_lower(*rel) != "alternate") return false;
    const auto t = text::to_lower(*type);
    return t == "application/atom+xml" || t == "application/rss+xml";
}

struct Pairs {
    std::vector<PageMeasures> jar;
    std::vector<PageMeasures> clean;
    std::size_t size() const { return jar.size(); }
};

Pairs valid_pairs(const SiteCrawl& crawl, const Lexicon& lexicon) {
    Pairs p;
    const auto& j = crawl.cookiejar_snapshots();
    const auto& c = crawl.clean_snapshots();
    for (std::size_t i = 0; i < j.size(); ++i) {
        if (j[i].failed() || c[i].failed()) continue;
        p.jar.push_back(measure_page(j[i], lexicon));
        p.clean.push_back(measure_page(c[i], lexicon));
    }
    return p;
}

double as_double(std::size_t v) { return static_cast<double>(v); }
double diff(std::size_t a, std::size_t b) { return static_cast<double>(a) - static_cast<double>(b); }

template <class F>
double mean_of(const Pairs& p, F f) {
    double sum = 0.0;
    for (std::size_t i = 0; i < p.size(); ++i) sum += f(p.jar[i], p.clean[i]);
    return sum / static_cast<double>(p.size());
}

template <class F>
double max_of(const Pairs& p, F f) {
    double best = f(p.jar[0], p.clean[0]);
    for (std::size_t i = 1; i < p.size(); ++i) best = std::max(best, f(p.jar[i], p.clean[i]));
    return best;
}

std::vector<double> text_of(const Pairs& p) {
    std::vector<double> out;
    for (std::size_t g = 0; g < 3; ++g) {
        for (std::size_t loc = 0; loc < 3; ++loc) {
            out.push_back(mean_of(p, [&](const PageMeasures& j, const PageMeasures&) { return j.phrase[g][loc] ? 1.0 : 0.0; }));
            out.push_back(mean_of(p, [&](const PageMeasures&, const PageMeasures& c) { return c.phrase[g][loc] ? 1.0 : 0.0; }));
        }
    }
    return out;
}

std::vector<double> structural_of(const Pairs& p) {
    bool feed = false;
    for (std::size_t i = 0; i < p.size(); ++i) feed = feed || p.jar[i].has_feed || p.clean[i].has_feed;
    return {
        feed ? 1.0 : 0.0,
        mean_of(p, [](auto& j, auto& c) { return diff(c.text_nodes, j.text_nodes); }),
        mean_of(p, [](auto& j, auto&) { return j.has_main_content ? 0.0 : 1.0; }),
        mean_of(p, [](auto&, auto& c) { return c.has_main_content ? 0.0 : 1.0; }),
        mean_of(p, [](auto& j, auto& c) { return diff(c.main_chars, j.main_chars); }),
        max_of(p, [](auto& j, auto& c) { return diff(c.main_chars, j.main_chars); }),
    };
}

std::vector<double> visual_of(const Pairs& p) {
    return {
        mean_of(p, [](auto& j, auto&) { return as_double(j.obscured_nodes); }),
        mean_of(p, [](auto& j, auto& c) { return diff(j.obscured_nodes, c.obscured_nodes); }),
        max_of(p, [](auto& j, auto& c) { return diff(j.obscured_nodes, c.obscured_nodes); }),
        max_of(p, [](auto& j, auto& c) { return diff(c.viewport_nodes, j.viewport_nodes); }),
        mean_of(p, [](auto& j, auto& c) { return diff(c.viewport_nodes, j.viewport_nodes); }),
        mean_of(p, [](auto& j, auto&) { return as_double(j.overlay_nodes); }),
        mean_of(p, [](auto& j, auto& c) { return diff(j.overlay_nodes, c.overlay_nodes); }),
    };
}

Pairs require_pairs(const SiteCrawl& crawl, const Lexicon& lexicon) {
    auto p = valid_pairs(crawl, lexicon);
    if (p.size() == 0) throw EmptyCrawl("site " + crawl.site_id() + ": no page fetched in both crawls");
    return p;
}

}  // namespace

const std::vector<std::string>& feature_names() {
    static const std::vector<std::string> names = build_names();
    return names;
}

std::size_t feature_index(std::string_view name) {
    const auto& n = feature_names();
    auto it = std::find(n.begin(), n.end(), name);
    if (it == n.end()) throw NotFound("no feature named " + std::string(name));
    return static_cast<std::size_t>(it - n.begin());
}

PageMeasures measure_page(const PageSnapshot& page, const Lexicon& lexicon) {
    PageMeasures m;
    m.failed = page.failed();
    if (m.failed) return m;
    const auto mc = extract_main_content(page);
    m.has_main_content = mc.has_value();
    m.main_chars = mc ? mc->char_count : 0;
    std::unordered_map<NodeId, bool> main_ids;
    if (mc) {
        for (auto id : mc->node_ids) main_ids[id] = true;
    }

    std::vector<std::string> loc_text[3];
    for (const auto& n : page.nodes()) {
        if (is_feed_link(n)) m.has_feed = true;
        if (!n.is_text() || !n.visible) continue;
        const bool overlay = page.in_overlay(n.id);
        if (overlay) {
            ++m.overlay_nodes;
        } else {
            ++m.text_nodes;
        }
        if (n.obscured_by) ++m.obscured_nodes;
        const std::size_t loc = main_ids.count(n.id) ? 0 : overlay ? 1 : 2;
        loc_text[loc].push_back(*n.text);
    }
    m.viewport_nodes = visible_text_nodes(page).size();
    for (std::size_t loc = 0; loc < 3; ++loc) {
        const auto joined = text::join(loc_text[loc], " ");
        for (std::size_t g = 0; g < 3 && g < lexicon.groups.size(); ++g) m.phrase[g][loc] = lexicon.groups[g].matches(joined);
    }
    return m;
}

std::vector<double> text_features(const SiteCrawl& crawl, const Lexicon& lexicon) {
    return text_of(require_pairs(crawl, lexicon));
}

std::vector<double> structural_features(const SiteCrawl& crawl) {
    return structural_of(require_pairs(crawl, Lexicon::english_default()));
}

std::vector<double> visual_features(const SiteCrawl& crawl) {
    return visual_of(require_pairs(crawl, Lexicon::english_default()));
}

FeatureVector assemble(const SiteCrawl& crawl, const Lexicon& lexicon) {
    lexicon.validate();
    const auto pairs = require_pairs(crawl, lexicon);
    FeatureVector fv;
    fv.site_id = crawl.site_id();
    fv.values = text_of(pairs);
    for (double v : structural_of(pairs)) fv.values.push_back(v);
    for (double v : visual_of(pairs)) fv.values.push_back(v);
    fv.label = crawl.label();
    return fv;
}

}  // namespace pwlab
