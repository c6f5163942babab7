#include "pwlab/browser.hpp"

#include <algorithm>
#include <charconv>

#include "json_util.hpp"
#include "pwlab/errors.hpp"
#include "pwlab/filter_list.hpp"
#include "pwlab/render.hpp"
#include "pwlab/simulator.hpp"
#include "pwlab/text.hpp"
#include "pwlab/url.hpp"

namespace pwlab {

CrawlSession fresh_session(std::string session_id, VisitorProfile profile, Capabilities capabilities) {
    CrawlSession s;
    s.session_id = std::move(session_id);
    profile.cookie.reset();
    s.profile = std::move(profile);
    s.capabilities = std::move(capabilities);
    return s;
}

Viewport viewport_for(const VisitorProfile& profile) {
    const std::string_view screen = profile.screen;
    const auto x = screen.find('x');
    const auto at = screen.find('@');
    const auto end = at == std::string_view::npos ? screen.size() : at;
    if (x == std::string_view::npos || x >= end) return {};
    std::int64_t w = 0;
    std::int64_t h = 0;
    auto [p1, e1] = std::from_chars(screen.data(), screen.data() + x, w);
    auto [p2, e2] = std::from_chars(screen.data() + x + 1, screen.data() + end, h);
    if (e1 != std::errc{} || e2 != std::errc{} || p1 != screen.data() + x || p2 != screen.data() + end || w <= 0 ||
        h <= 0) {
        return {};
    }
    return {w, h};
}

// ---------------------------------------------------------------------------
// Layout

namespace {

struct Style {
    bool display_none = false;
    bool fixed = false;
    std::int64_t z = 0;
};

Style style_of(const html::Element& e) {
    Style s;
    const auto attr = e.attr("style");
    if (!attr) return s;
    for (const auto& decl : text::split(*attr, ';')) {
        const auto colon = decl.find(':');
        if (colon == std::string::npos) continue;
        const auto key = text::normalize(decl.substr(0, colon));
        const auto value = text::normalize(decl.substr(colon + 1));
        if (key == "display" && value == "none") s.display_none = true;
        if (key == "visibility" && value == "hidden") s.display_none = true;
        if (key == "position" && value == "fixed") s.fixed = true;
        if (key == "z-index") {
            std::int64_t z = 0;
            auto [p, ec] = std::from_chars(value.data(), value.data() + value.size(), z);
            if (ec == std::errc{} && p == value.data() + value.size()) s.z = z;
        }
    }
    return s;
}

bool never_rendered(std::string_view tag) {
    static constexpr std::string_view kTags[] = {"head", "script", "style", "title", "meta",
                                                 "link", "noscript", "template", "base"};
    return std::find(std::begin(kTags), std::end(kTags), tag) != std::end(kTags);
}

class Layout {
public:
    Layout(const html::Element& root, Viewport vp) : vp_(vp) { flatten(root, std::nullopt, false); }

    std::vector<DomNode> run() {
        const auto doc_h = place(0, kPageMargin, kBlockMargin, vp_.w - 2 * kPageMargin) + 2 * kBlockMargin;
        for (std::size_t i = 0; i < deferred_.size(); ++i) {
            const auto id = deferred_[i];
            auto& n = nodes_[id];
            n.bbox = {0, 0, vp_.w, std::max(vp_.h, doc_h)};
            flow_children(id, vp_.w / 4, vp_.h / 4, vp_.w / 2);
        }
        compute_obscured();
        return std::move(nodes_);
    }

private:
    void flatten(const html::Element& e, std::optional<NodeId> parent, bool parent_hidden) {
        const auto id = static_cast<NodeId>(nodes_.size());
        DomNode n;
        n.id = id;
        n.parent = parent;
        n.tag = e.tag;
        bool hidden = parent_hidden;
        bool fixed = false;
        if (e.is_text()) {
            n.text = e.text;
        } else {
            n.attrs = e.attrs;
            const auto st = style_of(e);
            n.z_index = st.z;
            fixed = st.fixed;
            hidden = hidden || st.display_none || never_rendered(e.tag) || e.attr("hidden").has_value();
        }
        n.visible = !hidden;
        const auto parent_z = parent ? eff_z_[static_cast<std::size_t>(*parent)] : 0;
        nodes_.push_back(std::move(n));
        eff_z_.push_back(std::max(parent_z, nodes_.back().z_index));
        fixed_.push_back(fixed);
        children_.emplace_back();
        if (parent) children_[static_cast<std::size_t>(*parent)].push_back(id);
        for (const auto& c : e.children) flatten(*c, id, hidden);
    }

    /// Height consumed in the normal flow.
    std::int64_t place(NodeId id, std::int64_t x, std::int64_t y, std::int64_t w) {
        auto& n = nodes_[static_cast<std::size_t>(id)];
        if (!n.visible) {
            collapse(id, x, y);
            return 0;
        }
        if (n.is_text()) {
            const auto chars = static_cast<std::int64_t>(text::utf8_length(*n.text));
            const auto per_line = std::max<std::int64_t>(1, w / kGlyphWidth);
            const auto lines = (chars + per_line - 1) / per_line;
            n.bbox = {x, y, std::min(w, chars * kGlyphWidth), lines * kLineHeight};
            return n.bbox.h;
        }
        if (fixed_[static_cast<std::size_t>(id)] && id != 0) {
            deferred_.push_back(id);
            return 0;
        }
        const auto h = flow_children(id, x, y, w);
        nodes_[static_cast<std::size_t>(id)].bbox = {x, y, w, h};
        return h;
    }

    std::int64_t flow_children(NodeId id, std::int64_t x, std::int64_t y, std::int64_t w) {
        std::int64_t cur = y;
        for (auto c : children_[static_cast<std::size_t>(id)]) {
            const auto h = place(c, x, cur, w);
            if (h > 0) cur += h + (nodes_[static_cast<std::size_t>(c)].is_text() ? 0 : kBlockMargin);
        }
        return cur - y;
    }

    void collapse(NodeId id, std::int64_t x, std::int64_t y) {
        nodes_[static_cast<std::size_t>(id)].bbox = {x, y, 0, 0};
        for (auto c : children_[static_cast<std::size_t>(id)]) collapse(c, x, y);
    }

    bool is_within(NodeId id, NodeId ancestor) const {
        for (std::optional<NodeId> cur = id; cur; cur = nodes_[static_cast<std::size_t>(*cur)].parent) {
            if (*cur == ancestor) return true;
        }
        return false;
    }

    void compute_obscured() {
        std::vector<NodeId> overlays;
        for (const auto& n : nodes_) {
            if (n.visible && n.z_index > 0 && n.bbox.area() > 0) overlays.push_back(n.id);
        }
        if (overlays.empty()) return;
        for (auto& n : nodes_) {
            if (!n.visible || n.bbox.area() <= 0) continue;
            std::optional<NodeId> best;
            for (auto o : overlays) {
                const auto& ov = nodes_[static_cast<std::size_t>(o)];
                if (ov.z_index <= eff_z_[static_cast<std::size_t>(n.id)] || is_within(n.id, o)) continue;
                if (2 * overlap_area(n.bbox, ov.bbox) < n.bbox.area()) continue;
                if (!best || ov.z_index > nodes_[static_cast<std::size_t>(*best)].z_index) best = o;
            }
            n.obscured_by = best;
        }
    }

    Viewport vp_;
    std::vector<DomNode> nodes_;
    std::vector<std::int64_t> eff_z_;
    std::vector<bool> fixed_;
    std::vector<std::vector<NodeId>> children_;
    std::vector<NodeId> deferred_;
};

}  // namespace

std::vector<DomNode> layout_document(const html::Element& root, Viewport viewport) {
    return Layout(root, viewport).run();
}

// ---------------------------------------------------------------------------
// Fetching and the paywall client

namespace {

constexpr std::string_view kBootstrapMarker = "window.__pwBootstrap = ";

struct Bootstrap {
    std::string aid;
    std::string endpoint;
};

std::optional<Bootstrap> read_bootstrap(std::string_view script) {
    const auto at = script.find(kBootstrapMarker);
    if (at == std::string_view::npos) return std::nullopt;
    const auto start = at + kBootstrapMarker.size();
    const auto end = script.find(";\n", start);
    if (end == std::string_view::npos) return std::nullopt;
    try {
        const auto j = jsonutil::parse(script.substr(start, end - start));
        jsonutil::Reader r(j, "bootstrap");
        return Bootstrap{r.str("aid"), r.str("endpoint")};
    } catch (const Error&) {
        return std::nullopt;
    }
}

class Visit {
public:
    Visit(Transport& t, CrawlSession& s)
        : transport_(t), session_(s), blocked_(parse_filter_patterns(s.capabilities.blocked_url_patterns)) {}

    struct Document {
        std::string final_url;
        std::unique_ptr<html::Element> root;
    };

    Document load(const std::string& url, const std::optional<std::string>& referrer) {
        std::string current = url;
        for (int hop = 0; hop <= 5; ++hop) {
            if (blocked_.matches(current)) {
                record(current, "GET", ResourceType::document, std::nullopt, referrer);
                throw FetchError("document " + current + " blocked by the session's own filters");
            }
            HttpRequest req;
            req.url = current;
            add_identity_headers(req, referrer);
            const auto resp = transport_.send(req);
            record(current, "GET", ResourceType::document, resp.status, referrer);
            absorb_cookies(resp);
            if (resp.status >= 300 && resp.status < 400) {
                const auto location = resp.header("Location");
                const auto base = Url::parse(current);
                const auto next = location && base ? base->resolve(*location) : std::nullopt;
                if (!next) throw FetchError(current + ": redirect without a usable Location");
                current = next->str();
                continue;
            }
            if (resp.status >= 400) throw FetchError(current + ": HTTP " + std::to_string(resp.status));
            return {current, html::parse(resp.body)};
        }
        throw FetchError(url + ": too many redirects");
    }

    /// Fetches script subresources; returns the paywall bootstrap if one
    /// was loaded.
    std::optional<Bootstrap> fetch_scripts(Document& doc) {
        std::optional<Bootstrap> boot;
        const auto base = *Url::parse(doc.final_url);
        for (auto* el : html::find_all(*doc.root, "script")) {
            const auto src = el->attr("src");
            if (!src) continue;
            const auto target = base.resolve(*src);
            if (!target) continue;
            const auto url = target->str();
            if (blocked_.matches(url)) {
                record(url, "GET", ResourceType::script, std::nullopt, doc.final_url);
                adblock_ = true;
                continue;
            }
            HttpRequest req;
            req.url = url;
            add_identity_headers(req, doc.final_url);
            try {
                const auto resp = transport_.send(req);
                record(url, "GET", ResourceType::script, resp.status, doc.final_url);
                absorb_cookies(resp);
                if (resp.status == 200) {
                    if (auto b = read_bootstrap(resp.body)) boot = std::move(b);
                }
            } catch (const FetchError&) {
                // A failed subresource leaves the page as served.
            }
        }
        return boot;
    }

    /// Runs the meter exchange for the page's article; returns the decision.
    std::optional<AccessDecision> run_meter(Document& doc, const Bootstrap& boot,
                                            const std::optional<std::string>& referrer) {
        html::Element* article = nullptr;
        for (auto* a : html::find_all(*doc.root, "article")) {
            if (a->attr("data-article")) {
                article = a;
                break;
            }
        }
        if (!article || article->attr("data-paywall") == std::optional<std::string>("enforced")) return std::nullopt;
        ArticleId id = 0;
        const auto idtext = *article->attr("data-article");
        auto [p, ec] = std::from_chars(idtext.data(), idtext.data() + idtext.size(), id);
        if (ec != std::errc{} || p != idtext.data() + idtext.size()) return std::nullopt;

        const auto endpoint = Url::parse(doc.final_url)->resolve(boot.endpoint);
        if (!endpoint) return std::nullopt;
        const auto url = endpoint->str();
        if (blocked_.matches(url)) {
            record(url, "POST", ResourceType::xhr, std::nullopt, doc.final_url);
            return std::nullopt;
        }
        MeterRequest m;
        m.aid = boot.aid;
        m.article = id;
        m.referrer = referrer;
        m.adblock = adblock_;
        m.profile = session_.profile;
        m.profile.cookie.reset();
        HttpRequest req;
        req.method = "POST";
        req.url = url;
        req.body = serialize_meter_request(m);
        req.headers.emplace_back("Content-Type", "application/json");
        add_identity_headers(req, doc.final_url);
        HttpResponse resp;
        try {
            resp = transport_.send(req);
        } catch (const FetchError&) {
            return std::nullopt;
        }
        record(url, "POST", ResourceType::xhr, resp.status, doc.final_url);
        absorb_cookies(resp);
        if (resp.status != 200) return std::nullopt;
        const auto header = resp.header("X-Access-Decision");
        if (!header) return std::nullopt;
        auto decision = AccessDecision::from_header(*header);
        if (decision && !decision->granted()) enforce_on(doc, *article, id, decision->mechanism());
        return decision;
    }

    std::optional<std::string> pending_navigation;
    std::vector<RequestRecord> requests;

private:
    void enforce_on(Document& doc, html::Element& article, ArticleId id, Mechanism m) {
        switch (m) {
            case Mechanism::truncate: {
                bool first = true;
                std::vector<const html::Element*> drop;
                for (const auto& c : article.children) {
                    if (c->tag != "p") continue;
                    if (!first) drop.push_back(c.get());
                    first = false;
                }
                for (auto* d : drop) article.remove(d);
                auto* parent = article.parent;
                auto it = std::find_if(parent->children.begin(), parent->children.end(),
                                       [&](const auto& c) { return c.get() == &article; });
                auto pos = static_cast<std::size_t>(it - parent->children.begin()) + 1;
                for (auto& node : html::parse_fragment(inline_prompt_html(id))) {
                    node->parent = parent;
                    parent->children.insert(parent->children.begin() + static_cast<std::ptrdiff_t>(pos++),
                                            std::move(node));
                }
                break;
            }
            case Mechanism::obfuscate: {
                auto* body = html::find_first(*doc.root, "body");
                if (!body) body = doc.root.get();
                for (auto& node : html::parse_fragment(overlay_prompt_html(id))) body->append(std::move(node));
                break;
            }
            case Mechanism::redirect: {
                const auto target = Url::parse(doc.final_url)->resolve(subscribe_path(id));
                if (target) pending_navigation = target->str();
                break;
            }
        }
    }

    void add_identity_headers(HttpRequest& req, const std::optional<std::string>& referrer) const {
        req.headers.emplace_back("User-Agent", session_.profile.user_agent);
        req.headers.emplace_back("X-Forwarded-For", session_.transport_ip);
        if (referrer) req.headers.emplace_back("Referer", *referrer);
        if (!session_.cookie_jar.empty()) {
            std::vector<std::string> parts;
            for (const auto& [k, v] : session_.cookie_jar) parts.push_back(k + "=" + v);
            req.headers.emplace_back("Cookie", text::join(parts, "; "));
        }
    }

    void absorb_cookies(const HttpResponse& resp) {
        for (const auto& [k, v] : resp.headers) {
            if (text::to_lower(k) != "set-cookie") continue;
            const auto pair = v.substr(0, v.find(';'));
            const auto eq = pair.find('=');
            if (eq == std::string::npos) continue;
            session_.cookie_jar[text::trim(pair.substr(0, eq))] = text::trim(pair.substr(eq + 1));
        }
    }

    void record(const std::string& url, std::string method, ResourceType type, std::optional<int> status,
                const std::optional<std::string>& referrer) {
        RequestRecord r;
        r.url = url;
        r.method = std::move(method);
        r.resource_type = type;
        r.blocked = !status.has_value();
        r.status = status;
        r.referrer = referrer;
        requests.push_back(std::move(r));
    }

    Transport& transport_;
    CrawlSession& session_;
    FilterList blocked_;
    bool adblock_ = false;
};

void strip_overlays(html::Element& e) {
    std::vector<const html::Element*> drop;
    for (const auto& c : e.children) {
        if (c->is_text()) continue;
        const auto st = style_of(*c);
        if (st.z > 0 || st.fixed) {
            drop.push_back(c.get());
        } else {
            strip_overlays(*c);
        }
    }
    for (auto* d : drop) e.remove(d);
}

}  // namespace

PageSnapshot Browser::visit(CrawlSession& session, const std::string& url, CrawlKind kind, Timestamp fetched_at) {
    if (!Url::parse(url)) throw FetchError("invalid url " + url);
    const auto& caps = session.capabilities;
    Visit v(transport_, session);
    const auto referrer = caps.referrer_override;
    auto doc = v.load(url, referrer);
    const bool scripts_run = caps.execute_paywall_script && !caps.reader_mode && !caps.fetch_service;
    for (int navigations = 0;; ++navigations) {
        auto boot = v.fetch_scripts(doc);
        if (!boot || !scripts_run) break;
        v.run_meter(doc, *boot, referrer);
        if (!v.pending_navigation || navigations >= 3) break;
        const auto target = *v.pending_navigation;
        v.pending_navigation.reset();
        doc = v.load(target, doc.final_url);
    }
    if (caps.reader_mode) strip_overlays(*doc.root);

    PageSnapshot::Fields f;
    f.url = url;
    f.final_url = doc.final_url;
    f.fetched_at = fetched_at;
    f.viewport = viewport_for(session.profile);
    f.crawl_kind = kind;
    f.session_id = session.session_id;
    f.nodes = layout_document(*doc.root, f.viewport);
    f.requests = std::move(v.requests);
    return PageSnapshot(std::move(f));
}

}  // namespace pwlab
