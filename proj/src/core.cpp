#include "pwlab/core.hpp"

#include <algorithm>
#include <unordered_set>

#include "json.hpp"
#include "json_util.hpp"
#include "pwlab/errors.hpp"
#include "pwlab/text.hpp"
#include "pwlab/url.hpp"
#include "pwlab/version.hpp"

namespace pwlab {

using nlohmann::ordered_json;

std::int64_t overlap_area(const BBox& a, const BBox& b) {
    const auto x0 = std::max(a.x, b.x);
    const auto y0 = std::max(a.y, b.y);
    const auto x1 = std::min(a.x + a.w, b.x + b.w);
    const auto y1 = std::min(a.y + a.h, b.y + b.h);
    if (x1 <= x0 || y1 <= y0) return 0;
    return (x1 - x0) * (y1 - y0);
}

std::optional<std::string_view> DomNode::attr(std::string_view name) const {
    for (const auto& [k, v] : attrs) {
        if (k == name) return std::string_view(v);
    }
    return std::nullopt;
}

std::string_view to_string(ResourceType t) {
    switch (t) {
        case ResourceType::document: return "document";
        case ResourceType::script: return "script";
        case ResourceType::xhr: return "xhr";
        case ResourceType::image: return "image";
        case ResourceType::feed: return "feed";
        case ResourceType::other: return "other";
    }
    return "other";
}

std::optional<ResourceType> resource_type_from_string(std::string_view s) {
    for (auto t : {ResourceType::document, ResourceType::script, ResourceType::xhr, ResourceType::image,
                   ResourceType::feed, ResourceType::other}) {
        if (to_string(t) == s) return t;
    }
    return std::nullopt;
}

std::string_view to_string(CrawlKind k) {
    switch (k) {
        case CrawlKind::initial: return "initial";
        case CrawlKind::cookiejar: return "cookiejar";
        case CrawlKind::clean: return "clean";
    }
    return "initial";
}

std::optional<CrawlKind> crawl_kind_from_string(std::string_view s) {
    for (auto k : {CrawlKind::initial, CrawlKind::cookiejar, CrawlKind::clean}) {
        if (to_string(k) == s) return k;
    }
    return std::nullopt;
}

// ---------------------------------------------------------------------------
// PageSnapshot

namespace {

std::string node_path(std::size_t i) { return "nodes[" + std::to_string(i) + "]"; }

}  // namespace

PageSnapshot::PageSnapshot(Fields fields) : f_(std::move(fields)) {
    if (f_.viewport.w <= 0 || f_.viewport.h <= 0) throw SchemaError("viewport: w and h must be > 0");
    if (!is_valid_url(f_.url)) throw SchemaError("url: not a valid absolute URL: " + f_.url);
    if (!is_valid_url(f_.final_url)) throw SchemaError("final_url: not a valid absolute URL: " + f_.final_url);
    if (f_.nodes.empty()) throw SchemaError("nodes: a snapshot needs exactly one root node");

    index_.reserve(f_.nodes.size());
    for (std::size_t i = 0; i < f_.nodes.size(); ++i) {
        if (!index_.emplace(f_.nodes[i].id, i).second) {
            throw SchemaError(node_path(i) + ".id: duplicate node id " + std::to_string(f_.nodes[i].id));
        }
    }

    bool have_root = false;
    children_.assign(f_.nodes.size(), {});
    for (std::size_t i = 0; i < f_.nodes.size(); ++i) {
        const auto& n = f_.nodes[i];
        if (n.tag.empty()) throw SchemaError(node_path(i) + ".tag: empty tag");
        if (n.tag != text::to_lower(n.tag)) throw SchemaError(node_path(i) + ".tag: must be lowercase");
        if (n.is_text()) {
            if (!n.text || n.text->empty()) {
                throw SchemaError(node_path(i) + ".text: text node " + std::to_string(n.id) + " has no text");
            }
        } else if (n.text) {
            throw SchemaError(node_path(i) + ".text: element node " + std::to_string(n.id) + " carries text");
        }
        if (n.bbox.w < 0 || n.bbox.h < 0) throw SchemaError(node_path(i) + ".bbox: negative size");
        if (!n.parent) {
            if (have_root) throw SchemaError(node_path(i) + ".parent: second root node " + std::to_string(n.id));
            have_root = true;
            root_index_ = i;
            continue;
        }
        auto it = index_.find(*n.parent);
        if (it == index_.end()) {
            throw SchemaError(node_path(i) + ".parent: dangling parent id " + std::to_string(*n.parent) +
                              " on node " + std::to_string(n.id));
        }
        if (f_.nodes[it->second].is_text()) {
            throw SchemaError(node_path(i) + ".parent: node " + std::to_string(n.id) + " is a child of a text node");
        }
        children_[it->second].push_back(n.id);
    }
    if (!have_root) throw SchemaError("nodes: no root node");

    // Every parent chain must reach the root (rules out detached cycles).
    for (std::size_t i = 0; i < f_.nodes.size(); ++i) {
        std::size_t cur = i;
        std::size_t steps = 0;
        while (f_.nodes[cur].parent) {
            cur = index_.at(*f_.nodes[cur].parent);
            if (++steps > f_.nodes.size()) {
                throw SchemaError(node_path(i) + ".parent: cycle through node " + std::to_string(f_.nodes[i].id));
            }
        }
    }

    for (std::size_t i = 0; i < f_.nodes.size(); ++i) {
        const auto& n = f_.nodes[i];
        if (!n.obscured_by) continue;
        auto it = index_.find(*n.obscured_by);
        if (it == index_.end()) {
            throw SchemaError(node_path(i) + ".obscured_by: unknown node " + std::to_string(*n.obscured_by));
        }
        if (f_.nodes[it->second].z_index <= 0) {
            throw SchemaError(node_path(i) + ".obscured_by: node " + std::to_string(*n.obscured_by) +
                              " has z_index <= 0");
        }
    }

    for (std::size_t i = 0; i < f_.requests.size(); ++i) {
        const auto& r = f_.requests[i];
        const auto path = "requests[" + std::to_string(i) + "]";
        if (!is_valid_url(r.url)) throw SchemaError(path + ".url: not a valid absolute URL: " + r.url);
        if (r.blocked && r.status) throw SchemaError(path + ".status: blocked request has a response");
        if (!r.blocked && !r.status) throw SchemaError(path + ".status: missing response status");
    }
}

PageSnapshot PageSnapshot::failed_visit(std::string url, Timestamp at, Viewport viewport, CrawlKind kind,
                                        std::string session_id) {
    Fields f;
    f.final_url = url;
    f.url = std::move(url);
    f.fetched_at = at;
    f.viewport = viewport;
    f.crawl_kind = kind;
    f.session_id = std::move(session_id);
    f.failed = true;
    DomNode root;
    root.id = 0;
    root.tag = "html";
    root.visible = false;
    f.nodes.push_back(std::move(root));
    return PageSnapshot(std::move(f));
}

const DomNode* PageSnapshot::find(NodeId id) const {
    auto it = index_.find(id);
    return it == index_.end() ? nullptr : &f_.nodes[it->second];
}

const std::vector<NodeId>& PageSnapshot::children(NodeId id) const {
    static const std::vector<NodeId> empty;
    auto it = index_.find(id);
    return it == index_.end() ? empty : children_[it->second];
}

bool PageSnapshot::is_within(NodeId id, NodeId ancestor) const {
    const DomNode* n = find(id);
    while (n) {
        if (n->id == ancestor) return true;
        n = n->parent ? find(*n->parent) : nullptr;
    }
    return false;
}

bool PageSnapshot::in_overlay(NodeId id) const {
    const DomNode* n = find(id);
    while (n) {
        if (n->z_index > 0) return true;
        n = n->parent ? find(*n->parent) : nullptr;
    }
    return false;
}

PageSnapshot PageSnapshot::with_kind(CrawlKind kind, std::string session_id) const {
    Fields f = f_;
    f.crawl_kind = kind;
    f.session_id = std::move(session_id);
    return PageSnapshot(std::move(f));
}

bool operator==(const PageSnapshot& a, const PageSnapshot& b) {
    const auto& x = a.f_;
    const auto& y = b.f_;
    return x.url == y.url && x.final_url == y.final_url && x.fetched_at == y.fetched_at &&
           x.viewport == y.viewport && x.crawl_kind == y.crawl_kind && x.session_id == y.session_id &&
           x.failed == y.failed && x.nodes == y.nodes && x.requests == y.requests;
}

std::vector<DomNode> visible_text_nodes(const PageSnapshot& s) {
    const auto vw = s.viewport().w;
    const auto vh = s.viewport().h;
    std::vector<DomNode> out;
    for (const auto& n : s.nodes()) {
        if (!n.is_text() || !n.visible) continue;
        const auto& b = n.bbox;
        const bool intersects = b.x <= vw && b.x + b.w >= 0 && b.y <= vh && b.y + b.h >= 0;
        if (intersects) out.push_back(n);
    }
    std::sort(out.begin(), out.end(), [](const DomNode& a, const DomNode& b) { return a.id < b.id; });
    return out;
}

// ---------------------------------------------------------------------------
// Snapshot JSON

namespace {

template <class T>
ordered_json opt(const std::optional<T>& v) {
    return v ? ordered_json(*v) : ordered_json(nullptr);
}

ordered_json node_to_json(const DomNode& n) {
    ordered_json attrs = ordered_json::array();
    for (const auto& [k, v] : n.attrs) attrs.push_back(ordered_json::array({k, v}));
    ordered_json j;
    j["id"] = n.id;
    j["parent"] = opt(n.parent);
    j["tag"] = n.tag;
    j["text"] = opt(n.text);
    j["attrs"] = std::move(attrs);
    j["z_index"] = n.z_index;
    j["bbox"] = {{"x", n.bbox.x}, {"y", n.bbox.y}, {"w", n.bbox.w}, {"h", n.bbox.h}};
    j["visible"] = n.visible;
    j["obscured_by"] = opt(n.obscured_by);
    return j;
}

ordered_json request_to_json(const RequestRecord& r) {
    ordered_json j;
    j["url"] = r.url;
    j["method"] = r.method;
    j["resource_type"] = std::string(to_string(r.resource_type));
    j["blocked"] = r.blocked;
    j["status"] = opt(r.status);
    j["referrer"] = opt(r.referrer);
    return j;
}

}  // namespace

std::string serialize_snapshot(const PageSnapshot& s) {
    ordered_json j;
    j["format"] = kSnapshotFormat;
    j["url"] = s.url();
    j["final_url"] = s.final_url();
    j["fetched_at"] = s.fetched_at();
    j["viewport"] = {{"w", s.viewport().w}, {"h", s.viewport().h}};
    j["crawl_kind"] = std::string(to_string(s.crawl_kind()));
    j["session_id"] = s.session_id();
    j["failed"] = s.failed();
    ordered_json nodes = ordered_json::array();
    for (const auto& n : s.nodes()) nodes.push_back(node_to_json(n));
    j["nodes"] = std::move(nodes);
    ordered_json reqs = ordered_json::array();
    for (const auto& r : s.requests()) reqs.push_back(request_to_json(r));
    j["requests"] = std::move(reqs);
    return j.dump();
}

PageSnapshot deserialize_snapshot(std::string_view bytes) {
    const auto j = jsonutil::parse(bytes);
    jsonutil::Reader root(j, "");
    root.expect_format(kSnapshotFormat);

    PageSnapshot::Fields f;
    f.url = root.str("url");
    f.final_url = root.str("final_url");
    f.fetched_at = root.i64("fetched_at");
    auto vp = root.obj("viewport");
    f.viewport = {vp.i64("w"), vp.i64("h")};
    const auto kind = root.str("crawl_kind");
    auto k = crawl_kind_from_string(kind);
    if (!k) throw SchemaError("crawl_kind: unknown value '" + kind + "'");
    f.crawl_kind = *k;
    f.session_id = root.str("session_id");
    f.failed = root.boolean("failed");

    auto nodes = root.arr("nodes");
    for (std::size_t i = 0; i < nodes.size(); ++i) {
        auto n = nodes.obj_at(i);
        DomNode d;
        d.id = n.i64("id");
        d.parent = n.opt_i64("parent");
        d.tag = n.str("tag");
        d.text = n.opt_str("text");
        auto attrs = n.arr("attrs");
        for (std::size_t a = 0; a < attrs.size(); ++a) {
            const auto& pair = attrs.raw_at(a);
            if (!pair.is_array() || pair.size() != 2 || !pair[0].is_string() || !pair[1].is_string()) {
                throw SchemaError(attrs.path_at(a) + ": attribute must be [name, value]");
            }
            d.attrs.emplace_back(pair[0].get<std::string>(), pair[1].get<std::string>());
        }
        d.z_index = n.i64("z_index");
        auto b = n.obj("bbox");
        d.bbox = {b.i64("x"), b.i64("y"), b.i64("w"), b.i64("h")};
        d.visible = n.boolean("visible");
        d.obscured_by = n.opt_i64("obscured_by");
        f.nodes.push_back(std::move(d));
    }

    auto reqs = root.arr("requests");
    for (std::size_t i = 0; i < reqs.size(); ++i) {
        auto r = reqs.obj_at(i);
        RequestRecord rec;
        rec.url = r.str("url");
        rec.method = r.str("method");
        const auto type = r.str("resource_type");
        auto t = resource_type_from_string(type);
        if (!t) throw SchemaError(r.path() + ".resource_type: unknown value '" + type + "'");
        rec.resource_type = *t;
        rec.blocked = r.boolean("blocked");
        if (auto st = r.opt_i64("status")) rec.status = static_cast<int>(*st);
        rec.referrer = r.opt_str("referrer");
        f.requests.push_back(std::move(rec));
    }
    return PageSnapshot(std::move(f));
}

// ---------------------------------------------------------------------------
// SiteCrawl / CorpusManifest

SiteCrawl::SiteCrawl(std::string site_id, std::string site_root, std::vector<std::string> children,
                     std::vector<PageSnapshot> cookiejar, std::vector<PageSnapshot> clean,
                     std::optional<bool> label)
    : site_id_(std::move(site_id)),
      site_root_(std::move(site_root)),
      children_(std::move(children)),
      cookiejar_(std::move(cookiejar)),
      clean_(std::move(clean)),
      label_(label) {
    if (cookiejar_.size() != children_.size() || clean_.size() != children_.size()) {
        throw SchemaError("SiteCrawl " + site_id_ + ": snapshot lists must match the child list length");
    }
    for (const auto& s : cookiejar_) {
        if (s.crawl_kind() != CrawlKind::cookiejar) {
            throw SchemaError("SiteCrawl " + site_id_ + ": cookiejar list holds a " +
                              std::string(to_string(s.crawl_kind())) + " snapshot");
        }
    }
    for (const auto& s : clean_) {
        if (s.crawl_kind() != CrawlKind::clean) {
            throw SchemaError("SiteCrawl " + site_id_ + ": clean list holds a " +
                              std::string(to_string(s.crawl_kind())) + " snapshot");
        }
    }
}

SiteCrawl SiteCrawl::with_label(std::optional<bool> label) const {
    SiteCrawl copy = *this;
    copy.label_ = label;
    return copy;
}

CorpusManifest::CorpusManifest(std::uint64_t seed, std::vector<ManifestEntry> sites,
                               std::string generator_version)
    : seed_(seed), sites_(std::move(sites)), generator_version_(std::move(generator_version)) {
    std::unordered_set<std::string> seen;
    for (const auto& s : sites_) {
        if (s.site_id.empty()) throw SchemaError("sites: empty site_id");
        if (!seen.insert(s.site_id).second) throw SchemaError("sites: duplicate site_id " + s.site_id);
        if (!is_valid_url(s.root)) throw SchemaError("sites: invalid root URL for " + s.site_id);
    }
}

const ManifestEntry* CorpusManifest::find(std::string_view site_id) const {
    for (const auto& s : sites_) {
        if (s.site_id == site_id) return &s;
    }
    return nullptr;
}

std::string serialize_manifest(const CorpusManifest& m) {
    ordered_json j;
    j["format"] = kCorpusFormat;
    j["seed"] = m.seed();
    j["tool_version"] = kToolVersion;
    j["generator_version"] = m.generator_version();
    ordered_json sites = ordered_json::array();
    for (const auto& s : m.sites()) {
        ordered_json e;
        e["site_id"] = s.site_id;
        e["root"] = s.root;
        e["plan"] = s.plan;
        e["label"] = s.label;
        sites.push_back(std::move(e));
    }
    j["sites"] = std::move(sites);
    return j.dump(2) + "\n";
}

CorpusManifest deserialize_manifest(std::string_view bytes) {
    const auto j = jsonutil::parse(bytes);
    jsonutil::Reader root(j, "");
    root.expect_format(kCorpusFormat);
    std::vector<ManifestEntry> sites;
    auto arr = root.arr("sites");
    for (std::size_t i = 0; i < arr.size(); ++i) {
        auto e = arr.obj_at(i);
        sites.push_back({e.str("site_id"), e.str("root"), e.str("plan"), e.boolean("label")});
    }
    return CorpusManifest(root.u64("seed"), std::move(sites), root.str("generator_version"));
}

}  // namespace pwlab
