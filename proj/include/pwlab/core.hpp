#pragma once

// Shared data model: page snapshots, crawl records and corpus manifests,
// plus their canonical JSON encodings ("snapshot/1", "crawl/1", "corpus/1").

#include <cstdint>
#include <optional>
#include <string>
#include <string_view>
#include <unordered_map>
#include <utility>
#include <vector>

namespace pwlab {

using NodeId = std::int64_t;
using Timestamp = std::int64_t;  // UTC seconds since epoch

struct BBox {
    std::int64_t x = 0;
    std::int64_t y = 0;
    std::int64_t w = 0;
    std::int64_t h = 0;

    std::int64_t area() const { return w * h; }
    friend bool operator==(const BBox&, const BBox&) = default;
};

/// Area of the intersection of two boxes (0 when disjoint).
std::int64_t overlap_area(const BBox& a, const BBox& b);

using Attributes = std::vector<std::pair<std::string, std::string>>;

/// One recorded DOM node. Plain value; the invariants that involve other
/// nodes are enforced when a PageSnapshot is constructed from a node list.
struct DomNode {
    NodeId id = 0;
    std::optional<NodeId> parent;
    std::string tag;  // lowercase element name, or "#text"
    std::optional<std::string> text;
    Attributes attrs;
    std::int64_t z_index = 0;
    BBox bbox;
    bool visible = true;
    std::optional<NodeId> obscured_by;

    bool is_text() const { return tag == "#text"; }
    std::optional<std::string_view> attr(std::string_view name) const;

    friend bool operator==(const DomNode&, const DomNode&) = default;
};

enum class ResourceType { document, script, xhr, image, feed, other };

std::string_view to_string(ResourceType t);
std::optional<ResourceType> resource_type_from_string(std::string_view s);

struct RequestRecord {
    std::string url;
    std::string method = "GET";
    ResourceType resource_type = ResourceType::document;
    bool blocked = false;
    std::optional<int> status;  // absent iff blocked
    std::optional<std::string> referrer;

    friend bool operator==(const RequestRecord&, const RequestRecord&) = default;
};

enum class CrawlKind { initial, cookiejar, clean };

std::string_view to_string(CrawlKind k);
std::optional<CrawlKind> crawl_kind_from_string(std::string_view s);

struct Viewport {
    std::int64_t w = 1280;
    std::int64_t h = 800;
    friend bool operator==(const Viewport&, const Viewport&) = default;
};

/// Recorded final state of one page visit. Immutable; the constructor
/// rejects every invariant violation with SchemaError.
class PageSnapshot {
public:
    struct Fields {
        std::string url;
        std::string final_url;
        Timestamp fetched_at = 0;
        Viewport viewport;
        CrawlKind crawl_kind = CrawlKind::initial;
        std::string session_id;
        bool failed = false;
        std::vector<DomNode> nodes;
        std::vector<RequestRecord> requests;
    };

    explicit PageSnapshot(Fields fields);

    /// Placeholder for a page that could not be fetched: a single empty
    /// root node, flagged failed.
    static PageSnapshot failed_visit(std::string url, Timestamp at, Viewport viewport, CrawlKind kind,
                                     std::string session_id);

    const std::string& url() const { return f_.url; }
    const std::string& final_url() const { return f_.final_url; }
    Timestamp fetched_at() const { return f_.fetched_at; }
    const Viewport& viewport() const { return f_.viewport; }
    CrawlKind crawl_kind() const { return f_.crawl_kind; }
    const std::string& session_id() const { return f_.session_id; }
    bool failed() const { return f_.failed; }
    const std::vector<DomNode>& nodes() const { return f_.nodes; }
    const std::vector<RequestRecord>& requests() const { return f_.requests; }
    bool redirected() const { return f_.final_url != f_.url; }

    const DomNode& root() const { return f_.nodes[root_index_]; }
    const DomNode* find(NodeId id) const;
    /// Child ids in document (list) order.
    const std::vector<NodeId>& children(NodeId id) const;
    /// True when `ancestor` is `id` or lies on its parent chain.
    bool is_within(NodeId id, NodeId ancestor) const;
    /// True when the node or one of its ancestors has z_index > 0.
    bool in_overlay(NodeId id) const;

    /// Copy with a different crawl kind and session (the crawler records a
    /// visit first and classifies it afterwards).
    PageSnapshot with_kind(CrawlKind kind, std::string session_id) const;

    friend bool operator==(const PageSnapshot& a, const PageSnapshot& b);

private:
    Fields f_;
    std::size_t root_index_ = 0;
    std::unordered_map<NodeId, std::size_t> index_;
    std::vector<std::vector<NodeId>> children_;
};

/// Text nodes that are visible and whose bbox intersects the viewport
/// rectangle (closed intervals: touching the edge counts), ordered by id.
std::vector<DomNode> visible_text_nodes(const PageSnapshot& snapshot);

/// Serializes to canonical UTF-8 JSON: fixed key order, every key always
/// present (null for absent optionals), no insignificant whitespace.
std::string serialize_snapshot(const PageSnapshot& snapshot);

/// Inverse of serialize_snapshot. ParseError on malformed JSON,
/// SchemaError (naming the JSON path) on structural violations.
PageSnapshot deserialize_snapshot(std::string_view bytes);

/// The three crawls of one site.
class SiteCrawl {
public:
    SiteCrawl(std::string site_id, std::string site_root, std::vector<std::string> children,
              std::vector<PageSnapshot> cookiejar, std::vector<PageSnapshot> clean,
              std::optional<bool> label = std::nullopt);

    const std::string& site_id() const { return site_id_; }
    const std::string& site_root() const { return site_root_; }
    const std::vector<std::string>& children() const { return children_; }
    const std::vector<PageSnapshot>& cookiejar_snapshots() const { return cookiejar_; }
    const std::vector<PageSnapshot>& clean_snapshots() const { return clean_; }
    const std::optional<bool>& label() const { return label_; }

    SiteCrawl with_label(std::optional<bool> label) const;

private:
    std::string site_id_;
    std::string site_root_;
    std::vector<std::string> children_;
    std::vector<PageSnapshot> cookiejar_;
    std::vector<PageSnapshot> clean_;
    std::optional<bool> label_;
};

struct ManifestEntry {
    std::string site_id;
    std::string root;
    std::string plan;  // path of the plan file, relative to the manifest
    bool label = false;

    friend bool operator==(const ManifestEntry&, const ManifestEntry&) = default;
};

class CorpusManifest {
public:
    CorpusManifest(std::uint64_t seed, std::vector<ManifestEntry> sites,
                   std::string generator_version);

    std::uint64_t seed() const { return seed_; }
    const std::vector<ManifestEntry>& sites() const { return sites_; }
    const std::string& generator_version() const { return generator_version_; }
    const ManifestEntry* find(std::string_view site_id) const;

    friend bool operator==(const CorpusManifest&, const CorpusManifest&) = default;

private:
    std::uint64_t seed_;
    std::vector<ManifestEntry> sites_;
    std::string generator_version_;
};

std::string serialize_manifest(const CorpusManifest& manifest);
CorpusManifest deserialize_manifest(std::string_view bytes);

}  // namespace pwlab
