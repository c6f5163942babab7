#include <gtest/gtest.h>

#include "io.hpp"
#include "json.hpp"
#include "pwlab/core.hpp"
#include "pwlab/errors.hpp"
#include "pwlab/rng.hpp"
#include "support.hpp"

using namespace pwlab;

namespace {

DomNode element(NodeId id, std::optional<NodeId> parent, std::string tag) {
    DomNode n;
    n.id = id;
    n.parent = parent;
    n.tag = std::move(tag);
    n.bbox = {0, 0, 100, 20};
    return n;
}

DomNode text_node(NodeId id, NodeId parent, std::string text, BBox box = {40, 8, 80, 20}) {
    DomNode n;
    n.id = id;
    n.parent = parent;
    n.tag = "#text";
    n.text = std::move(text);
    n.bbox = box;
    return n;
}

PageSnapshot::Fields minimal_fields() {
    PageSnapshot::Fields f;
    f.url = "http://a.sim.test/";
    f.final_url = f.url;
    f.nodes.push_back(element(0, std::nullopt, "html"));
    return f;
}

std::string strip_newline(std::string s) {
    if (!s.empty() && s.back() == '\n') s.pop_back();
    return s;
}

/// A random valid snapshot: a random tree, some text leaves, some overlays.
PageSnapshot random_snapshot(Rng& rng) {
    auto f = minimal_fields();
    f.fetched_at = static_cast<Timestamp>(rng.below(2'000'000'000));
    f.viewport = {static_cast<std::int64_t>(rng.between(1, 2000)), static_cast<std::int64_t>(rng.between(1, 2000))};
    f.session_id = "s" + std::to_string(rng.next());
    std::vector<NodeId> elements{0};
    std::vector<NodeId> overlays;
    const auto n = rng.between(1, 30);
    for (NodeId id = 1; id <= n; ++id) {
        const auto parent = elements[rng.below(elements.size())];
        if (rng.below(3) == 0) {
            auto t = text_node(id, parent, "w\"\\ " + std::to_string(rng.next()) + " \xc3\xa9");
            t.bbox = {rng.between(-50, 1500), rng.between(-50, 3000), rng.between(0, 400), rng.between(0, 60)};
            t.visible = rng.below(4) != 0;
            if (!overlays.empty() && rng.below(2) == 0) t.obscured_by = overlays[rng.below(overlays.size())];
            f.nodes.push_back(std::move(t));
        } else {
            auto e = element(id, parent, rng.below(2) ? "div" : "p");
            e.attrs = {{"class", "c" + std::to_string(rng.below(5))}, {"data-x", "<&>"}};
            if (rng.below(4) == 0) {
                e.z_index = rng.between(1, 2000);
                overlays.push_back(id);
            }
            f.nodes.push_back(std::move(e));
            elements.push_back(id);
        }
    }
    RequestRecord r;
    r.url = "http://a.sim.test/paywall.js";
    r.resource_type = ResourceType::script;
    r.blocked = rng.below(2) == 0;
    if (!r.blocked) r.status = 200;
    r.referrer = "http://a.sim.test/";
    f.requests.push_back(r);
    return PageSnapshot(std::move(f));
}

}  // namespace

TEST(Snapshot, MinimalSerializationHasDocumentedKeys) {
    const PageSnapshot s(minimal_fields());
    const auto j = nlohmann::ordered_json::parse(serialize_snapshot(s));
    std::vector<std::string> keys;
    for (const auto& [k, v] : j.items()) keys.push_back(k);
    EXPECT_EQ(keys, (std::vector<std::string>{"format", "url", "final_url", "fetched_at", "viewport", "crawl_kind",
                                              "session_id", "failed", "nodes", "requests"}));
    std::vector<std::string> node_keys;
    for (const auto& [k, v] : j["nodes"][0].items()) node_keys.push_back(k);
    EXPECT_EQ(node_keys, (std::vector<std::string>{"id", "parent", "tag", "text", "attrs", "z_index", "bbox", "visible",
                                                   "obscured_by"}));
    EXPECT_EQ(j["format"], "snapshot/1");
}

TEST(Snapshot, RoundTripAndCanonical) {
    Rng rng(11);
    for (int i = 0; i < 200; ++i) {
        const auto s = random_snapshot(rng);
        const auto bytes = serialize_snapshot(s);
        EXPECT_EQ(serialize_snapshot(s), bytes);
        const auto back = deserialize_snapshot(bytes);
        EXPECT_EQ(back, s);
        EXPECT_EQ(serialize_snapshot(back), bytes);
        EXPECT_EQ(bytes.find('\n'), std::string::npos);
    }
}

TEST(Snapshot, GoldenExampleIsCanonical) {
    const auto bytes = io::read_file(pwtest::source_dir() / "formats/examples/snapshot.json");
    const auto s = deserialize_snapshot(bytes);
    EXPECT_EQ(serialize_snapshot(s), strip_newline(bytes));
    EXPECT_EQ(s.nodes().size(), 6u);
    EXPECT_EQ(*s.find(3)->obscured_by, 4);
    EXPECT_TRUE(s.requests()[2].blocked);
}

TEST(Snapshot, DanglingParentNamesTheNode) {
    auto j = nlohmann::ordered_json::parse(serialize_snapshot(PageSnapshot(minimal_fields())));
    nlohmann::ordered_json child = j["nodes"][0];
    child["id"] = 7;
    child["parent"] = 99;
    j["nodes"].push_back(child);
    try {
        deserialize_snapshot(j.dump());
        FAIL() << "expected SchemaError";
    } catch (const SchemaError& e) {
        const std::string msg = e.what();
        EXPECT_NE(msg.find("nodes[1]"), std::string::npos) << msg;
        EXPECT_NE(msg.find("99"), std::string::npos) << msg;
    }
}

TEST(Snapshot, DuplicateIdNamesThePath) {
    auto j = nlohmann::ordered_json::parse(serialize_snapshot(PageSnapshot(minimal_fields())));
    auto dup = j["nodes"][0];
    dup["parent"] = 0;
    j["nodes"].push_back(dup);
    try {
        deserialize_snapshot(j.dump());
        FAIL() << "expected SchemaError";
    } catch (const SchemaError& e) {
        EXPECT_NE(std::string(e.what()).find("nodes[1].id"), std::string::npos) << e.what();
    }
}

TEST(Snapshot, MissingFieldNamesThePath) {
    auto j = nlohmann::ordered_json::parse(serialize_snapshot(PageSnapshot(minimal_fields())));
    j["nodes"][0].erase("bbox");
    try {
        deserialize_snapshot(j.dump());
        FAIL() << "expected SchemaError";
    } catch (const SchemaError& e) {
        EXPECT_NE(std::string(e.what()).find("nodes[0].bbox"), std::string::npos) << e.what();
    }
}

TEST(Snapshot, TruncatedInputIsParseError) {
    const auto bytes = serialize_snapshot(PageSnapshot(minimal_fields()));
    EXPECT_THROW(deserialize_snapshot(bytes.substr(0, bytes.size() / 2)), ParseError);
}

TEST(Snapshot, ForeignFormatIsVersionMismatch) {
    auto j = nlohmann::ordered_json::parse(serialize_snapshot(PageSnapshot(minimal_fields())));
    j["format"] = "snapshot/2";
    EXPECT_THROW(deserialize_snapshot(j.dump()), VersionMismatch);
}

TEST(Snapshot, EveryInvariantViolationIsRejected) {
    auto expect_reject = [](auto mutate) {
        auto f = minimal_fields();
        f.nodes.push_back(element(1, 0, "body"));
        mutate(f);
        EXPECT_THROW(PageSnapshot{f}, SchemaError);
    };
    expect_reject([](auto& f) { f.nodes.clear(); });
    expect_reject([](auto& f) { f.nodes[1].parent.reset(); });            // two roots
    expect_reject([](auto& f) { f.nodes[1].id = 0; });                     // duplicate id
    expect_reject([](auto& f) { f.nodes[1].parent = 5; });                 // dangling parent
    expect_reject([](auto& f) { f.viewport.w = 0; });
    expect_reject([](auto& f) { f.viewport.h = -3; });
    expect_reject([](auto& f) { f.url = "not a url"; });
    expect_reject([](auto& f) { f.final_url = "ftp//x"; });
    expect_reject([](auto& f) { f.nodes[1].text = "element text"; });     // text on an element
    expect_reject([](auto& f) { f.nodes.push_back(text_node(2, 1, "")); });  // empty text node
    expect_reject([](auto& f) {
        auto t = text_node(2, 1, "x");
        t.text.reset();
        f.nodes.push_back(t);
    });
    expect_reject([](auto& f) { f.nodes[1].tag = "BODY"; });
    expect_reject([](auto& f) {
        auto t = text_node(2, 1, "x");
        t.obscured_by = 1;  // z_index 0
        f.nodes.push_back(t);
    });
    expect_reject([](auto& f) {
        RequestRecord r;
        r.url = "http://a.sim.test/x.js";
        r.blocked = true;
        r.status = 200;
        f.requests.push_back(r);
    });
    expect_reject([](auto& f) {
        RequestRecord r;
        r.url = "relative/path";
        r.status = 200;
        f.requests.push_back(r);
    });
    expect_reject([](auto& f) {
        f.nodes.push_back(text_node(2, 1, "x"));
        f.nodes.push_back(element(3, 2, "span"));  // child of a text node
    });
}

TEST(VisibleText, ThreeInViewportTwoBelowTheFold) {
    auto f = minimal_fields();
    f.viewport = {1280, 800};
    f.nodes.push_back(element(1, 0, "body"));
    f.nodes.push_back(text_node(2, 1, "a", {40, 10, 50, 20}));
    f.nodes.push_back(text_node(3, 1, "b", {40, 900, 50, 20}));
    f.nodes.push_back(text_node(4, 1, "c", {40, 300, 50, 20}));
    f.nodes.push_back(text_node(5, 1, "d", {40, 2000, 50, 20}));
    f.nodes.push_back(text_node(6, 1, "e", {40, 700, 50, 20}));
    const auto got = visible_text_nodes(PageSnapshot(f));
    ASSERT_EQ(got.size(), 3u);
    EXPECT_EQ(got[0].id, 2);
    EXPECT_EQ(got[1].id, 4);
    EXPECT_EQ(got[2].id, 6);
}

TEST(VisibleText, InvisibleNodesExcluded) {
    auto f = minimal_fields();
    f.nodes.push_back(element(1, 0, "body"));
    for (NodeId id = 2; id < 6; ++id) {
        auto t = text_node(id, 1, "x");
        t.visible = false;
        f.nodes.push_back(t);
    }
    EXPECT_TRUE(visible_text_nodes(PageSnapshot(f)).empty());
}

TEST(VisibleText, EdgeTouchCounts) {
    auto f = minimal_fields();
    f.viewport = {1280, 800};
    f.nodes.push_back(element(1, 0, "body"));
    f.nodes.push_back(text_node(2, 1, "top edge", {40, 800, 50, 20}));
    f.nodes.push_back(text_node(3, 1, "left edge", {-50, 10, 50, 20}));
    f.nodes.push_back(text_node(4, 1, "beyond", {40, 801, 50, 20}));
    const auto got = visible_text_nodes(PageSnapshot(f));
    ASSERT_EQ(got.size(), 2u);
    EXPECT_EQ(got[0].id, 2);
    EXPECT_EQ(got[1].id, 3);
}

TEST(VisibleText, IsAnOrderStableIdempotentFilter) {
    Rng rng(3);
    for (int i = 0; i < 100; ++i) {
        const auto s = random_snapshot(rng);
        const auto once = visible_text_nodes(s);
        EXPECT_EQ(visible_text_nodes(s), once);
        NodeId last = -1;
        for (const auto& n : once) {
            const auto* orig = s.find(n.id);
            ASSERT_NE(orig, nullptr);
            EXPECT_EQ(*orig, n);
            EXPECT_GT(n.id, last);
            last = n.id;
        }
    }
}

TEST(Overlap, Area) {
    EXPECT_EQ(overlap_area({0, 0, 10, 10}, {5, 5, 10, 10}), 25);
    EXPECT_EQ(overlap_area({0, 0, 10, 10}, {10, 0, 10, 10}), 0);
    EXPECT_EQ(overlap_area({0, 0, 10, 10}, {2, 2, 3, 3}), 9);
}

TEST(SiteCrawlType, LengthsAndKindsMustMatch) {
    auto f = minimal_fields();
    f.crawl_kind = CrawlKind::cookiejar;
    const PageSnapshot jar(f);
    f.crawl_kind = CrawlKind::clean;
    const PageSnapshot clean(f);
    EXPECT_NO_THROW(SiteCrawl("s", "http://a.sim.test/", {"http://a.sim.test/article/0"}, {jar}, {clean}));
    EXPECT_THROW(SiteCrawl("s", "http://a.sim.test/", {"http://a.sim.test/article/0"}, {jar}, {}), SchemaError);
    EXPECT_THROW(SiteCrawl("s", "http://a.sim.test/", {"http://a.sim.test/article/0"}, {clean}, {clean}), SchemaError);
}

TEST(Manifest, GoldenExampleRoundTrips) {
    const auto bytes = io::read_file(pwtest::source_dir() / "formats/examples/corpus_manifest.json");
    const auto m = deserialize_manifest(bytes);
    EXPECT_EQ(m.seed(), 42u);
    ASSERT_EQ(m.sites().size(), 2u);
    EXPECT_TRUE(m.sites()[0].label);
    EXPECT_EQ(serialize_manifest(m), bytes);
}

TEST(Manifest, DuplicateSiteIdsRejected) {
    EXPECT_THROW(CorpusManifest(1, {{"a", "http://a.sim.test/", "plans/a.json", false},
                                    {"a", "http://b.sim.test/", "plans/a.json", true}},
                                "gen/2"),
                 SchemaError);
}
