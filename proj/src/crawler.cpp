#include "pwlab/crawler.hpp"

#include <set>

#include "io.hpp"
#include "json_util.hpp"
#include "pwlab/errors.hpp"
#include "pwlab/murmur3.hpp"
#include "pwlab/text.hpp"
#include "pwlab/url.hpp"
#include "pwlab/version.hpp"

namespace pwlab {

std::vector<std::string> child_links(const PageSnapshot& page, std::size_t limit) {
    std::vector<std::string> out;
    std::set<std::string> seen;
    const auto base = Url::parse(page.final_url());
    if (!base) return out;
    for (const auto& n : page.nodes()) {
        if (out.size() >= limit) break;
        if (n.tag != "a") continue;
        const auto href = n.attr("href");
        if (!href) continue;
        const auto target = base->resolve(*href);
        if (!target || target->host != base->host) continue;
        std::size_t segments = 0;
        for (const auto& s : text::split(target->path, '/')) segments += s.empty() ? 0 : 1;
        if (segments < 2) continue;
        auto url = target->str();
        if (seen.insert(url).second) out.push_back(std::move(url));
    }
    return out;
}

Crawler::Crawler(Transport& transport, Capabilities capabilities, VisitorProfile profile)
    : transport_(transport), capabilities_(std::move(capabilities)), profile_(std::move(profile)) {}

PageSnapshot Crawler::visit_or_placeholder(CrawlSession& session, const std::string& url, CrawlKind kind) {
    const auto at = tick();
    try {
        return Browser(transport_).visit(session, url, kind, at);
    } catch (const FetchError&) {
        return PageSnapshot::failed_visit(url, at, viewport_for(session.profile), kind, session.session_id);
    }
}

std::vector<std::string> Crawler::discover_children(const std::string& site_root, std::size_t limit) {
    auto session = fresh_session("initial-" + murmur3_x64_128(site_root, 0).hex().substr(0, 16), profile_,
                                 capabilities_);
    const auto page = Browser(transport_).visit(session, site_root, CrawlKind::initial, tick());
    return child_links(page, limit);
}

std::vector<PageSnapshot> Crawler::cookie_jar_crawl(const std::vector<std::string>& children,
                                                    const std::string& site_root) {
    auto session = fresh_session("jar-" + murmur3_x64_128(site_root, 1).hex().substr(0, 16), profile_,
                                 capabilities_);
    std::vector<PageSnapshot> out;
    for (const auto& url : children) out.push_back(visit_or_placeholder(session, url, CrawlKind::cookiejar));
    return out;
}

CrawlSession Crawler::clean_session_for(const std::string& url) const {
    const auto h = murmur3_x64_128(url, 2).hex();
    auto profile = profile_;
    profile.fonts.push_back("Variant Sans " + h.substr(0, 8));
    return fresh_session("clean-" + h.substr(0, 16), std::move(profile), capabilities_);
}

std::vector<PageSnapshot> Crawler::clean_crawl(const std::vector<std::string>& children) {
    std::vector<PageSnapshot> out;
    for (const auto& url : children) {
        auto session = clean_session_for(url);
        out.push_back(visit_or_placeholder(session, url, CrawlKind::clean));
    }
    return out;
}

SiteCrawl Crawler::crawl_site(const std::string& site_id, const std::string& site_root, std::size_t limit) {
    std::vector<std::string> children;
    try {
        children = discover_children(site_root, limit);
    } catch (const FetchError& e) {
        throw FetchError("site " + site_id + " (" + site_root + "): " + e.what());
    }
    auto jar = cookie_jar_crawl(children, site_root);
    auto clean = clean_crawl(children);
    return SiteCrawl(site_id, site_root, children, std::move(jar), std::move(clean));
}

// ---------------------------------------------------------------------------

namespace {

std::string page_file(CrawlKind kind, std::size_t i) {
    char buf[32];
    std::snprintf(buf, sizeof buf, "%s-%02zu.json", std::string(to_string(kind)).c_str(), i);
    return buf;
}

}  // namespace

void write_site_crawl(const SiteCrawl& crawl, const std::filesystem::path& dir, std::uint64_t seed) {
    const auto site_dir = dir / crawl.site_id();
    std::filesystem::create_directories(site_dir);
    nlohmann::ordered_json j;
    j["format"] = kCrawlFormat;
    j["tool_version"] = kToolVersion;
    j["seed"] = seed;
    j["site_id"] = crawl.site_id();
    j["site_root"] = crawl.site_root();
    j["label"] = crawl.label() ? nlohmann::ordered_json(*crawl.label()) : nlohmann::ordered_json(nullptr);
    j["children"] = crawl.children();
    auto files = [&](const std::vector<PageSnapshot>& pages, CrawlKind kind) {
        auto arr = nlohmann::ordered_json::array();
        for (std::size_t i = 0; i < pages.size(); ++i) {
            const auto name = page_file(kind, i);
            io::write_file(site_dir / name, serialize_snapshot(pages[i]) + "\n");
            arr.push_back(name);
        }
        return arr;
    };
    j["cookiejar"] = files(crawl.cookiejar_snapshots(), CrawlKind::cookiejar);
    j["clean"] = files(crawl.clean_snapshots(), CrawlKind::clean);
    io::write_file(site_dir / "crawl.json", j.dump(2) + "\n");
}

SiteCrawl read_site_crawl(const std::filesystem::path& site_dir, std::uint64_t* seed) {
    const auto j = jsonutil::parse(io::read_file(site_dir / "crawl.json"));
    jsonutil::Reader r(j, "");
    r.expect_format(kCrawlFormat);
    if (seed) *seed = r.u64("seed");
    std::vector<std::string> children;
    auto c = r.arr("children");
    for (std::size_t i = 0; i < c.size(); ++i) children.push_back(c.str_at(i));
    auto load = [&](std::string_view key) {
        std::vector<PageSnapshot> out;
        auto a = r.arr(key);
        for (std::size_t i = 0; i < a.size(); ++i) {
            out.push_back(deserialize_snapshot(io::read_file(site_dir / a.str_at(i))));
        }
        return out;
    };
    std::optional<bool> label;
    if (!r.at("label").is_null()) label = r.boolean("label");
    return SiteCrawl(r.str("site_id"), r.str("site_root"), std::move(children), load("cookiejar"), load("clean"),
                     label);
}

}  // namespace pwlab
