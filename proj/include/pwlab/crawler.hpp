#pragma once

// Three-crawl data collection: child discovery from the site root, one
// shared-session crawl over the children, and one fresh session per child.

#include <cstddef>
#include <filesystem>
#include <string>
#include <vector>

#include "pwlab/browser.hpp"
#include "pwlab/core.hpp"

namespace pwlab {

inline constexpr std::size_t kDefaultChildLimit = 5;
/// Logical clock origin for snapshot timestamps (2019-01-01T00:00:00Z).
inline constexpr Timestamp kCrawlEpoch = 1546300800;

/// In-domain links of a recorded page whose path has at least two
/// segments, resolved, deduplicated, in document order, at most `limit`.
std::vector<std::string> child_links(const PageSnapshot& page, std::size_t limit);

class Crawler {
public:
    Crawler(Transport& transport, Capabilities capabilities, VisitorProfile profile = default_profile());

    std::vector<std::string> discover_children(const std::string& site_root, std::size_t limit);

    /// One session for all children, strictly sequential. Failed pages
    /// become placeholder snapshots.
    std::vector<PageSnapshot> cookie_jar_crawl(const std::vector<std::string>& children, const std::string& site_root);

    /// A fresh session per child with a per-URL font variation, so no two
    /// pages share a fingerprint.
    std::vector<PageSnapshot> clean_crawl(const std::vector<std::string>& children);

    /// Discovery, cookie-jar crawl, clean crawl. FetchError from discovery
    /// is rethrown with the site root attached.
    SiteCrawl crawl_site(const std::string& site_id, const std::string& site_root, std::size_t limit);

    /// Session the clean crawl uses for `url` (exposed for tests).
    CrawlSession clean_session_for(const std::string& url) const;

private:
    Timestamp tick() { return kCrawlEpoch + clock_++; }
    PageSnapshot visit_or_placeholder(CrawlSession& session, const std::string& url, CrawlKind kind);

    Transport& transport_;
    Capabilities capabilities_;
    VisitorProfile profile_;
    Timestamp clock_ = 0;
};

/// On-disk layout: <dir>/<site_id>/crawl.json ("crawl/1") next to one
/// snapshot file per page.
void write_site_crawl(const SiteCrawl& crawl, const std::filesystem::path& dir, std::uint64_t seed);
SiteCrawl read_site_crawl(const std::filesystem::path& site_dir, std::uint64_t* seed = nullptr);

}  // namespace pwlab
