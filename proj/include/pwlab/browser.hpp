#pragma once

// Browser model: fetches a page through a Transport, runs the paywall
// client's meter exchange when allowed, applies client-side enforcement,
// lays the document out with a fixed block-flow rule, and records the
// result as a PageSnapshot.

#include <map>
#include <optional>
#include <string>
#include <vector>

#include "pwlab/core.hpp"
#include "pwlab/html.hpp"
#include "pwlab/http.hpp"
#include "pwlab/identity.hpp"

namespace pwlab {

struct Capabilities {
    bool execute_paywall_script = true;
    std::vector<std::string> blocked_url_patterns;  // filter-list syntax
    std::optional<std::string> referrer_override;
    bool reader_mode = false;
    /// Page fetched through a third-party fetch service: no script runs.
    bool fetch_service = false;

    friend bool operator==(const Capabilities&, const Capabilities&) = default;
};

struct CrawlSession {
    std::string session_id;
    std::map<std::string, std::string> cookie_jar;
    VisitorProfile profile;
    Capabilities capabilities;
    std::string transport_ip = "198.51.100.10";

    friend bool operator==(const CrawlSession&, const CrawlSession&) = default;
};

CrawlSession fresh_session(std::string session_id, VisitorProfile profile = default_profile(),
                           Capabilities capabilities = {});

/// Viewport from the profile's "WxH@ox,oy" screen string; 1280x800 when
/// it does not parse.
Viewport viewport_for(const VisitorProfile& profile);

/// Layout constants.
inline constexpr std::int64_t kLineHeight = 20;
inline constexpr std::int64_t kGlyphWidth = 8;
inline constexpr std::int64_t kBlockMargin = 8;
inline constexpr std::int64_t kPageMargin = 40;

/// Lays out `root` and flattens it into snapshot nodes (pre-order ids from
/// 0). Exposed for fixtures.
std::vector<DomNode> layout_document(const html::Element& root, Viewport viewport);

class Browser {
public:
    explicit Browser(Transport& transport) : transport_(transport) {}

    /// Visits `url`, following up to five redirects. Throws FetchError when
    /// the document cannot be loaded (transport failure, status >= 400,
    /// blocked by the session's own patterns).
    PageSnapshot visit(CrawlSession& session, const std::string& url, CrawlKind kind, Timestamp fetched_at);

private:
    Transport& transport_;
};

}  // namespace pwlab
