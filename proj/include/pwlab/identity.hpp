#pragma once

// Visitor identity and metering: fingerprint composition, cookie-first
// visitor resolution, and the per-visitor meter state machine with its
// wire schema.

#include <cstdint>
#include <map>
#include <optional>
#include <set>
#include <string>
#include <vector>

#include "pwlab/murmur3.hpp"
#include "pwlab/policy.hpp"

namespace pwlab {

/// Browser characteristics a fingerprinting script can read, plus the
/// first-party cookie when one is stored.
struct VisitorProfile {
    std::string locality;
    std::vector<std::string> plugins;
    std::vector<std::string> fonts;
    std::string screen;  // "WxH@ox,oy"
    std::string user_agent;
    std::vector<std::string> browser_objects;
    std::optional<std::string> cookie;

    /// Throws ConfigError when any component contains a NUL byte.
    void validate() const;

    friend bool operator==(const VisitorProfile&, const VisitorProfile&) = default;
};

/// A desktop-browser profile used as the crawler default.
VisitorProfile default_profile();

struct Fingerprint {
    Hash128 value;
    std::string hex() const { return value.hex(); }
    friend bool operator==(const Fingerprint&, const Fingerprint&) = default;
    friend auto operator<=>(const Fingerprint&, const Fingerprint&) = default;
};

/// The raw string that gets hashed: locality, plugins, fonts, screen,
/// user agent, browser objects, in that order, lists joined by ",", no
/// separator between components.
std::string fingerprint_raw(const VisitorProfile& p);

/// murmur3_x64_128(fingerprint_raw(p), seed 0).
Fingerprint compose_fingerprint(const VisitorProfile& p);

struct VisitorId {
    enum class Kind { cookie, fingerprint };
    Kind kind = Kind::cookie;
    std::string value;  // cookie id, or 32-hex fingerprint

    static VisitorId from_cookie(std::string id) { return {Kind::cookie, std::move(id)}; }
    static VisitorId from_fingerprint(const Fingerprint& f) { return {Kind::fingerprint, f.hex()}; }

    std::string str() const;  // "cookie:<id>" / "fp:<hex>"
    friend bool operator==(const VisitorId&, const VisitorId&) = default;
    friend auto operator<=>(const VisitorId&, const VisitorId&) = default;
};

/// Cookie when the profile carries one, fingerprint otherwise.
VisitorId resolve_visitor_id(const VisitorProfile& p);

inline constexpr const char* kDefaultMeterName = "DefaultMeter";

struct MeterState {
    std::string meter_name = kDefaultMeterName;
    std::uint32_t views = 0;
    std::uint32_t views_left = 0;
    std::uint32_t max_views = 0;
    std::uint64_t total_views = 0;
    std::set<ArticleId> seen_articles;

    static MeterState fresh(std::uint32_t max_views, std::string name = kDefaultMeterName);

    /// views + views_left == max_views, views == |seen|, total >= views.
    bool consistent() const;

    friend bool operator==(const MeterState&, const MeterState&) = default;
};

/// Per-publisher meter bookkeeping, one MeterState per visitor. Not
/// internally synchronized: callers serialize access.
class MeterStore {
public:
    explicit MeterStore(std::uint32_t max_views, std::string meter_name = kDefaultMeterName);

    /// Counts a view of `article`. A new article consumes quota while any
    /// is left; a repeat view only bumps total_views. Meters never expire.
    const MeterState& register_view(const VisitorId& visitor, ArticleId article, std::int64_t now);

    /// Current state, or a fresh meter for an unknown visitor.
    MeterState state(const VisitorId& visitor) const;

    /// Opaque token: hex of a per-store counter mixed with the visitor id hash.
    std::string next_tracking_id(const VisitorId& visitor);

    std::uint32_t max_views() const { return max_views_; }
    std::size_t visitor_count() const { return meters_.size(); }

private:
    std::uint32_t max_views_;
    std::string meter_name_;
    std::map<VisitorId, MeterState> meters_;
    std::map<VisitorId, std::int64_t> last_seen_;
    std::uint64_t counter_ = 0;
};

/// Hard: always enforce. Soft: grant a seen article or while quota is
/// left. Hybrid: free-set articles are granted, the rest follow the soft rule.
AccessDecision meter_decision(const MeterState& state, const PaywallPolicy& policy, ArticleId article);

/// The meter endpoint's JSON body: trackingId, splitTests (empty),
/// currentMeterName, activeMeters[{meterName, views, viewsLeft, maxViews,
/// totalViews}], indented by four spaces.
std::string serialize_meter_response(const MeterState& state, const std::string& tracking_id);

}  // namespace pwlab
