#include "pwlab/identity.hpp"

#include "json.hpp"
#include "pwlab/errors.hpp"
#include "pwlab/text.hpp"

namespace pwlab {

void VisitorProfile::validate() const {
    auto check = [](std::string_view what, std::string_view s) {
        if (text::contains_nul(s)) throw ConfigError("profile." + std::string(what) + " contains a NUL byte");
    };
    check("locality", locality);
    for (const auto& p : plugins) check("plugins", p);
    for (const auto& f : fonts) check("fonts", f);
    check("screen", screen);
    check("user_agent", user_agent);
    for (const auto& b : browser_objects) check("browser_objects", b);
    if (cookie) check("cookie", *cookie);
}

VisitorProfile default_profile() {
    VisitorProfile p;
    p.locality = "en-US";
    p.plugins = {"PDF Viewer", "Chrome PDF Viewer", "Chromium PDF Viewer"};
    p.fonts = {"Arial", "DejaVu Sans", "Liberation Serif", "Noto Sans"};
    p.screen = "1280x800@0,0";
    p.user_agent = "Mozilla/5.0 (X11; Linux x86_64) AppleWebKit/537.36 (KHTML, like Gecko) Chrome/71.0 Safari/537.36";
    p.browser_objects = {"localStorage", "sessionStorage", "indexedDB", "openDatabase"};
    return p;
}

std::string fingerprint_raw(const VisitorProfile& p) {
    std::string raw = p.locality;
    raw += text::join(p.plugins, ",");
    raw += text::join(p.fonts, ",");
    raw += p.screen;
    raw += p.user_agent;
    raw += text::join(p.browser_objects, ",");
    return raw;
}

Fingerprint compose_fingerprint(const VisitorProfile& p) { return {murmur3_x64_128(fingerprint_raw(p), 0)}; }

std::string VisitorId::str() const { return (kind == Kind::cookie ? "cookie:" : "fp:") + value; }

VisitorId resolve_visitor_id(const VisitorProfile& p) {
    if (p.cookie) return VisitorId::from_cookie(*p.cookie);
    return VisitorId::from_fingerprint(compose_fingerprint(p));
}

// ---------------------------------------------------------------------------

MeterState MeterState::fresh(std::uint32_t max_views, std::string name) {
    MeterState s;
    s.meter_name = std::move(name);
    s.max_views = max_views;
    s.views_left = max_views;
    return s;
}

bool MeterState::consistent() const {
    return views + views_left == max_views && views == seen_articles.size() && total_views >= views;
}

MeterStore::MeterStore(std::uint32_t max_views, std::string meter_name)
    : max_views_(max_views), meter_name_(std::move(meter_name)) {}

const MeterState& MeterStore::register_view(const VisitorId& visitor, ArticleId article, std::int64_t now) {
    auto [it, inserted] = meters_.try_emplace(visitor, MeterState::fresh(max_views_, meter_name_));
    auto& s = it->second;
    if (!s.seen_articles.count(article) && s.views_left > 0) {
        ++s.views;
        --s.views_left;
        s.seen_articles.insert(article);
    }
    ++s.total_views;
    last_seen_[visitor] = now;
    return s;
}

MeterState MeterStore::state(const VisitorId& visitor) const {
    auto it = meters_.find(visitor);
    return it == meters_.end() ? MeterState::fresh(max_views_, meter_name_) : it->second;
}

std::string MeterStore::next_tracking_id(const VisitorId& visitor) {
    const auto h = murmur3_x64_128(visitor.str(), ++counter_);
    return "{jcx}" + h.hex();
}

AccessDecision meter_decision(const MeterState& state, const PaywallPolicy& policy, ArticleId article) {
    switch (policy.kind()) {
        case PolicyKind::hard:
            return AccessDecision::enforce(policy.mechanism());
        case PolicyKind::hybrid:
            if (policy.is_free(article)) return AccessDecision::grant();
            [[fallthrough]];
        case PolicyKind::soft:
            if (state.seen_articles.count(article) || state.views_left > 0) return AccessDecision::grant();
            return AccessDecision::enforce(policy.mechanism());
    }
    return AccessDecision::enforce(policy.mechanism());
}

std::string serialize_meter_response(const MeterState& state, const std::string& tracking_id) {
    nlohmann::ordered_json meter;
    meter["meterName"] = state.meter_name;
    meter["views"] = state.views;
    meter["viewsLeft"] = state.views_left;
    meter["maxViews"] = state.max_views;
    meter["totalViews"] = state.total_views;

    nlohmann::ordered_json body;
    body["trackingId"] = tracking_id;
    body["splitTests"] = nlohmann::ordered_json::array();
    body["currentMeterName"] = state.meter_name;
    body["activeMeters"] = nlohmann::ordered_json::array({std::move(meter)});
    return body.dump(4) + "\n";
}

}  // namespace pwlab
