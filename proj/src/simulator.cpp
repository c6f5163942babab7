#include "pwlab/simulator.hpp"

#include <charconv>

#include "json_util.hpp"
#include "pwlab/errors.hpp"
#include "pwlab/render.hpp"
#include "pwlab/text.hpp"
#include "pwlab/url.hpp"

namespace pwlab {

using nlohmann::ordered_json;

std::string serialize_meter_request(const MeterRequest& r) {
    ordered_json j;
    j["aid"] = r.aid;
    j["article"] = r.article;
    j["referrer"] = r.referrer ? ordered_json(*r.referrer) : ordered_json(nullptr);
    j["adblock"] = r.adblock;
    j["profile"] = {{"locality", r.profile.locality},         {"plugins", r.profile.plugins},
                    {"fonts", r.profile.fonts},               {"screen", r.profile.screen},
                    {"user_agent", r.profile.user_agent},     {"browser_objects", r.profile.browser_objects}};
    return j.dump();
}

MeterRequest deserialize_meter_request(std::string_view bytes) {
    const auto j = jsonutil::parse(bytes);
    jsonutil::Reader r(j, "");
    MeterRequest m;
    m.aid = r.str("aid");
    m.article = static_cast<ArticleId>(r.u64("article"));
    m.referrer = r.opt_str("referrer");
    m.adblock = r.boolean("adblock");
    auto p = r.obj("profile");
    auto list = [&](std::string_view key) {
        std::vector<std::string> out;
        auto a = p.arr(key);
        for (std::size_t i = 0; i < a.size(); ++i) out.push_back(a.str_at(i));
        return out;
    };
    m.profile.locality = p.str("locality");
    m.profile.plugins = list("plugins");
    m.profile.fonts = list("fonts");
    m.profile.screen = p.str("screen");
    m.profile.user_agent = p.str("user_agent");
    m.profile.browser_objects = list("browser_objects");
    try {
        m.profile.validate();
    } catch (const ConfigError& e) {
        throw SchemaError(e.what());
    }
    return m;
}

// ---------------------------------------------------------------------------

struct Simulator::Site {
    explicit Site(SitePlan p)
        : plan(std::move(p)), meters(plan.paywalled() ? plan.policy()->max_views() : 0) {}

    SitePlan plan;
    std::mutex mu;
    MeterStore meters;
    std::map<Fingerprint, std::string> respawn_links;
    std::uint64_t cookies_issued = 0;
    std::int64_t clock = 0;
};

Simulator::Simulator(std::vector<SitePlan> plans) {
    for (auto& p : plans) {
        auto host = p.host();
        auto [it, inserted] = by_host_.emplace(host, std::make_unique<Site>(std::move(p)));
        if (!inserted) throw ConfigError("duplicate site host " + host);
    }
}

Simulator::~Simulator() = default;

const SitePlan* Simulator::plan_for_host(std::string_view host) const {
    auto it = by_host_.find(text::to_lower(host));
    return it == by_host_.end() ? nullptr : &it->second->plan;
}

std::vector<const SitePlan*> Simulator::plans() const {
    std::vector<const SitePlan*> out;
    for (const auto& [h, s] : by_host_) out.push_back(&s->plan);
    return out;
}

MeterState Simulator::meter_state(std::string_view site_id, const std::string& cookie) const {
    for (const auto& [h, s] : by_host_) {
        if (s->plan.site_id() == site_id) {
            std::lock_guard lock(s->mu);
            return s->meters.state(VisitorId::from_cookie(cookie));
        }
    }
    throw NotFound("unknown site " + std::string(site_id));
}

namespace {

HttpResponse not_found() { return HttpResponse::text(404, "text/plain", "not found\n"); }

std::optional<std::string> cookie_value(const HttpRequest& req, std::string_view name) {
    const auto header = req.header("Cookie");
    if (!header) return std::nullopt;
    for (const auto& part : text::split(*header, ';')) {
        const auto kv = text::trim(part);
        const auto eq = kv.find('=');
        if (eq != std::string::npos && kv.substr(0, eq) == name) return kv.substr(eq + 1);
    }
    return std::nullopt;
}

std::optional<ArticleId> parse_id(std::string_view s) {
    ArticleId v = 0;
    auto [p, ec] = std::from_chars(s.data(), s.data() + s.size(), v);
    if (ec != std::errc{} || p != s.data() + s.size() || s.empty()) return std::nullopt;
    return v;
}

std::optional<std::string> query_param(std::string_view query, std::string_view key) {
    for (const auto& part : text::split(query, '&')) {
        const auto eq = part.find('=');
        if (eq != std::string::npos && part.substr(0, eq) == key) return part.substr(eq + 1);
    }
    return std::nullopt;
}

HttpResponse html(const PageDocument& doc) {
    if (doc.status == 302) {
        HttpResponse r = HttpResponse::text(302, "text/html; charset=utf-8", "");
        r.headers.emplace_back("Location", *doc.location);
        return r;
    }
    return HttpResponse::text(doc.status, "text/html; charset=utf-8", doc.html);
}

}  // namespace

HttpResponse Simulator::handle(const HttpRequest& request) {
    const auto url = Url::parse(request.url);
    if (!url) return HttpResponse::text(400, "text/plain", "bad request url\n");
    auto it = by_host_.find(url->host);
    if (it == by_host_.end()) return not_found();
    return handle_site(*it->second, request);
}

HttpResponse Simulator::handle_site(Site& site, const HttpRequest& request) {
    const auto url = *Url::parse(request.url);
    const auto& plan = site.plan;
    const auto& path = url.path;

    if (request.method == "POST") {
        if (path == kMeterPath && plan.paywalled()) return handle_meter(site, request);
        return not_found();
    }
    if (request.method != "GET") return HttpResponse::text(405, "text/plain", "method not allowed\n");

    if (path == "/") return html(render_index(plan));
    if (path == kAdScriptPath) return HttpResponse::text(200, "application/javascript", render_ad_js());
    if (path == kPaywallScriptPath && plan.paywalled()) {
        return HttpResponse::text(200, "application/javascript", render_paywall_js(plan));
    }
    if (path == "/feed.xml" && plan.has_feed()) {
        return HttpResponse::text(200, "application/atom+xml", render_feed(plan));
    }
    if (path == "/subscribe") {
        std::optional<ArticleId> article;
        if (auto a = query_param(url.query, "article")) article = parse_id(*a);
        return html(render_subscribe(plan, article));
    }
    constexpr std::string_view article_prefix = "/article/";
    if (path.rfind(article_prefix, 0) == 0) {
        const auto id = parse_id(std::string_view(path).substr(article_prefix.size()));
        if (!id || *id >= plan.n_articles()) return not_found();
        RequestContext ctx{request.header("Referer")};
        auto decision = AccessDecision::grant();
        if (plan.paywalled() && !plan.policy()->client_side()) {
            const bool allowed = ctx.referrer && plan.policy()->referrer_allowed(*ctx.referrer);
            if (!allowed) decision = AccessDecision::enforce(plan.policy()->mechanism());
        }
        auto resp = html(render_article(plan, *id, decision, ctx));
        resp.headers.emplace_back("X-Access-Decision", decision.header_value());
        return resp;
    }
    return not_found();
}

HttpResponse Simulator::handle_meter(Site& site, const HttpRequest& request) {
    MeterRequest m;
    try {
        m = deserialize_meter_request(request.body);
    } catch (const Error& e) {
        return HttpResponse::text(400, "text/plain", std::string(e.what()) + "\n");
    }
    const auto& plan = site.plan;
    const auto& policy = *plan.policy();
    if (m.article >= plan.n_articles()) return not_found();

    std::lock_guard lock(site.mu);
    std::optional<std::string> set_cookie;
    auto cookie = cookie_value(request, kMeterCookie);
    if (!cookie) {
        const auto fp = compose_fingerprint(m.profile);
        auto link = policy.fingerprint_respawn() ? site.respawn_links.find(fp) : site.respawn_links.end();
        if (link != site.respawn_links.end()) {
            cookie = link->second;
        } else {
            cookie = "v" + std::to_string(++site.cookies_issued) + "." + fp.hex().substr(0, 8);
            if (policy.fingerprint_respawn()) site.respawn_links.emplace(fp, *cookie);
        }
        set_cookie = *cookie;
    }

    const auto visitor = VisitorId::from_cookie(*cookie);
    const auto& state = site.meters.register_view(visitor, m.article, ++site.clock);
    auto decision = meter_decision(state, policy, m.article);
    if (m.referrer && policy.referrer_allowed(*m.referrer)) decision = AccessDecision::grant();

    auto resp = HttpResponse::text(200, "application/json", serialize_meter_response(state, site.meters.next_tracking_id(visitor)));
    resp.headers.emplace_back("X-Access-Decision", decision.header_value());
    if (set_cookie) resp.headers.emplace_back("Set-Cookie", std::string(kMeterCookie) + "=" + *set_cookie + "; Path=/");
    return resp;
}

}  // namespace pwlab
