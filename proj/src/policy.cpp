#include "pwlab/policy.hpp"

#include <cmath>

#include "json_util.hpp"
#include "pwlab/errors.hpp"
#include "pwlab/text.hpp"
#include "pwlab/url.hpp"
#include "pwlab/version.hpp"

namespace pwlab {

using nlohmann::ordered_json;

std::string_view to_string(PolicyKind k) {
    switch (k) {
        case PolicyKind::hard: return "hard";
        case PolicyKind::soft: return "soft";
        case PolicyKind::hybrid: return "hybrid";
    }
    return "soft";
}

std::string_view to_string(Mechanism m) {
    switch (m) {
        case Mechanism::truncate: return "truncate";
        case Mechanism::obfuscate: return "obfuscate";
        case Mechanism::redirect: return "redirect";
    }
    return "truncate";
}

std::optional<PolicyKind> policy_kind_from_string(std::string_view s) {
    for (auto k : {PolicyKind::hard, PolicyKind::soft, PolicyKind::hybrid}) {
        if (to_string(k) == s) return k;
    }
    return std::nullopt;
}

std::optional<Mechanism> mechanism_from_string(std::string_view s) {
    for (auto m : {Mechanism::truncate, Mechanism::obfuscate, Mechanism::redirect}) {
        if (to_string(m) == s) return m;
    }
    return std::nullopt;
}

// ---------------------------------------------------------------------------

PaywallPolicy::PaywallPolicy(PolicyKind kind, std::uint32_t max_views, Mechanism mechanism, bool fingerprint_respawn,
                             std::vector<std::string> referrer_allowlist, std::set<ArticleId> free_article_ids)
    : kind_(kind),
      max_views_(max_views),
      mechanism_(mechanism),
      fingerprint_respawn_(fingerprint_respawn),
      referrer_allowlist_(std::move(referrer_allowlist)),
      free_article_ids_(std::move(free_article_ids)) {
    if (kind_ == PolicyKind::hard && max_views_ != 0) throw ConfigError("hard policy must have max_views == 0");
    if (kind_ == PolicyKind::soft && max_views_ < 1) throw ConfigError("soft policy needs max_views >= 1");
    if (kind_ != PolicyKind::hybrid && !free_article_ids_.empty()) {
        throw ConfigError("free_article_ids are only allowed on hybrid policies");
    }
    for (const auto& h : referrer_allowlist_) {
        if (h.empty()) throw ConfigError("referrer_allowlist: empty host");
    }
}

PaywallPolicy PaywallPolicy::hard(Mechanism m) { return PaywallPolicy(PolicyKind::hard, 0, m, false, {}); }

PaywallPolicy PaywallPolicy::soft(std::uint32_t max_views, Mechanism m, bool respawn) {
    return PaywallPolicy(PolicyKind::soft, max_views, m, respawn, {});
}

PaywallPolicy PaywallPolicy::hybrid(std::uint32_t n_articles, Mechanism m) {
    std::set<ArticleId> free;
    for (ArticleId a = 0; a < n_articles; a += kHybridFreeEvery) free.insert(a);
    return PaywallPolicy(PolicyKind::hybrid, 0, m, false, {}, std::move(free));
}

bool PaywallPolicy::referrer_allowed(std::string_view referrer) const {
    if (referrer.empty() || referrer_allowlist_.empty()) return false;
    const auto host = host_of(referrer);
    if (host.empty()) return false;
    for (const auto& allowed : referrer_allowlist_) {
        if (host_matches_domain(host, allowed)) return true;
    }
    return false;
}

PaywallPolicy PaywallPolicy::with_referrer_allowlist(std::vector<std::string> hosts) const {
    return PaywallPolicy(kind_, max_views_, mechanism_, fingerprint_respawn_, std::move(hosts), free_article_ids_);
}

std::string AccessDecision::header_value() const {
    if (granted()) return "grant";
    return "enforce; mechanism=" + std::string(to_string(*mechanism_));
}

std::optional<AccessDecision> AccessDecision::from_header(std::string_view v) {
    const auto t = text::trim(v);
    if (t == "grant") return grant();
    constexpr std::string_view prefix = "enforce; mechanism=";
    if (t.rfind(prefix, 0) == 0) {
        if (auto m = mechanism_from_string(std::string_view(t).substr(prefix.size()))) return enforce(*m);
    }
    return std::nullopt;
}

// ---------------------------------------------------------------------------

SitePlan::SitePlan(std::string site_id, std::uint32_t n_articles, std::optional<PaywallPolicy> policy,
                   bool has_feed, std::vector<std::uint32_t> article_paragraphs, bool distractor_subscribe_box)
    : site_id_(std::move(site_id)),
      n_articles_(n_articles),
      policy_(std::move(policy)),
      has_feed_(has_feed),
      article_paragraphs_(std::move(article_paragraphs)),
      distractor_(distractor_subscribe_box) {
    if (site_id_.empty()) throw ConfigError("site_id must not be empty");
    for (char c : site_id_) {
        const bool ok = (c >= 'a' && c <= 'z') || (c >= '0' && c <= '9') || c == '-';
        if (!ok) throw ConfigError("site_id '" + site_id_ + "' must be lowercase alphanumerics and '-'");
    }
    if (n_articles_ < 5) throw ConfigError("site " + site_id_ + ": n_articles must be >= 5");
    if (article_paragraphs_.size() != n_articles_) {
        throw ConfigError("site " + site_id_ + ": article_paragraphs length must equal n_articles");
    }
    for (auto p : article_paragraphs_) {
        if (p < 3) throw ConfigError("site " + site_id_ + ": every article needs >= 3 paragraphs");
    }
    if (policy_ && policy_->kind() == PolicyKind::hybrid) {
        for (auto a : policy_->free_article_ids()) {
            if (a >= n_articles_) throw ConfigError("site " + site_id_ + ": free article id out of range");
        }
    }
}

std::string SitePlan::host() const { return site_id_ + "." + std::string(kSimDomain); }
std::string SitePlan::root_url() const { return "http://" + host() + "/"; }
std::string SitePlan::article_url(ArticleId a) const { return "http://" + host() + "/article/" + std::to_string(a); }

SitePlan SitePlan::with_policy(std::optional<PaywallPolicy> policy) const {
    return SitePlan(site_id_, n_articles_, std::move(policy), has_feed_, article_paragraphs_, distractor_);
}

std::string serialize_plan(const SitePlan& plan) {
    ordered_json j;
    j["format"] = kPlanFormat;
    j["site_id"] = plan.site_id();
    j["n_articles"] = plan.n_articles();
    if (const auto& p = plan.policy()) {
        ordered_json pj;
        pj["kind"] = std::string(to_string(p->kind()));
        pj["max_views"] = p->max_views();
        pj["mechanism"] = std::string(to_string(p->mechanism()));
        pj["fingerprint_respawn"] = p->fingerprint_respawn();
        pj["referrer_allowlist"] = p->referrer_allowlist();
        pj["free_article_ids"] = std::vector<ArticleId>(p->free_article_ids().begin(), p->free_article_ids().end());
        j["policy"] = std::move(pj);
    } else {
        j["policy"] = nullptr;
    }
    j["has_feed"] = plan.has_feed();
    j["article_paragraphs"] = plan.article_paragraphs();
    j["distractor_subscribe_box"] = plan.distractor_subscribe_box();
    return j.dump(2) + "\n";
}

SitePlan deserialize_plan(std::string_view bytes) {
    const auto j = jsonutil::parse(bytes);
    jsonutil::Reader r(j, "");
    r.expect_format(kPlanFormat);
    std::optional<PaywallPolicy> policy;
    if (!r.at("policy").is_null()) {
        auto p = r.obj("policy");
        auto kind = policy_kind_from_string(p.str("kind"));
        if (!kind) throw SchemaError("policy.kind: unknown value");
        auto mech = mechanism_from_string(p.str("mechanism"));
        if (!mech) throw SchemaError("policy.mechanism: unknown value");
        std::vector<std::string> allow;
        auto a = p.arr("referrer_allowlist");
        for (std::size_t i = 0; i < a.size(); ++i) allow.push_back(a.str_at(i));
        std::set<ArticleId> free;
        auto f = p.arr("free_article_ids");
        for (std::size_t i = 0; i < f.size(); ++i) free.insert(static_cast<ArticleId>(f.i64_at(i)));
        try {
            policy.emplace(*kind, static_cast<std::uint32_t>(p.u64("max_views")), *mech, p.boolean("fingerprint_respawn"),
                           std::move(allow), std::move(free));
        } catch (const ConfigError& e) {
            throw SchemaError(std::string("policy: ") + e.what());
        }
    }
    std::vector<std::uint32_t> paragraphs;
    auto ps = r.arr("article_paragraphs");
    for (std::size_t i = 0; i < ps.size(); ++i) paragraphs.push_back(static_cast<std::uint32_t>(ps.i64_at(i)));
    try {
        return SitePlan(r.str("site_id"), static_cast<std::uint32_t>(r.u64("n_articles")), std::move(policy),
                        r.boolean("has_feed"), std::move(paragraphs), r.boolean("distractor_subscribe_box"));
    } catch (const ConfigError& e) {
        throw SchemaError(e.what());
    }
}

// ---------------------------------------------------------------------------

QuotaDistribution default_quota_distribution() {
    // Median 4; 30% of soft paywalls allow two or fewer articles.
    return {{1, 0.10}, {2, 0.20}, {3, 0.15}, {4, 0.25}, {5, 0.10}, {6, 0.08}, {8, 0.07}, {10, 0.05}};
}

namespace {

void check_shares(std::string_view what, std::initializer_list<double> shares) {
    double sum = 0.0;
    for (double s : shares) {
        if (!(s >= 0.0) || s > 1.0) throw ConfigError(std::string(what) + ": each share must lie in [0, 1]");
        sum += s;
    }
    if (std::abs(sum - 1.0) > 1e-9) {
        throw ConfigError(std::string(what) + ": shares sum to " + text::format_double(sum) + ", expected 1");
    }
}

void check_rate(std::string_view what, double r) {
    if (!(r >= 0.0 && r <= 1.0)) throw ConfigError(std::string(what) + " must lie in [0, 1]");
}

}  // namespace

void GeneratorConfig::validate() const {
    check_rate("share_paywalled", share_paywalled);
    check_shares("kind_shares", {kind_shares.soft, kind_shares.hard, kind_shares.hybrid});
    check_shares("mechanism_shares", {mechanism_shares.obfuscate, mechanism_shares.truncate, mechanism_shares.redirect});
    if (quota_distribution.empty()) throw ConfigError("quota_distribution must not be empty");
    double sum = 0.0;
    for (const auto& [q, p] : quota_distribution) {
        if (q < 1) throw ConfigError("quota_distribution: soft quotas must be >= 1");
        if (!(p >= 0.0)) throw ConfigError("quota_distribution: negative probability");
        sum += p;
    }
    if (std::abs(sum - 1.0) > 1e-9) throw ConfigError("quota_distribution: probabilities must sum to 1");
    check_rate("respawn_rate", respawn_rate);
    check_rate("referrer_allow_rate", referrer_allow_rate);
    check_rate("distractor_rate", distractor_rate);
    check_rate("feed_rate", feed_rate);
    if (referrer_allow_rate > 0.0 && referrer_hosts.empty()) {
        throw ConfigError("referrer_hosts must not be empty when referrer_allow_rate > 0");
    }
}

std::string serialize_generator_config(const GeneratorConfig& c) {
    ordered_json j;
    j["format"] = kGenConfigFormat;
    j["seed"] = c.seed;
    j["n_sites"] = c.n_sites;
    j["share_paywalled"] = c.share_paywalled;
    j["kind_shares"] = {{"soft", c.kind_shares.soft}, {"hard", c.kind_shares.hard}, {"hybrid", c.kind_shares.hybrid}};
    j["mechanism_shares"] = {{"obfuscate", c.mechanism_shares.obfuscate},
                             {"truncate", c.mechanism_shares.truncate},
                             {"redirect", c.mechanism_shares.redirect}};
    ordered_json q = ordered_json::array();
    for (const auto& [v, p] : c.quota_distribution) q.push_back(ordered_json::array({v, p}));
    j["quota_distribution"] = std::move(q);
    j["respawn_rate"] = c.respawn_rate;
    j["referrer_allow_rate"] = c.referrer_allow_rate;
    j["distractor_rate"] = c.distractor_rate;
    j["feed_rate"] = c.feed_rate;
    j["referrer_hosts"] = c.referrer_hosts;
    return j.dump(2) + "\n";
}

GeneratorConfig deserialize_generator_config(std::string_view bytes) {
    const auto j = jsonutil::parse(bytes);
    jsonutil::Reader r(j, "");
    r.expect_format(kGenConfigFormat);
    GeneratorConfig c;
    // Every field except the format tag is optional and falls back to the default.
    if (r.has("seed")) c.seed = r.u64("seed");
    if (r.has("n_sites")) c.n_sites = static_cast<std::uint32_t>(r.u64("n_sites"));
    if (r.has("share_paywalled")) c.share_paywalled = r.num("share_paywalled");
    if (r.has("kind_shares")) {
        auto k = r.obj("kind_shares");
        c.kind_shares = {k.num("soft"), k.num("hard"), k.num("hybrid")};
    }
    if (r.has("mechanism_shares")) {
        auto m = r.obj("mechanism_shares");
        c.mechanism_shares = {m.num("obfuscate"), m.num("truncate"), m.num("redirect")};
    }
    if (r.has("quota_distribution")) {
        c.quota_distribution.clear();
        auto q = r.arr("quota_distribution");
        for (std::size_t i = 0; i < q.size(); ++i) {
            const auto& pair = q.raw_at(i);
            if (!pair.is_array() || pair.size() != 2 || !pair[0].is_number_unsigned() || !pair[1].is_number()) {
                throw SchemaError(q.path_at(i) + ": expected [quota, probability]");
            }
            c.quota_distribution.emplace_back(pair[0].get<std::uint32_t>(), pair[1].get<double>());
        }
    }
    if (r.has("respawn_rate")) c.respawn_rate = r.num("respawn_rate");
    if (r.has("referrer_allow_rate")) c.referrer_allow_rate = r.num("referrer_allow_rate");
    if (r.has("distractor_rate")) c.distractor_rate = r.num("distractor_rate");
    if (r.has("feed_rate")) c.feed_rate = r.num("feed_rate");
    if (r.has("referrer_hosts")) {
        c.referrer_hosts.clear();
        auto h = r.arr("referrer_hosts");
        for (std::size_t i = 0; i < h.size(); ++i) c.referrer_hosts.push_back(h.str_at(i));
    }
    return c;
}

}  // namespace pwlab
