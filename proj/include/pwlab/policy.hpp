#pragma once

// Paywall policy, site plan and corpus-generator configuration types.

#include <cstdint>
#include <optional>
#include <set>
#include <string>
#include <string_view>
#include <utility>
#include <vector>

namespace pwlab {

using ArticleId = std::uint32_t;

enum class PolicyKind { hard, soft, hybrid };
enum class Mechanism { truncate, obfuscate, redirect };

std::string_view to_string(PolicyKind k);
std::string_view to_string(Mechanism m);
std::optional<PolicyKind> policy_kind_from_string(std::string_view s);
std::optional<Mechanism> mechanism_from_string(std::string_view s);

/// Every k-th article (id % k == 0) of a hybrid site is free.
inline constexpr ArticleId kHybridFreeEvery = 3;

class PaywallPolicy {
public:
    /// Throws ConfigError when the kind/quota/free-set combination is
    /// inconsistent.
    PaywallPolicy(PolicyKind kind, std::uint32_t max_views, Mechanism mechanism, bool fingerprint_respawn,
                  std::vector<std::string> referrer_allowlist, std::set<ArticleId> free_article_ids = {});

    static PaywallPolicy hard(Mechanism m);
    static PaywallPolicy soft(std::uint32_t max_views, Mechanism m, bool respawn = false);
    static PaywallPolicy hybrid(std::uint32_t n_articles, Mechanism m);

    PolicyKind kind() const { return kind_; }
    std::uint32_t max_views() const { return max_views_; }
    Mechanism mechanism() const { return mechanism_; }
    bool fingerprint_respawn() const { return fingerprint_respawn_; }
    const std::vector<std::string>& referrer_allowlist() const { return referrer_allowlist_; }
    const std::set<ArticleId>& free_article_ids() const { return free_article_ids_; }

    bool is_free(ArticleId a) const { return free_article_ids_.count(a) != 0; }
    /// Enforcement runs in the client script (soft, hybrid) rather than on
    /// the server (hard).
    bool client_side() const { return kind_ != PolicyKind::hard; }
    /// True when `referrer` is an absolute URL whose host is on the allowlist.
    bool referrer_allowed(std::string_view referrer) const;

    PaywallPolicy with_referrer_allowlist(std::vector<std::string> hosts) const;

    friend bool operator==(const PaywallPolicy&, const PaywallPolicy&) = default;

private:
    PolicyKind kind_;
    std::uint32_t max_views_;
    Mechanism mechanism_;
    bool fingerprint_respawn_;
    std::vector<std::string> referrer_allowlist_;
    std::set<ArticleId> free_article_ids_;
};

/// Outcome of the access check for one article view.
class AccessDecision {
public:
    static AccessDecision grant() { return AccessDecision(std::nullopt); }
    static AccessDecision enforce(Mechanism m) { return AccessDecision(m); }

    bool granted() const { return !mechanism_; }
    /// The enforcement mechanism; only valid when !granted().
    Mechanism mechanism() const { return *mechanism_; }

    /// "grant" or "enforce; mechanism=<m>" (the X-Access-Decision header).
    std::string header_value() const;
    static std::optional<AccessDecision> from_header(std::string_view v);

    friend bool operator==(const AccessDecision&, const AccessDecision&) = default;

private:
    explicit AccessDecision(std::optional<Mechanism> m) : mechanism_(m) {}
    std::optional<Mechanism> mechanism_;
};

class SitePlan {
public:
    SitePlan(std::string site_id, std::uint32_t n_articles, std::optional<PaywallPolicy> policy, bool has_feed,
             std::vector<std::uint32_t> article_paragraphs, bool distractor_subscribe_box);

    const std::string& site_id() const { return site_id_; }
    std::uint32_t n_articles() const { return n_articles_; }
    const std::optional<PaywallPolicy>& policy() const { return policy_; }
    bool paywalled() const { return policy_.has_value(); }
    bool has_feed() const { return has_feed_; }
    const std::vector<std::uint32_t>& article_paragraphs() const { return article_paragraphs_; }
    bool distractor_subscribe_box() const { return distractor_; }

    /// Host the simulator serves this site under.
    std::string host() const;
    std::string root_url() const;
    std::string article_url(ArticleId a) const;

    SitePlan with_policy(std::optional<PaywallPolicy> policy) const;

    friend bool operator==(const SitePlan&, const SitePlan&) = default;

private:
    std::string site_id_;
    std::uint32_t n_articles_;
    std::optional<PaywallPolicy> policy_;
    bool has_feed_;
    std::vector<std::uint32_t> article_paragraphs_;
    bool distractor_;
};

inline constexpr std::string_view kSimDomain = "sim.test";

std::string serialize_plan(const SitePlan& plan);
SitePlan deserialize_plan(std::string_view bytes);

struct KindShares {
    double soft = 0.667 / 0.99;
    double hard = 0.157 / 0.99;
    double hybrid = 0.166 / 0.99;
};

struct MechanismShares {
    double obfuscate = 0.482;
    double truncate = 0.445;
    double redirect = 0.073;
};

/// Discrete distribution of the soft-paywall free-article quota:
/// (quota, probability) pairs.
using QuotaDistribution = std::vector<std::pair<std::uint32_t, double>>;

QuotaDistribution default_quota_distribution();

struct GeneratorConfig {
    std::uint64_t seed = 42;
    std::uint32_t n_sites = 200;
    double share_paywalled = 0.5;
    KindShares kind_shares;
    MechanismShares mechanism_shares;
    QuotaDistribution quota_distribution = default_quota_distribution();
    double respawn_rate = 0.25;
    double referrer_allow_rate = 0.25;
    double distractor_rate = 0.5;
    double feed_rate = 0.5;
    std::vector<std::string> referrer_hosts = {"www.google.com", "t.co", "www.facebook.com"};

    /// Throws ConfigError on shares that do not sum to 1 +- 1e-9, rates
    /// outside [0,1], or an empty/zero quota distribution.
    void validate() const;
};

std::string serialize_generator_config(const GeneratorConfig& cfg);
GeneratorConfig deserialize_generator_config(std::string_view bytes);

}  // namespace pwlab
