#pragma once

// Paywall bypass strategies as session transformations, and the harness
// that measures which strategies defeat which sites.

#include <cstdint>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

#include "pwlab/browser.hpp"
#include "pwlab/policy.hpp"

namespace pwlab {

enum class StrategyKind {
    screen_resize,
    new_ip,
    new_user_agent,
    ad_blocker,
    reader_mode,
    fetch_service,
    incognito,
    clear_cookies,
    block_paywall_library,
    referrer_spoof,
};

struct BypassStrategy {
    StrategyKind kind;
    std::vector<std::string> patterns;  // ad_blocker, block_paywall_library
    std::string referrer;               // referrer_spoof

    static BypassStrategy screen_resize() { return {StrategyKind::screen_resize, {}, {}}; }
    static BypassStrategy new_ip() { return {StrategyKind::new_ip, {}, {}}; }
    static BypassStrategy new_user_agent() { return {StrategyKind::new_user_agent, {}, {}}; }
    static BypassStrategy ad_blocker(std::vector<std::string> patterns = {"/ads/", "||doubleclick.net^"});
    static BypassStrategy reader_mode() { return {StrategyKind::reader_mode, {}, {}}; }
    static BypassStrategy fetch_service() { return {StrategyKind::fetch_service, {}, {}}; }
    static BypassStrategy incognito() { return {StrategyKind::incognito, {}, {}}; }
    static BypassStrategy clear_cookies() { return {StrategyKind::clear_cookies, {}, {}}; }
    static BypassStrategy block_paywall_library(std::vector<std::string> patterns = {"/paywall.js"});
    static BypassStrategy referrer_spoof(std::string referrer = "https://www.google.com/");

    /// Throws ConfigError when a pattern-carrying strategy has no patterns.
    void validate() const;
    std::string name() const;

    friend bool operator==(const BypassStrategy&, const BypassStrategy&) = default;
};

/// The nine standard strategies, in display order.
std::vector<BypassStrategy> standard_strategies();
/// Standard nine plus referrer spoofing.
std::vector<BypassStrategy> all_strategies();
std::optional<BypassStrategy> strategy_from_name(std::string_view name);

/// Pure: returns the transformed session.
CrawlSession apply_strategy(const CrawlSession& session, const BypassStrategy& strategy);

enum class BypassOutcome { success, failure, never_triggered };
std::string_view to_string(BypassOutcome o);

struct BypassResult {
    BypassOutcome outcome = BypassOutcome::failure;
    std::optional<ArticleId> triggered_at;  // article where enforcement was first seen
    std::optional<ArticleId> target;        // article requested after the strategy
};

/// Against a fresh simulator for the site: browse articles in order until
/// one is not fully readable, apply the strategy, request the next locked
/// article nobody has asked for yet (or the enforced one again), and
/// compare its readable main text to the full text. Throws ConfigError for
/// a non-paywalled plan.
BypassResult evaluate_bypass(const SitePlan& plan, const BypassStrategy& strategy);

struct StrategyRates {
    std::string strategy;
    std::size_t soft_success = 0, soft_total = 0;
    std::size_t hard_success = 0, hard_total = 0;
    std::size_t hybrid_success = 0, hybrid_total = 0;
    std::size_t never_triggered = 0;

    double soft_rate() const;
    double hard_rate() const;
    double hybrid_rate() const;
    double overall_rate() const;
};

struct BypassCell {
    std::string site_id;
    PolicyKind kind;
    std::string strategy;
    BypassResult result;
};

struct BypassReport {
    std::vector<BypassCell> cells;  // site-major, strategy order within a site
    std::vector<StrategyRates> rates;
};

/// Evaluates every paywalled site against every strategy. Result does not
/// depend on `jobs`.
BypassReport bypass_matrix(const std::vector<SitePlan>& plans, const std::vector<BypassStrategy>& strategies,
                           unsigned jobs = 1);

std::string serialize_bypass_report(const BypassReport& r, std::uint64_t seed);
std::string bypass_table(const BypassReport& r);

}  // namespace pwlab
