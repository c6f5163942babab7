#pragma once

// HTML, feed and script bodies served by the publisher simulator.

#include <optional>
#include <string>

#include "pwlab/policy.hpp"

namespace pwlab {

struct RequestContext {
    std::optional<std::string> referrer;
};

struct PageDocument {
    int status = 200;
    std::string html;
    std::optional<std::string> location;  // set for 302 responses
};

std::string site_name(const SitePlan& plan);

PageDocument render_index(const SitePlan& plan);

/// Article page. The decision is applied here only for server-side (hard)
/// policies: truncate keeps the first paragraph plus an inline prompt,
/// obfuscate keeps the first paragraph under a fixed overlay, redirect
/// answers 302 to the subscribe page. Soft and hybrid pages always carry
/// the full text and the /paywall.js reference. Throws NotFound for a bad id.
PageDocument render_article(const SitePlan& plan, ArticleId article, const AccessDecision& decision,
                            const RequestContext& context);

PageDocument render_subscribe(const SitePlan& plan, std::optional<ArticleId> article);

/// Atom feed listing every article.
std::string render_feed(const SitePlan& plan);

/// The paywall library: a bootstrap object the client model reads.
std::string render_paywall_js(const SitePlan& plan);
std::string render_ad_js();

/// Markup the paywall library injects (and hard pages embed) on enforcement.
std::string inline_prompt_html(ArticleId article);
std::string overlay_prompt_html(ArticleId article);

std::string subscribe_path(ArticleId article);
inline constexpr const char* kMeterPath = "/xbuilder/experience/execute";
inline constexpr const char* kPaywallScriptPath = "/paywall.js";
inline constexpr const char* kAdScriptPath = "/ads/ad.js";

}  // namespace pwlab
