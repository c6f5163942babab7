#include "pwlab/render.hpp"

#include "pwlab/corpus.hpp"
#include "pwlab/errors.hpp"
#include "pwlab/murmur3.hpp"

namespace pwlab {

namespace {

std::string escape(std::string_view s) {
    std::string out;
    out.reserve(s.size());
    for (char c : s) {
        switch (c) {
            case '&': out += "&amp;"; break;
            case '<': out += "&lt;"; break;
            case '>': out += "&gt;"; break;
            case '"': out += "&quot;"; break;
            default: out.push_back(c);
        }
    }
    return out;
}

std::string distractor_html(const SitePlan& plan) {
    const bool signup = murmur3_x64_128(plan.site_id(), 11).high & 1;
    std::string h = "<aside class=\"newsletter\"><h2>Newsletter</h2><p>";
    h += signup ? "Sign up for our weekly newsletter and never miss a story."
                : "Subscribe to our newsletter for the best stories of the week.";
    h += "</p></aside>\n";
    return h;
}

std::string page(const SitePlan& plan, const std::string& title, const std::string& main_html) {
    std::string h = "<!DOCTYPE html>\n<html lang=\"en\">\n<head>\n<meta charset=\"utf-8\">\n<title>";
    h += escape(title) + " | " + escape(site_name(plan)) + "</title>\n";
    if (plan.has_feed()) h += "<link rel=\"alternate\" type=\"application/atom+xml\" href=\"/feed.xml\">\n";
    h += "<script src=\"" + std::string(kAdScriptPath) + "\"></script>\n";
    if (plan.paywalled()) h += "<script src=\"" + std::string(kPaywallScriptPath) + "\"></script>\n";
    h += "</head>\n<body>\n<header class=\"masthead\"><nav><a href=\"/\">Home</a> <a href=\"/news\">News</a> "
         "<a href=\"/culture\">Culture</a>";
    if (plan.paywalled()) h += " <a href=\"/subscribe\">Subscribe</a>";
    h += "</nav></header>\n<main>\n" + main_html;
    if (plan.distractor_subscribe_box()) h += distractor_html(plan);
    h += "</main>\n<footer><p>" + escape(site_name(plan)) +
         " | <a href=\"/contact\">Contact</a> | <a href=\"/privacy\">Privacy</a></p></footer>\n</body>\n</html>\n";
    return h;
}

}  // namespace

std::string site_name(const SitePlan& plan) { return "The " + plan.site_id() + " Courier"; }

std::string subscribe_path(ArticleId article) { return "/subscribe?article=" + std::to_string(article); }

std::string inline_prompt_html(ArticleId article) {
    return "<section class=\"pw-inline\"><p>Subscribe to continue reading. You have 0 free articles remaining.</p>"
           "<p><a href=\"" +
           subscribe_path(article) + "\">Subscribe now</a></p></section>\n";
}

std::string overlay_prompt_html(ArticleId article) {
    return "<div class=\"pw-overlay\" style=\"position:fixed;z-index:1000\"><div class=\"pw-prompt\">"
           "<h2>Subscribe to continue reading</h2><p>You have 0 free articles remaining.</p>"
           "<p><a href=\"" +
           subscribe_path(article) + "\">Subscribe now</a></p></div></div>\n";
}

PageDocument render_index(const SitePlan& plan) {
    std::string m = "<h1>Latest stories</h1>\n<ul class=\"stories\">\n";
    for (ArticleId a = 0; a < plan.n_articles(); ++a) {
        m += "<li><a href=\"/article/" + std::to_string(a) + "\">" + escape(article_title(plan, a)) + "</a></li>\n";
    }
    m += "</ul>\n";
    return {200, page(plan, "Latest stories", m), std::nullopt};
}

PageDocument render_article(const SitePlan& plan, ArticleId article, const AccessDecision& decision,
                            const RequestContext&) {
    if (article >= plan.n_articles()) {
        throw NotFound("article " + std::to_string(article) + " of " + plan.site_id());
    }
    const bool server_side = plan.paywalled() && !plan.policy()->client_side();
    const bool enforce = server_side && !decision.granted();
    if (enforce && decision.mechanism() == Mechanism::redirect) {
        return {302, "", "http://" + plan.host() + subscribe_path(article)};
    }

    const auto title = article_title(plan, article);
    const auto paragraphs = article_paragraphs(plan, article);
    std::string m = "<header class=\"headline\"><h1>" + escape(title) + "</h1><p class=\"byline\">By the " +
                    escape(site_name(plan)) + " desk</p></header>\n";
    m += "<article data-article=\"" + std::to_string(article) + "\"";
    if (enforce) m += " data-paywall=\"enforced\"";
    m += ">\n";
    const std::size_t shown = enforce ? 1 : paragraphs.size();
    for (std::size_t i = 0; i < shown; ++i) m += "<p>" + escape(paragraphs[i]) + "</p>\n";
    m += "</article>\n";
    if (enforce) {
        m += decision.mechanism() == Mechanism::truncate ? inline_prompt_html(article) : overlay_prompt_html(article);
    }
    return {200, page(plan, title, m), std::nullopt};
}

PageDocument render_subscribe(const SitePlan& plan, std::optional<ArticleId>) {
    std::string m =
        "<h1>Subscribe</h1>\n<section class=\"offer\"><p>Subscribe for unlimited digital access.</p>"
        "<p>Sign up in a minute, cancel at any time.</p>"
        "<form method=\"post\" action=\"/checkout\"><input type=\"email\" name=\"email\">"
        "<button type=\"submit\">Continue</button></form></section>\n";
    return {200, page(plan, "Subscribe", m), std::nullopt};
}

std::string render_feed(const SitePlan& plan) {
    std::string f = "<?xml version=\"1.0\" encoding=\"utf-8\"?>\n<feed xmlns=\"http://www.w3.org/2005/Atom\">\n";
    f += "<title>" + escape(site_name(plan)) + "</title>\n<id>" + plan.root_url() + "</id>\n<link href=\"" +
         plan.root_url() + "\"/>\n<updated>2019-01-01T00:00:00Z</updated>\n";
    for (ArticleId a = 0; a < plan.n_articles(); ++a) {
        f += "<entry><title>" + escape(article_title(plan, a)) + "</title><id>" + plan.article_url(a) +
             "</id><link href=\"" + plan.article_url(a) + "\"/><updated>2019-01-01T00:00:00Z</updated></entry>\n";
    }
    f += "</feed>\n";
    return f;
}

std::string render_paywall_js(const SitePlan& plan) {
    const auto token = murmur3_x64_128(plan.site_id(), 7).hex();
    return "/* paywall client */\nwindow.__pwBootstrap = {\"aid\":\"" + plan.site_id() + "\",\"endpoint\":\"" +
           kMeterPath + "?aid=" + plan.site_id() + "\",\"token\":\"" + token +
           "\"};\n(function(){var b=window.__pwBootstrap;if(!b)return;/* meter request + enforcement */})();\n";
}

std::string render_ad_js() { return "/* ad slot */\n(function(){})();\n"; }

}  // namespace pwlab
