#pragma once

#include <unistd.h>

#include <algorithm>
#include <atomic>
#include <filesystem>
#include <string>
#include <vector>

#include "pwlab/browser.hpp"
#include "pwlab/corpus.hpp"
#include "pwlab/crawler.hpp"
#include "pwlab/http.hpp"
#include "pwlab/policy.hpp"
#include "pwlab/simulator.hpp"

namespace pwtest {

inline std::filesystem::path source_dir() { return PWLAB_SOURCE_DIR; }

/// Removed on destruction.
class TempDir {
public:
    TempDir() {
        static std::atomic<int> counter{0};
        path_ = std::filesystem::temp_directory_path() /
                ("pwlab-test-" + std::to_string(::getpid()) + "-" + std::to_string(counter++));
        std::filesystem::remove_all(path_);
        std::filesystem::create_directories(path_);
    }
    ~TempDir() {
        std::error_code ec;
        std::filesystem::remove_all(path_, ec);
    }
    TempDir(const TempDir&) = delete;
    TempDir& operator=(const TempDir&) = delete;

    const std::filesystem::path& path() const { return path_; }
    std::filesystem::path operator/(const std::string& p) const { return path_ / p; }

private:
    std::filesystem::path path_;
};

inline std::vector<std::uint32_t> paragraphs(std::uint32_t n, std::uint32_t each = 4) {
    return std::vector<std::uint32_t>(n, each);
}

inline pwlab::SitePlan free_site(std::string id, bool distractor = false, bool feed = false, std::uint32_t n = 10) {
    return pwlab::SitePlan(std::move(id), n, std::nullopt, feed, paragraphs(n), distractor);
}

inline pwlab::SitePlan soft_site(std::string id, std::uint32_t quota, pwlab::Mechanism m, bool respawn = false,
                                 std::vector<std::string> allow = {}, std::uint32_t n = 12) {
    return pwlab::SitePlan(std::move(id), n, pwlab::PaywallPolicy(pwlab::PolicyKind::soft, quota, m, respawn, std::move(allow)),
                           false, paragraphs(n), false);
}

inline pwlab::SitePlan hard_site(std::string id, pwlab::Mechanism m, std::vector<std::string> allow = {},
                                 std::uint32_t n = 10) {
    return pwlab::SitePlan(std::move(id), n, pwlab::PaywallPolicy(pwlab::PolicyKind::hard, 0, m, false, std::move(allow)),
                           false, paragraphs(n), false);
}

inline pwlab::SitePlan hybrid_site(std::string id, pwlab::Mechanism m, std::uint32_t n = 10) {
    return pwlab::SitePlan(std::move(id), n, pwlab::PaywallPolicy::hybrid(n, m), false, paragraphs(n), false);
}

/// All three crawls of one plan against a private in-process simulator.
inline pwlab::SiteCrawl crawl(const pwlab::SitePlan& plan, pwlab::Capabilities caps = {},
                              std::size_t limit = pwlab::kDefaultChildLimit) {
    pwlab::Simulator sim({plan});
    pwlab::InProcessTransport transport(sim);
    pwlab::Crawler crawler(transport, caps);
    return crawler.crawl_site(plan.site_id(), plan.root_url(), limit).with_label(plan.paywalled());
}

/// One page visit with a fresh session.
inline pwlab::PageSnapshot visit(pwlab::Simulator& sim, const std::string& url, pwlab::CrawlSession& session) {
    pwlab::InProcessTransport transport(sim);
    return pwlab::Browser(transport).visit(session, url, pwlab::CrawlKind::initial, 0);
}

/// Visits `article` in a state where the site enforces on it: soft sites
/// first spend the quota on other articles, hybrid free articles are
/// rejected by the caller, hard sites need nothing.
inline pwlab::PageSnapshot enforced_visit(const pwlab::SitePlan& plan, pwlab::ArticleId article,
                                          pwlab::Capabilities caps = {}) {
    pwlab::Simulator sim({plan});
    pwlab::InProcessTransport transport(sim);
    pwlab::Browser browser(transport);
    auto session = pwlab::fresh_session("enforce", pwlab::default_profile(), caps);
    const auto& policy = *plan.policy();
    std::uint32_t spent = 0;
    for (pwlab::ArticleId a = 0; a < plan.n_articles() && spent < policy.max_views(); ++a) {
        if (a == article || policy.is_free(a)) continue;
        browser.visit(session, plan.article_url(a), pwlab::CrawlKind::initial, 0);
        ++spent;
    }
    return browser.visit(session, plan.article_url(article), pwlab::CrawlKind::initial, 0);
}

/// Text nodes of `page` whose text is one of the article's paragraphs.
inline std::vector<pwlab::DomNode> article_text_nodes(const pwlab::PageSnapshot& page, const pwlab::SitePlan& plan,
                                                      pwlab::ArticleId article) {
    const auto paras = pwlab::article_paragraphs(plan, article);
    std::vector<pwlab::DomNode> out;
    for (const auto& n : page.nodes()) {
        if (n.is_text() && std::find(paras.begin(), paras.end(), *n.text) != paras.end()) out.push_back(n);
    }
    return out;
}

/// The three enforcement outcomes, defined so that at most one holds.
struct Enforcement {
    bool under_overlay = false;  // article text present, every piece covered by a z-index > 0 node
    bool truncated = false;      // some article text visible and uncovered, strictly less than the full text
    bool redirected = false;     // final URL changed and no article text at all
};

inline Enforcement classify(const pwlab::PageSnapshot& page, const pwlab::SitePlan& plan, pwlab::ArticleId article) {
    const auto nodes = article_text_nodes(page, plan, article);
    const auto paras = pwlab::article_paragraphs(plan, article);
    Enforcement e;
    bool all_covered = !nodes.empty();
    bool any_covered = false;
    for (const auto& n : nodes) {
        const bool covered = n.obscured_by && page.find(*n.obscured_by)->z_index > 0;
        all_covered = all_covered && covered;
        any_covered = any_covered || covered;
    }
    e.under_overlay = all_covered;
    e.truncated = !nodes.empty() && !any_covered && nodes.size() < paras.size();
    e.redirected = nodes.empty() && page.final_url() != page.url();
    return e;
}

}  // namespace pwtest
