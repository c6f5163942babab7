#include "pwlab/circumvention.hpp"

#include <algorithm>
#include <cstdio>
#include <exception>
#include <mutex>
#include <thread>

#include "json.hpp"
#include "pwlab/corpus.hpp"
#include "pwlab/errors.hpp"
#include "pwlab/readermode.hpp"
#include "pwlab/simulator.hpp"
#include "pwlab/version.hpp"

namespace pwlab {

BypassStrategy BypassStrategy::ad_blocker(std::vector<std::string> patterns) {
    return {StrategyKind::ad_blocker, std::move(patterns), {}};
}

BypassStrategy BypassStrategy::block_paywall_library(std::vector<std::string> patterns) {
    return {StrategyKind::block_paywall_library, std::move(patterns), {}};
}

BypassStrategy BypassStrategy::referrer_spoof(std::string referrer) {
    return {StrategyKind::referrer_spoof, {}, std::move(referrer)};
}

void BypassStrategy::validate() const {
    const bool needs_patterns = kind == StrategyKind::ad_blocker || kind == StrategyKind::block_paywall_library;
    if (needs_patterns && patterns.empty()) throw ConfigError(name() + " needs at least one pattern");
    if (kind == StrategyKind::referrer_spoof && referrer.empty()) throw ConfigError("referrer_spoof needs a referrer");
}

std::string BypassStrategy::name() const {
    switch (kind) {
        case StrategyKind::screen_resize: return "ScreenResize";
        case StrategyKind::new_ip: return "NewIP";
        case StrategyKind::new_user_agent: return "NewUserAgent";
        case StrategyKind::ad_blocker: return "AdBlocker";
        case StrategyKind::reader_mode: return "ReaderMode";
        case StrategyKind::fetch_service: return "FetchService";
        case StrategyKind::incognito: return "Incognito";
        case StrategyKind::clear_cookies: return "ClearCookies";
        case StrategyKind::block_paywall_library: return "BlockPaywallLibrary";
        case StrategyKind::referrer_spoof: return "ReferrerSpoof";
    }
    return "?";
}

std::vector<BypassStrategy> standard_strategies() {
    return {BypassStrategy::screen_resize(),  BypassStrategy::new_ip(),        BypassStrategy::new_user_agent(),
            BypassStrategy::ad_blocker(),     BypassStrategy::reader_mode(),   BypassStrategy::fetch_service(),
            BypassStrategy::incognito(),      BypassStrategy::clear_cookies(), BypassStrategy::block_paywall_library()};
}

std::vector<BypassStrategy> all_strategies() {
    auto s = standard_strategies();
    s.push_back(BypassStrategy::referrer_spoof());
    return s;
}

std::optional<BypassStrategy> strategy_from_name(std::string_view name) {
    for (auto& s : all_strategies()) {
        if (s.name() == name) return s;
    }
    return std::nullopt;
}

namespace {

void add_patterns(std::vector<std::string>& into, const std::vector<std::string>& extra) {
    for (const auto& p : extra) {
        if (std::find(into.begin(), into.end(), p) == into.end()) into.push_back(p);
    }
}

}  // namespace

CrawlSession apply_strategy(const CrawlSession& session, const BypassStrategy& strategy) {
    strategy.validate();
    auto s = session;
    switch (strategy.kind) {
        case StrategyKind::screen_resize:
            s.profile.screen = s.profile.screen == "1024x768@0,0" ? "1366x768@0,0" : "1024x768@0,0";
            break;
        case StrategyKind::new_ip:
            s.transport_ip = s.transport_ip == "203.0.113.77" ? "203.0.113.78" : "203.0.113.77";
            break;
        case StrategyKind::new_user_agent: {
            const std::string alt = "Mozilla/5.0 (X11; Linux x86_64; rv:64.0) Gecko/20100101 Firefox/64.0";
            s.profile.user_agent = s.profile.user_agent == alt
                                       ? "Mozilla/5.0 (Macintosh; Intel Mac OS X 10_14) AppleWebKit/605.1.15 Safari/605.1.15"
                                       : alt;
            break;
        }
        case StrategyKind::ad_blocker:
        case StrategyKind::block_paywall_library:
            add_patterns(s.capabilities.blocked_url_patterns, strategy.patterns);
            break;
        case StrategyKind::reader_mode:
            s.capabilities.reader_mode = true;
            break;
        case StrategyKind::fetch_service:
            s.capabilities.fetch_service = true;
            break;
        case StrategyKind::incognito:
        case StrategyKind::clear_cookies:
            s.cookie_jar.clear();
            s.profile.cookie.reset();
            break;
        case StrategyKind::referrer_spoof:
            s.capabilities.referrer_override = strategy.referrer;
            break;
    }
    return s;
}

std::string_view to_string(BypassOutcome o) {
    switch (o) {
        case BypassOutcome::success: return "success";
        case BypassOutcome::failure: return "failure";
        case BypassOutcome::never_triggered: return "never_triggered";
    }
    return "failure";
}

BypassResult evaluate_bypass(const SitePlan& plan, const BypassStrategy& strategy) {
    if (!plan.paywalled()) throw ConfigError("site " + plan.site_id() + " has no paywall to bypass");
    Simulator sim({plan});
    InProcessTransport transport(sim);
    Browser browser(transport);
    auto session = fresh_session("bypass-" + plan.site_id());
    Timestamp clock = 0;

    auto readable = [&](CrawlSession& s, ArticleId a) {
        try {
            const auto page = browser.visit(s, plan.article_url(a), CrawlKind::cookiejar, ++clock);
            return readable_main_text(page) == full_article_text(plan, a);
        } catch (const FetchError&) {
            return false;
        }
    };

    BypassResult result;
    for (ArticleId a = 0; a < plan.n_articles(); ++a) {
        if (!readable(session, a)) {
            result.triggered_at = a;
            break;
        }
    }
    if (!result.triggered_at) {
        result.outcome = BypassOutcome::never_triggered;
        return result;
    }

    const auto& policy = *plan.policy();
    ArticleId target = *result.triggered_at;
    for (ArticleId b = target + 1; b < plan.n_articles(); ++b) {
        if (!policy.is_free(b)) {
            target = b;
            break;
        }
    }
    result.target = target;
    auto after = apply_strategy(session, strategy);
    result.outcome = readable(after, target) ? BypassOutcome::success : BypassOutcome::failure;
    return result;
}

// ---------------------------------------------------------------------------

namespace {

double rate(std::size_t s, std::size_t t) { return t ? static_cast<double>(s) / static_cast<double>(t) : 0.0; }

}  // namespace

double StrategyRates::soft_rate() const { return rate(soft_success, soft_total); }
double StrategyRates::hard_rate() const { return rate(hard_success, hard_total); }
double StrategyRates::hybrid_rate() const { return rate(hybrid_success, hybrid_total); }
double StrategyRates::overall_rate() const {
    return rate(soft_success + hard_success + hybrid_success, soft_total + hard_total + hybrid_total);
}

BypassReport bypass_matrix(const std::vector<SitePlan>& plans, const std::vector<BypassStrategy>& strategies,
                           unsigned jobs) {
    for (const auto& s : strategies) s.validate();
    std::vector<const SitePlan*> sites;
    for (const auto& p : plans) {
        if (p.paywalled()) sites.push_back(&p);
    }
    BypassReport report;
    report.cells.resize(sites.size() * strategies.size());
    auto work = [&](std::size_t cell) {
        const auto& plan = *sites[cell / strategies.size()];
        const auto& strategy = strategies[cell % strategies.size()];
        report.cells[cell] = {plan.site_id(), plan.policy()->kind(), strategy.name(), evaluate_bypass(plan, strategy)};
    };
    const auto total = report.cells.size();
    jobs = std::max(1u, jobs);
    if (jobs == 1 || total < 2) {
        for (std::size_t c = 0; c < total; ++c) work(c);
    } else {
        std::vector<std::thread> threads;
        std::exception_ptr failure;
        std::mutex mu;
        for (unsigned w = 0; w < jobs; ++w) {
            threads.emplace_back([&, w] {
                try {
                    for (std::size_t c = w; c < total; c += jobs) work(c);
                } catch (...) {
                    std::lock_guard lock(mu);
                    if (!failure) failure = std::current_exception();
                }
            });
        }
        for (auto& t : threads) t.join();
        if (failure) std::rethrow_exception(failure);
    }

    for (const auto& s : strategies) report.rates.push_back({s.name()});
    for (std::size_t c = 0; c < total; ++c) {
        const auto& cell = report.cells[c];
        auto& r = report.rates[c % strategies.size()];
        if (cell.result.outcome == BypassOutcome::never_triggered) {
            ++r.never_triggered;
            continue;
        }
        const std::size_t win = cell.result.outcome == BypassOutcome::success ? 1 : 0;
        switch (cell.kind) {
            case PolicyKind::soft: r.soft_success += win; ++r.soft_total; break;
            case PolicyKind::hard: r.hard_success += win; ++r.hard_total; break;
            case PolicyKind::hybrid: r.hybrid_success += win; ++r.hybrid_total; break;
        }
    }
    return report;
}

std::string serialize_bypass_report(const BypassReport& r, std::uint64_t seed) {
    using nlohmann::ordered_json;
    ordered_json j;
    j["format"] = kBypassFormat;
    j["tool_version"] = kToolVersion;
    j["seed"] = seed;
    auto rates = ordered_json::array();
    for (const auto& s : r.rates) {
        ordered_json sj;
        sj["strategy"] = s.strategy;
        sj["soft"] = {{"success", s.soft_success}, {"total", s.soft_total}, {"rate", s.soft_rate()}};
        sj["hard"] = {{"success", s.hard_success}, {"total", s.hard_total}, {"rate", s.hard_rate()}};
        sj["hybrid"] = {{"success", s.hybrid_success}, {"total", s.hybrid_total}, {"rate", s.hybrid_rate()}};
        sj["overall_rate"] = s.overall_rate();
        sj["never_triggered"] = s.never_triggered;
        rates.push_back(std::move(sj));
    }
    j["strategies"] = std::move(rates);
    auto cells = ordered_json::array();
    for (const auto& c : r.cells) {
        ordered_json cj;
        cj["site_id"] = c.site_id;
        cj["kind"] = std::string(to_string(c.kind));
        cj["strategy"] = c.strategy;
        cj["outcome"] = std::string(to_string(c.result.outcome));
        cj["triggered_at"] = c.result.triggered_at ? ordered_json(*c.result.triggered_at) : ordered_json(nullptr);
        cj["target"] = c.result.target ? ordered_json(*c.result.target) : ordered_json(nullptr);
        cells.push_back(std::move(cj));
    }
    j["cells"] = std::move(cells);
    return j.dump(2) + "\n";
}

std::string bypass_table(const BypassReport& r) {
    std::string out = "Strategy               soft     hard     hybrid   overall  untriggered\n";
    char buf[160];
    for (const auto& s : r.rates) {
        std::snprintf(buf, sizeof buf, "%-20s  %6.1f%%  %6.1f%%  %6.1f%%  %6.1f%%  %zu\n", s.strategy.c_str(),
                      100 * s.soft_rate(), 100 * s.hard_rate(), 100 * s.hybrid_rate(), 100 * s.overall_rate(),
                      s.never_triggered);
        out += buf;
    }
    return out;
}

}  // namespace pwlab
