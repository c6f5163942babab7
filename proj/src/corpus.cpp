#include "pwlab/corpus.hpp"

#include <algorithm>
#include <array>
#include <cmath>
#include <numeric>

#include "io.hpp"
#include "pwlab/errors.hpp"
#include "pwlab/murmur3.hpp"
#include "pwlab/rng.hpp"
#include "pwlab/text.hpp"
#include "pwlab/version.hpp"

namespace pwlab {

const SitePlan* Corpus::find(std::string_view site_id) const {
    for (const auto& p : plans) {
        if (p.site_id() == site_id) return &p;
    }
    return nullptr;
}

std::vector<std::size_t> largest_remainder(std::size_t n, std::span<const double> shares) {
    std::vector<std::size_t> counts(shares.size(), 0);
    std::vector<double> remainders(shares.size(), 0.0);
    std::size_t assigned = 0;
    for (std::size_t i = 0; i < shares.size(); ++i) {
        const double quota = static_cast<double>(n) * shares[i];
        counts[i] = static_cast<std::size_t>(std::floor(quota));
        remainders[i] = quota - static_cast<double>(counts[i]);
        assigned += counts[i];
    }
    std::vector<std::size_t> order(shares.size());
    std::iota(order.begin(), order.end(), 0);
    std::stable_sort(order.begin(), order.end(),
                     [&](std::size_t a, std::size_t b) { return remainders[a] > remainders[b]; });
    for (std::size_t k = 0; assigned < n && !order.empty(); ++k, ++assigned) counts[order[k % order.size()]]++;
    // Floating error can overshoot by one when shares sum slightly above 1.
    while (assigned > n) {
        auto it = std::max_element(counts.begin(), counts.end());
        --*it;
        --assigned;
    }
    return counts;
}

namespace {

/// A list with counts[i] copies of values[i], shuffled.
template <class T>
std::vector<T> deal(Rng& rng, const std::vector<T>& values, const std::vector<std::size_t>& counts) {
    std::vector<T> out;
    for (std::size_t i = 0; i < values.size(); ++i) out.insert(out.end(), counts[i], values[i]);
    rng.shuffle(out);
    return out;
}

std::vector<bool> deal_flags(Rng& rng, std::size_t n, double rate) {
    const std::array<double, 2> shares{rate, 1.0 - rate};
    return deal<bool>(rng, {true, false}, largest_remainder(n, shares));
}

// Neutral filler vocabulary. No word ends in "sign", starts with "up" or
// contains "subscri"/"remain", so generated prose never matches the
// default lexicon.
constexpr std::array<const char*, 96> kWords = {
    "city",     "council",  "river",    "bridge",   "harbor",   "market",   "season",   "report",
    "budget",   "school",   "teacher",  "student",  "garden",   "museum",   "festival", "weather",
    "storm",    "coast",    "valley",   "mountain", "village",  "railway",  "station",  "airport",
    "project",  "engineer", "planning", "housing",  "street",   "traffic",  "cycling",  "transit",
    "library",  "archive",  "history",  "science",  "research", "climate",  "energy",   "solar",
    "wind",     "water",    "forest",   "farm",     "harvest",  "orchard",  "coffee",   "bakery",
    "kitchen",  "recipe",   "music",    "theater",  "concert",  "gallery",  "painter",  "novel",
    "author",   "reader",   "editor",   "camera",   "film",     "stadium",  "league",   "coach",
    "player",   "match",    "victory",  "record",   "evening",  "morning",  "weekend",  "holiday",
    "travel",   "journey",  "island",   "ferry",    "lighthouse", "canal",  "square",   "tower",
    "local",    "regional", "national", "quiet",    "busy",     "bright",   "early",    "late",
    "new",      "old",      "green",    "northern", "southern", "central",  "annual",   "public"};

constexpr std::array<const char*, 16> kVerbs = {
    "opened", "reviewed", "welcomed", "described", "announced", "planned", "visited", "measured",
    "restored", "shared", "expanded", "explored", "recorded", "hosted", "improved", "studied"};

std::uint64_t text_seed(const SitePlan& plan, ArticleId article, std::uint64_t salt) {
    const auto h = murmur3_x64_128(plan.site_id(), article);
    return derive_stream_seed(h.high ^ h.low, salt);
}

std::string sentence(Rng& rng) {
    const auto n_words = static_cast<std::size_t>(rng.between(8, 14));
    std::string s;
    for (std::size_t i = 0; i < n_words; ++i) {
        if (i) s.push_back(' ');
        if (i == 3) {
            s += kVerbs[rng.below(kVerbs.size())];
        } else {
            s += kWords[rng.below(kWords.size())];
        }
    }
    s[0] = static_cast<char>(s[0] - 'a' + 'A');
    s.push_back('.');
    return s;
}

}  // namespace

std::string article_title(const SitePlan& plan, ArticleId article) {
    Rng rng(text_seed(plan, article, 0));
    const auto n = static_cast<std::size_t>(rng.between(4, 7));
    std::string t;
    for (std::size_t i = 0; i < n; ++i) {
        if (i) t.push_back(' ');
        std::string w = kWords[rng.below(kWords.size())];
        w[0] = static_cast<char>(w[0] - 'a' + 'A');
        t += w;
    }
    return t;
}

std::vector<std::string> article_paragraphs(const SitePlan& plan, ArticleId article) {
    if (article >= plan.n_articles()) throw NotFound("article " + std::to_string(article) + " of " + plan.site_id());
    std::vector<std::string> out;
    const auto n = plan.article_paragraphs()[article];
    for (std::uint32_t p = 0; p < n; ++p) {
        Rng rng(text_seed(plan, article, 1 + p));
        const auto n_sentences = static_cast<std::size_t>(rng.between(4, 6));
        std::string para;
        for (std::size_t s = 0; s < n_sentences; ++s) {
            if (s) para.push_back(' ');
            para += sentence(rng);
        }
        out.push_back(std::move(para));
    }
    return out;
}

std::string full_article_text(const SitePlan& plan, ArticleId article) {
    return text::join(article_paragraphs(plan, article), "\n");
}

// ---------------------------------------------------------------------------

Corpus gen_corpus(const GeneratorConfig& cfg) {
    cfg.validate();
    Rng rng(cfg.seed);
    const std::size_t n = cfg.n_sites;

    const auto paywalled = deal_flags(rng, n, cfg.share_paywalled);
    const std::size_t n_pw = static_cast<std::size_t>(std::count(paywalled.begin(), paywalled.end(), true));
    const std::size_t n_free = n - n_pw;

    const std::array<double, 3> kind_shares{cfg.kind_shares.soft, cfg.kind_shares.hard, cfg.kind_shares.hybrid};
    const auto kinds = deal<PolicyKind>(rng, {PolicyKind::soft, PolicyKind::hard, PolicyKind::hybrid},
                                        largest_remainder(n_pw, kind_shares));
    const std::array<double, 3> mech_shares{cfg.mechanism_shares.obfuscate, cfg.mechanism_shares.truncate,
                                            cfg.mechanism_shares.redirect};
    const auto mechanisms = deal<Mechanism>(rng, {Mechanism::obfuscate, Mechanism::truncate, Mechanism::redirect},
                                            largest_remainder(n_pw, mech_shares));

    const std::size_t n_soft = static_cast<std::size_t>(std::count(kinds.begin(), kinds.end(), PolicyKind::soft));
    std::vector<std::uint32_t> quota_values;
    std::vector<double> quota_probs;
    for (const auto& [q, p] : cfg.quota_distribution) {
        quota_values.push_back(q);
        quota_probs.push_back(p);
    }
    const auto quotas = deal<std::uint32_t>(rng, quota_values, largest_remainder(n_soft, quota_probs));
    const auto respawn = deal_flags(rng, n_soft, cfg.respawn_rate);
    const auto referrer = deal_flags(rng, n_pw, cfg.referrer_allow_rate);
    const auto distractor = deal_flags(rng, n_free, cfg.distractor_rate);
    const auto feeds = deal_flags(rng, n, cfg.feed_rate);

    std::vector<SitePlan> plans;
    std::vector<ManifestEntry> entries;
    std::size_t pw_i = 0;
    std::size_t soft_i = 0;
    std::size_t free_i = 0;
    for (std::size_t i = 0; i < n; ++i) {
        char id_buf[32];
        std::snprintf(id_buf, sizeof id_buf, "site-%03zu", i);
        const std::string site_id = id_buf;

        std::optional<PaywallPolicy> policy;
        std::uint32_t min_articles = 10;
        bool has_distractor = false;
        if (paywalled[i]) {
            const auto kind = kinds[pw_i];
            const auto mech = mechanisms[pw_i];
            std::vector<std::string> allow;
            if (referrer[pw_i]) allow = cfg.referrer_hosts;
            std::uint32_t max_views = 0;
            bool fp_respawn = false;
            if (kind == PolicyKind::soft) {
                max_views = quotas[soft_i];
                fp_respawn = respawn[soft_i];
                ++soft_i;
                // Enough articles to trigger the meter and still have unseen ones left.
                min_articles = std::max<std::uint32_t>(min_articles, max_views + 4);
            }
            ++pw_i;
            std::set<ArticleId> free;
            if (kind == PolicyKind::hybrid) {
                for (ArticleId a = 0; a < min_articles; a += kHybridFreeEvery) free.insert(a);
            }
            policy.emplace(kind, max_views, mech, fp_respawn, std::move(allow), std::move(free));
        } else {
            has_distractor = distractor[free_i++];
        }

        const auto n_articles = min_articles + static_cast<std::uint32_t>(rng.below(7));
        if (policy && policy->kind() == PolicyKind::hybrid) {
            std::set<ArticleId> free;
            for (ArticleId a = 0; a < n_articles; a += kHybridFreeEvery) free.insert(a);
            const auto mech = policy->mechanism();
            auto allow = policy->referrer_allowlist();
            policy.emplace(PolicyKind::hybrid, 0, mech, false, std::move(allow), std::move(free));
        }
        std::vector<std::uint32_t> paragraphs(n_articles);
        for (auto& p : paragraphs) p = static_cast<std::uint32_t>(rng.between(3, 8));

        plans.emplace_back(site_id, n_articles, std::move(policy), feeds[i], std::move(paragraphs), has_distractor);
        entries.push_back({site_id, plans.back().root_url(), "plans/" + site_id + ".json", plans.back().paywalled()});
    }
    return Corpus{CorpusManifest(cfg.seed, std::move(entries), kGeneratorVersion), std::move(plans)};
}

void write_corpus(const Corpus& corpus, const std::filesystem::path& dir) {
    std::filesystem::create_directories(dir / "plans");
    io::write_file(dir / "manifest.json", serialize_manifest(corpus.manifest));
    for (const auto& p : corpus.plans) io::write_file(dir / "plans" / (p.site_id() + ".json"), serialize_plan(p));
}

Corpus read_corpus(const std::filesystem::path& dir) {
    auto manifest = deserialize_manifest(io::read_file(dir / "manifest.json"));
    std::vector<SitePlan> plans;
    for (const auto& e : manifest.sites()) {
        auto plan = deserialize_plan(io::read_file(dir / e.plan));
        if (plan.site_id() != e.site_id) throw SchemaError("plan " + e.plan + " holds site " + plan.site_id());
        if (plan.paywalled() != e.label) {
            throw SchemaError("manifest label for " + e.site_id + " disagrees with its plan");
        }
        plans.push_back(std::move(plan));
    }
    return Corpus{std::move(manifest), std::move(plans)};
}

}  // namespace pwlab
