#include <gtest/gtest.h>

#include <algorithm>
#include <cmath>
#include <map>

#include "io.hpp"
#include "pwlab/corpus.hpp"
#include "pwlab/errors.hpp"
#include "pwlab/rng.hpp"
#include "pwlab/text.hpp"
#include "support.hpp"

using namespace pwlab;

namespace {

struct Counts {
    std::size_t paywalled = 0;
    std::map<PolicyKind, std::size_t> kinds;
    std::map<Mechanism, std::size_t> mechanisms;
    std::map<std::uint32_t, std::size_t> quotas;
    std::size_t soft = 0, respawn = 0, referrer = 0, distractor = 0, feed = 0;
};

Counts count(const Corpus& c) {
    Counts k;
    for (const auto& p : c.plans) {
        k.feed += p.has_feed();
        k.distractor += p.distractor_subscribe_box();
        if (!p.policy()) continue;
        ++k.paywalled;
        ++k.kinds[p.policy()->kind()];
        ++k.mechanisms[p.policy()->mechanism()];
        k.referrer += !p.policy()->referrer_allowlist().empty();
        if (p.policy()->kind() == PolicyKind::soft) {
            ++k.soft;
            ++k.quotas[p.policy()->max_views()];
            k.respawn += p.policy()->fingerprint_respawn();
        }
    }
    return k;
}

void within_one(std::size_t got, double expected, const std::string& what) {
    EXPECT_LE(std::abs(static_cast<double>(got) - expected), 1.0) << what << ": got " << got << ", expected " << expected;
}

}  // namespace

TEST(Policy, KindInvariants) {
    EXPECT_THROW(PaywallPolicy(PolicyKind::hard, 3, Mechanism::truncate, false, {}), ConfigError);
    EXPECT_THROW(PaywallPolicy(PolicyKind::soft, 0, Mechanism::truncate, false, {}), ConfigError);
    EXPECT_THROW(PaywallPolicy(PolicyKind::soft, 2, Mechanism::truncate, false, {}, {0, 3}), ConfigError);
    EXPECT_NO_THROW(PaywallPolicy(PolicyKind::hybrid, 0, Mechanism::truncate, false, {}, {0, 3}));
}

TEST(Policy, HybridFreeSetIsEveryThirdArticle) {
    const auto p = PaywallPolicy::hybrid(10, Mechanism::obfuscate);
    EXPECT_EQ(p.free_article_ids(), (std::set<ArticleId>{0, 3, 6, 9}));
}

TEST(Policy, ReferrerAllowlistMatchesHost) {
    const PaywallPolicy p(PolicyKind::hard, 0, Mechanism::redirect, false, {"www.google.com", "t.co"});
    EXPECT_TRUE(p.referrer_allowed("https://www.google.com/search?q=x"));
    EXPECT_TRUE(p.referrer_allowed("https://t.co/abc"));
    EXPECT_FALSE(p.referrer_allowed("https://www.bing.com/"));
    EXPECT_FALSE(p.referrer_allowed("www.google.com"));
}

TEST(SitePlanType, ParagraphInvariants) {
    EXPECT_THROW(SitePlan("s", 5, std::nullopt, false, pwtest::paragraphs(4), false), ConfigError);
    EXPECT_THROW(SitePlan("s", 5, std::nullopt, false, {3, 3, 2, 3, 3}, false), ConfigError);
    EXPECT_THROW(SitePlan("s", 4, std::nullopt, false, pwtest::paragraphs(4), false), ConfigError);
    EXPECT_NO_THROW(SitePlan("s", 5, std::nullopt, false, pwtest::paragraphs(5), false));
}

TEST(SitePlanType, RoundTrip) {
    const auto plan = pwtest::soft_site("site-009", 3, Mechanism::obfuscate, true, {"t.co"});
    EXPECT_EQ(deserialize_plan(serialize_plan(plan)), plan);
    const auto hybrid = pwtest::hybrid_site("site-010", Mechanism::truncate);
    EXPECT_EQ(deserialize_plan(serialize_plan(hybrid)), hybrid);
    const auto none = pwtest::free_site("site-011", true, true);
    EXPECT_EQ(deserialize_plan(serialize_plan(none)), none);
}

TEST(GeneratorConfigType, DefaultsValidateAndRoundTrip) {
    GeneratorConfig g;
    EXPECT_NO_THROW(g.validate());
    EXPECT_EQ(serialize_generator_config(deserialize_generator_config(serialize_generator_config(g))),
              serialize_generator_config(g));
}

TEST(GeneratorConfigType, SharesMustSumToOne) {
    GeneratorConfig g;
    g.kind_shares = {0.5, 0.3, 0.3};
    EXPECT_THROW(g.validate(), ConfigError);
    GeneratorConfig h;
    h.mechanism_shares = {0.4, 0.4, 0.1};
    EXPECT_THROW(h.validate(), ConfigError);
    GeneratorConfig q;
    q.quota_distribution = {{4, 0.5}};
    EXPECT_THROW(q.validate(), ConfigError);
    GeneratorConfig r;
    r.respawn_rate = 1.5;
    EXPECT_THROW(r.validate(), ConfigError);
    EXPECT_THROW(gen_corpus(g), ConfigError);
}

TEST(GeneratorConfigType, DefaultSharesAreThePublishedOnes) {
    const GeneratorConfig g;
    // 66.7 / 15.7 / 16.6 renormalized to sum to one.
    EXPECT_NEAR(g.kind_shares.soft / g.kind_shares.hard, 66.7 / 15.7, 1e-12);
    EXPECT_NEAR(g.kind_shares.hybrid / g.kind_shares.hard, 16.6 / 15.7, 1e-12);
    EXPECT_DOUBLE_EQ(g.mechanism_shares.obfuscate, 0.482);
    EXPECT_DOUBLE_EQ(g.mechanism_shares.truncate, 0.445);
    EXPECT_DOUBLE_EQ(g.mechanism_shares.redirect, 0.073);
}

TEST(GeneratorConfigType, SoftQuotaMedianIsFour) {
    double cum = 0.0;
    std::uint32_t median = 0;
    for (const auto& [q, p] : default_quota_distribution()) {
        cum += p;
        if (cum >= 0.5) {
            median = q;
            break;
        }
    }
    EXPECT_EQ(median, 4u);
}

TEST(LargestRemainder, SumsAndStaysWithinOne) {
    Rng rng(17);
    for (int trial = 0; trial < 500; ++trial) {
        const auto k = rng.between(1, 8);
        std::vector<double> shares(k);
        double total = 0;
        for (auto& s : shares) total += (s = rng.uniform01() + 1e-3);
        for (auto& s : shares) s /= total;
        const auto n = static_cast<std::size_t>(rng.between(0, 500));
        const auto counts = largest_remainder(n, shares);
        ASSERT_EQ(counts.size(), shares.size());
        std::size_t sum = 0;
        for (std::size_t i = 0; i < counts.size(); ++i) {
            sum += counts[i];
            EXPECT_LT(std::abs(static_cast<double>(counts[i]) - n * shares[i]), 1.0);
        }
        EXPECT_EQ(sum, n);
    }
}

TEST(LargestRemainder, TiesGoToLowerIndex) {
    const std::vector<double> shares{0.25, 0.25, 0.25, 0.25};
    EXPECT_EQ(largest_remainder(2, shares), (std::vector<std::size_t>{1, 1, 0, 0}));
}

TEST(GenCorpus, ZeroSitesGivesEmptyManifest) {
    GeneratorConfig g;
    g.n_sites = 0;
    const auto c = gen_corpus(g);
    EXPECT_TRUE(c.plans.empty());
    EXPECT_TRUE(c.manifest.sites().empty());
}

TEST(GenCorpus, SameSeedSameBytes) {
    GeneratorConfig g;
    g.n_sites = 50;
    pwtest::TempDir a, b;
    write_corpus(gen_corpus(g), a.path());
    write_corpus(gen_corpus(g), b.path());
    EXPECT_EQ(io::read_file(a / "manifest.json"), io::read_file(b / "manifest.json"));
    const auto corpus = gen_corpus(g);
    for (const auto& e : corpus.manifest.sites()) {
        EXPECT_EQ(io::read_file(a / e.plan), io::read_file(b / e.plan));
    }
    g.seed = 43;
    EXPECT_NE(serialize_manifest(gen_corpus(g).manifest), io::read_file(a / "manifest.json"));
}

TEST(GenCorpus, CategoryCountsWithinOneForAnySize) {
    Rng rng(8);
    for (int trial = 0; trial < 40; ++trial) {
        GeneratorConfig g;
        g.seed = rng.next();
        g.n_sites = static_cast<std::uint32_t>(rng.between(0, 300));
        const auto c = gen_corpus(g);
        auto k = count(c);
        const auto n = static_cast<double>(g.n_sites);
        const auto pw = static_cast<double>(k.paywalled);
        within_one(k.paywalled, n * g.share_paywalled, "paywalled");
        within_one(k.kinds[PolicyKind::soft], pw * g.kind_shares.soft, "soft");
        within_one(k.kinds[PolicyKind::hard], pw * g.kind_shares.hard, "hard");
        within_one(k.kinds[PolicyKind::hybrid], pw * g.kind_shares.hybrid, "hybrid");
        within_one(k.mechanisms[Mechanism::obfuscate], pw * g.mechanism_shares.obfuscate, "obfuscate");
        within_one(k.mechanisms[Mechanism::truncate], pw * g.mechanism_shares.truncate, "truncate");
        within_one(k.mechanisms[Mechanism::redirect], pw * g.mechanism_shares.redirect, "redirect");
        for (const auto& [q, p] : g.quota_distribution) within_one(k.quotas[q], k.soft * p, "quota");
        within_one(k.respawn, k.soft * g.respawn_rate, "respawn");
        within_one(k.referrer, pw * g.referrer_allow_rate, "referrer");
        within_one(k.distractor, (n - pw) * g.distractor_rate, "distractor");
        within_one(k.feed, n * g.feed_rate, "feed");
    }
}

TEST(GenCorpus, LabelsFollowPlansAndPlansAreValid) {
    GeneratorConfig g;
    g.n_sites = 120;
    const auto c = gen_corpus(g);
    ASSERT_EQ(c.plans.size(), c.manifest.sites().size());
    for (std::size_t i = 0; i < c.plans.size(); ++i) {
        const auto& p = c.plans[i];
        const auto& e = c.manifest.sites()[i];
        EXPECT_EQ(e.site_id, p.site_id());
        EXPECT_EQ(e.label, p.paywalled());
        EXPECT_EQ(e.root, p.root_url());
        EXPECT_GE(p.n_articles(), 5u);
        if (p.policy() && p.policy()->kind() == PolicyKind::soft) {
            // Enough unseen articles remain after the quota for a bypass attempt.
            EXPECT_GE(p.n_articles(), p.policy()->max_views() + 2);
        }
        if (!p.paywalled()) continue;
        EXPECT_FALSE(p.distractor_subscribe_box());
    }
}

TEST(GenCorpus, WriteReadRoundTrip) {
    GeneratorConfig g;
    g.n_sites = 30;
    const auto c = gen_corpus(g);
    pwtest::TempDir dir;
    write_corpus(c, dir.path());
    const auto back = read_corpus(dir.path());
    EXPECT_EQ(back.manifest, c.manifest);
    EXPECT_EQ(back.plans, c.plans);
}

TEST(GenCorpus, InconsistentLabelRejectedOnRead) {
    GeneratorConfig g;
    g.n_sites = 4;
    auto c = gen_corpus(g);
    auto entries = c.manifest.sites();
    entries[0].label = !entries[0].label;
    pwtest::TempDir dir;
    write_corpus(c, dir.path());
    io::write_file(dir / "manifest.json", serialize_manifest(CorpusManifest(g.seed, entries, "gen/2")));
    EXPECT_THROW(read_corpus(dir.path()), SchemaError);
}

TEST(ArticleText, DeterministicAndPlanShaped) {
    const auto plan = pwtest::soft_site("site-003", 2, Mechanism::truncate);
    for (ArticleId a = 0; a < plan.n_articles(); ++a) {
        const auto paras = article_paragraphs(plan, a);
        EXPECT_EQ(paras.size(), plan.article_paragraphs()[a]);
        EXPECT_EQ(article_paragraphs(plan, a), paras);
        std::string joined;
        for (std::size_t i = 0; i < paras.size(); ++i) joined += (i ? "\n" : "") + paras[i];
        EXPECT_EQ(full_article_text(plan, a), joined);
        EXPECT_FALSE(article_title(plan, a).empty());
        for (const auto& p : paras) {
            const auto lower = text::to_lower(p);
            EXPECT_EQ(lower.find("subscribe"), std::string::npos);
            EXPECT_EQ(lower.find("sign up"), std::string::npos);
            EXPECT_EQ(lower.find("remaining"), std::string::npos);
        }
    }
    EXPECT_NE(full_article_text(plan, 0), full_article_text(plan, 1));
    EXPECT_NE(full_article_text(plan, 0), full_article_text(pwtest::soft_site("site-004", 2, Mechanism::truncate), 0));
}
