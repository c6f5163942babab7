#include <gtest/gtest.h>

#include <cmath>

#include "pwlab/dataset.hpp"
#include "pwlab/errors.hpp"
#include "pwlab/features.hpp"
#include "pwlab/lexicon.hpp"
#include "pwlab/readermode.hpp"
#include "support.hpp"

using namespace pwlab;

namespace {

double f(const FeatureVector& fv, std::string_view name) { return fv.values[feature_index(name)]; }

std::size_t code_points(std::string_view s) {
    std::size_t n = 0;
    for (unsigned char c : s) n += (c & 0xC0) != 0x80;
    return n;
}

FeatureVector features_of(const SitePlan& plan, Capabilities caps = {}) {
    return assemble(pwtest::crawl(plan, caps), Lexicon::english_default());
}

}  // namespace

TEST(Lexicon, DefaultGroupsAndMatching) {
    const auto lex = Lexicon::english_default();
    ASSERT_EQ(lex.groups.size(), 3u);
    for (std::size_t i = 0; i < 3; ++i) EXPECT_EQ(lex.groups[i].name, kLexiconGroups[i]);
    EXPECT_TRUE(lex.groups[0].matches("Please SUBSCRIBE now"));
    EXPECT_TRUE(lex.groups[1].matches("sign\n   up today"));
    EXPECT_FALSE(lex.groups[1].matches("signup"));
    EXPECT_TRUE(lex.groups[2].matches("3 articles Remaining"));
    EXPECT_FALSE(lex.groups[0].matches("subscriptions"));
}

TEST(Lexicon, RoundTripAndValidation) {
    const auto lex = Lexicon::english_default();
    EXPECT_EQ(serialize_lexicon(deserialize_lexicon(serialize_lexicon(lex))), serialize_lexicon(lex));
    auto bad = lex;
    bad.groups.pop_back();
    EXPECT_THROW(bad.validate(), ConfigError);
    bad = lex;
    std::swap(bad.groups[0], bad.groups[1]);
    EXPECT_THROW(bad.validate(), ConfigError);
    EXPECT_THROW(deserialize_lexicon("[1,2"), ParseError);
}

TEST(Features, RegistryShape) {
    const auto& names = feature_names();
    ASSERT_EQ(names.size(), 31u);
    EXPECT_EQ(names[0], "text.subscribe.readermode.cookiejar");
    EXPECT_EQ(names[17], "text.remaining.elsewhere.clean");
    EXPECT_EQ(names[18], "struct.has_feed");
    EXPECT_EQ(std::set<std::string>(names.begin(), names.end()).size(), names.size());
    EXPECT_THROW(feature_index("nope"), NotFound);
}

TEST(Features, NullSiteIsAllZeroExceptFeed) {
    for (bool feed : {false, true}) {
        const auto fv = features_of(pwtest::free_site("site-001", false, feed));
        ASSERT_EQ(fv.values.size(), kFeatureCount);
        for (std::size_t i = 0; i < kFeatureCount; ++i) {
            if (feature_names()[i] == "struct.has_feed") {
                EXPECT_EQ(fv.values[i], feed ? 1.0 : 0.0);
            } else {
                EXPECT_EQ(fv.values[i], 0.0) << feature_names()[i];
            }
        }
        EXPECT_EQ(fv.label, false);
    }
}

TEST(Features, DistractorShowsUpElsewhereOnly) {
    // Pick one distractor of each wording.
    bool seen[2] = {false, false};
    for (int i = 0; i < 20 && !(seen[0] && seen[1]); ++i) {
        const auto fv = features_of(pwtest::free_site("site-" + std::to_string(100 + i), true));
        const bool sub = f(fv, "text.subscribe.elsewhere.cookiejar") > 0;
        const bool sign = f(fv, "text.signup.elsewhere.cookiejar") > 0;
        ASSERT_NE(sub, sign);
        seen[sign] = true;
        const char* g = sub ? "subscribe" : "signup";
        EXPECT_EQ(f(fv, std::string("text.") + g + ".elsewhere.clean"), 1.0);
        for (auto grp : {"subscribe", "signup", "remaining"}) {
            for (auto c : {"cookiejar", "clean"}) {
                EXPECT_EQ(f(fv, std::string("text.") + grp + ".overlay." + c), 0.0);
                EXPECT_EQ(f(fv, std::string("text.") + grp + ".readermode." + c), 0.0);
            }
        }
    }
    EXPECT_TRUE(seen[0] && seen[1]);
}

TEST(Features, ObfuscateSiteSignals) {
    const auto fv = features_of(pwtest::soft_site("site-001", 2, Mechanism::obfuscate));
    EXPECT_EQ(f(fv, "text.subscribe.overlay.cookiejar"), 3.0 / 5.0);
    EXPECT_EQ(f(fv, "text.remaining.overlay.cookiejar"), 3.0 / 5.0);
    EXPECT_EQ(f(fv, "text.subscribe.overlay.clean"), 0.0);
    EXPECT_GT(f(fv, "visual.obscured.cookiejar_mean"), 0.0);
    EXPECT_EQ(f(fv, "visual.obscured.delta_mean"), f(fv, "visual.obscured.cookiejar_mean"));
    EXPECT_GT(f(fv, "visual.overlay_text.cookiejar_mean"), 0.0);
    // Clean crawl never sees an overlay on a soft site.
    const auto crawl = pwtest::crawl(pwtest::soft_site("site-001", 2, Mechanism::obfuscate));
    for (const auto& p : crawl.clean_snapshots()) {
        EXPECT_EQ(measure_page(p, Lexicon::english_default()).obscured_nodes, 0u);
    }
}

TEST(Features, TruncateSiteSignals) {
    const auto plan = pwtest::soft_site("site-001", 2, Mechanism::truncate);
    const auto fv = features_of(plan);
    EXPECT_EQ(f(fv, "visual.obscured.cookiejar_mean"), 0.0);
    EXPECT_GT(f(fv, "visual.viewport.delta_max"), 0.0);
    EXPECT_GT(f(fv, "struct.readermode_chars.delta_mean"), 0.0);
    EXPECT_EQ(f(fv, "text.remaining.elsewhere.cookiejar"), 3.0 / 5.0);
    // Enforced pages keep only the first paragraph in the article body; it
    // counts as main content only when it clears the length threshold.
    double want_max = 0.0, want_sum = 0.0;
    for (ArticleId a = 2; a < 5; ++a) {
        const auto paras = article_paragraphs(plan, a);
        const auto first = code_points(paras[0]);
        const double kept = first >= kMinMainContentChars ? static_cast<double>(first) : 0.0;
        const double d = static_cast<double>(code_points(full_article_text(plan, a))) - kept;
        want_max = std::max(want_max, d);
        want_sum += d;
    }
    EXPECT_EQ(f(fv, "struct.readermode_chars.delta_max"), want_max);
    EXPECT_DOUBLE_EQ(f(fv, "struct.readermode_chars.delta_mean"), want_sum / 5.0);
}

TEST(Features, HasFeedFollowsThePlan) {
    EXPECT_EQ(f(features_of(pwtest::free_site("site-001", false, true)), "struct.has_feed"), 1.0);
    EXPECT_EQ(f(features_of(pwtest::free_site("site-001", false, false)), "struct.has_feed"), 0.0);
}

TEST(Features, RangesAndSignConventionsOverACorpus) {
    GeneratorConfig g;
    g.seed = 5;
    g.n_sites = 30;
    const auto corpus = gen_corpus(g);
    const auto& names = feature_names();
    for (const auto& plan : corpus.plans) {
        const auto fv = features_of(plan);
        for (std::size_t i = 0; i < kFeatureCount; ++i) {
            const auto& n = names[i];
            const double v = fv.values[i];
            ASSERT_TRUE(std::isfinite(v));
            if (n.starts_with("text.") || n.starts_with("struct.readermode_missing") || n == "struct.has_feed") {
                EXPECT_GE(v, 0.0) << n;
                EXPECT_LE(v, 1.0) << n;
            } else if (n.find("viewport") == std::string::npos) {
                // Every delta except the viewport one is oriented so paywalling makes it non-negative.
                EXPECT_GE(v, 0.0) << plan.site_id() << " " << n;
            }
        }
    }
}

TEST(Features, PureFunction) {
    const auto crawl = pwtest::crawl(pwtest::soft_site("site-001", 1, Mechanism::obfuscate, true));
    const auto lex = Lexicon::english_default();
    EXPECT_EQ(assemble(crawl, lex), assemble(crawl, lex));
}

TEST(Features, FailedPagesAreSkipped) {
    const auto plan = pwtest::free_site("site-001", false, true);
    const auto crawl = pwtest::crawl(plan);
    auto jar = crawl.cookiejar_snapshots();
    jar[1] = PageSnapshot::failed_visit(jar[1].url(), 0, {}, CrawlKind::cookiejar, jar[1].session_id());
    const SiteCrawl partial(crawl.site_id(), crawl.site_root(), crawl.children(), jar, crawl.clean_snapshots(), false);
    const auto fv = assemble(partial, Lexicon::english_default());
    EXPECT_EQ(fv.values.size(), kFeatureCount);
    EXPECT_EQ(f(fv, "struct.has_feed"), 1.0);
    EXPECT_EQ(f(fv, "struct.readermode_missing.cookiejar"), 0.0);

    std::vector<PageSnapshot> jar_failed, clean_failed;
    for (const auto& p : crawl.cookiejar_snapshots())
        jar_failed.push_back(PageSnapshot::failed_visit(p.url(), 0, {}, CrawlKind::cookiejar, p.session_id()));
    for (const auto& p : crawl.clean_snapshots())
        clean_failed.push_back(PageSnapshot::failed_visit(p.url(), 0, {}, CrawlKind::clean, p.session_id()));
    const SiteCrawl dead(crawl.site_id(), crawl.site_root(), crawl.children(), jar_failed, clean_failed);
    EXPECT_THROW(assemble(dead, Lexicon::english_default()), EmptyCrawl);
}

TEST(Dataset, RoundTrip) {
    Dataset ds;
    ds.seed = 9;
    FeatureVector a{"site-001", std::vector<double>(kFeatureCount, 0.25), true};
    FeatureVector b{"site-002", std::vector<double>(kFeatureCount, -1.5), std::nullopt};
    b.values[3] = 1.0 / 3.0;
    ds.rows = {a, b};
    const auto bytes = serialize_dataset(ds);
    const auto back = deserialize_dataset(bytes);
    EXPECT_EQ(back.seed, 9u);
    EXPECT_EQ(back.rows, ds.rows);
    EXPECT_EQ(serialize_dataset(back), bytes);
    EXPECT_EQ(back.labeled().size(), 1u);
}

TEST(Dataset, RegistryAndColumnMismatches) {
    Dataset ds;
    ds.rows = {FeatureVector{"site-001", std::vector<double>(kFeatureCount, 0.0), false}};
    const auto bytes = serialize_dataset(ds);
    auto renamed = bytes;
    renamed.replace(renamed.find("features/1"), 10, "features/2");
    EXPECT_THROW(deserialize_dataset(renamed), RegistryMismatch);
    auto column = bytes;
    column.replace(column.find("struct.has_feed"), 15, "struct.has_rss_");
    EXPECT_THROW(deserialize_dataset(column), RegistryMismatch);
    auto format = bytes;
    format.replace(format.find("dataset/1"), 9, "dataset/7");
    EXPECT_THROW(deserialize_dataset(format), VersionMismatch);
    auto row = bytes;
    row.replace(row.rfind(",0"), 2, ",x");
    EXPECT_THROW(deserialize_dataset(row), SchemaError);
}
