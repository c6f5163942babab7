#include "pwlab/archive.hpp"

#include <chrono>
#include <charconv>
#include <cstdio>

#include "io.hpp"
#include "json.hpp"
#include "pwlab/browser.hpp"
#include "pwlab/errors.hpp"
#include "pwlab/render.hpp"
#include "pwlab/rng.hpp"
#include "pwlab/simulator.hpp"
#include "pwlab/text.hpp"
#include "pwlab/url.hpp"
#include "pwlab/version.hpp"

namespace pwlab {

std::string_view to_string(OracleLabel l) { return l == OracleLabel::paywalled ? "paywalled" : "unlabeled"; }

std::vector<std::string> parse_seed_domains(std::string_view input) {
    std::vector<std::string> out;
    for (const auto& line : text::split(input, '\n')) {
        auto t = text::to_lower(text::trim(line));
        if (t.empty() || t[0] == '#') continue;
        out.push_back(std::move(t));
    }
    return out;
}

namespace {

bool seeded(std::string_view url, const std::vector<std::string>& seeds) {
    const auto host = host_of(url);
    if (host.empty()) return false;
    for (const auto& d : seeds) {
        if (host_matches_domain(host, d)) return true;
    }
    return false;
}

bool snapshot_matches(const PageSnapshot& s, const FilterList& rules, const std::vector<std::string>& seeds) {
    for (const auto& r : s.requests()) {
        if (rules.matches(r.url)) return true;
    }
    return seeded(s.url(), seeds) || seeded(s.final_url(), seeds);
}

}  // namespace

OracleLabel label_site(const PageSnapshot& snapshot, const FilterList& rules, const std::vector<std::string>& seeds) {
    return snapshot_matches(snapshot, rules, seeds) ? OracleLabel::paywalled : OracleLabel::unlabeled;
}

OracleLabel label_site(const SiteCrawl& crawl, const FilterList& rules, const std::vector<std::string>& seeds) {
    if (seeded(crawl.site_root(), seeds)) return OracleLabel::paywalled;
    for (const auto* list : {&crawl.cookiejar_snapshots(), &crawl.clean_snapshots()}) {
        for (const auto& s : *list) {
            if (snapshot_matches(s, rules, seeds)) return OracleLabel::paywalled;
        }
    }
    return OracleLabel::unlabeled;
}

// ---------------------------------------------------------------------------

void ArchiveStore::add(const std::string& site, Timestamp at, PageSnapshot snapshot) {
    auto& list = sites_[site];
    if (!list.empty() && at <= list.back().first) {
        throw ConfigError("archive " + site + ": timestamp " + std::to_string(at) + " is not after " +
                          std::to_string(list.back().first));
    }
    list.emplace_back(at, std::move(snapshot));
}

const std::vector<ArchiveStore::Version>& ArchiveStore::versions(std::string_view site) const {
    static const std::vector<Version> empty;
    auto it = sites_.find(site);
    return it == sites_.end() ? empty : it->second;
}

std::vector<std::string> ArchiveStore::sites() const {
    std::vector<std::string> out;
    for (const auto& [s, v] : sites_) out.push_back(s);
    return out;
}

void write_archive(const ArchiveStore& store, const std::filesystem::path& dir) {
    for (const auto& site : store.sites()) {
        for (const auto& [at, snap] : store.versions(site)) {
            io::write_file(dir / site / std::to_string(at) / "snapshot.json", serialize_snapshot(snap) + "\n");
        }
    }
}

ArchiveStore read_archive(const std::filesystem::path& dir) {
    if (!std::filesystem::is_directory(dir)) throw InputError("archive directory " + dir.string() + " not found");
    std::map<std::string, std::map<Timestamp, std::filesystem::path>> found;
    for (const auto& site : std::filesystem::directory_iterator(dir)) {
        if (!site.is_directory()) continue;
        for (const auto& version : std::filesystem::directory_iterator(site.path())) {
            if (!version.is_directory()) continue;
            const auto name = version.path().filename().string();
            Timestamp at = 0;
            auto [p, ec] = std::from_chars(name.data(), name.data() + name.size(), at);
            if (ec != std::errc{} || p != name.data() + name.size()) {
                throw SchemaError("archive entry " + version.path().string() + " is not a timestamp");
            }
            found[site.path().filename().string()][at] = version.path() / "snapshot.json";
        }
    }
    ArchiveStore store;
    for (const auto& [site, versions] : found) {
        for (const auto& [at, path] : versions) store.add(site, at, deserialize_snapshot(io::read_file(path)));
    }
    return store;
}

std::string_view to_string(Adoption::Kind k) {
    switch (k) {
        case Adoption::Kind::adopted_around: return "adopted_around";
        case Adoption::Kind::censored: return "censored";
        case Adoption::Kind::not_paywalled: return "not_paywalled";
    }
    return "not_paywalled";
}

Adoption adoption_date(std::string_view site, const ArchiveStore& store, const FilterList& rules) {
    const auto& versions = store.versions(site);
    if (versions.empty()) throw EmptyArchive("no archived versions of " + std::string(site));
    auto labeled = [&](const PageSnapshot& s) { return label_site(s, rules) == OracleLabel::paywalled; };
    if (!labeled(versions.back().second)) return {Adoption::Kind::not_paywalled, std::nullopt};
    for (auto it = versions.rbegin(); it != versions.rend(); ++it) {
        if (!labeled(it->second)) return {Adoption::Kind::adopted_around, it->first};
    }
    return {Adoption::Kind::censored, versions.front().first};
}

// ---------------------------------------------------------------------------

Timestamp half_year_start(int year, int half) {
    using namespace std::chrono;
    const auto ymd = std::chrono::year{year} / std::chrono::month{half == 1 ? 1u : 7u} / std::chrono::day{1};
    return sys_days(ymd).time_since_epoch().count() * 86400;
}

std::string GrowthBucket::label() const { return std::to_string(year) + "H" + std::to_string(half); }

std::vector<GrowthBucket> growth_series(const std::vector<Timestamp>& dates) {
    using namespace std::chrono;
    std::map<std::pair<int, int>, std::size_t> counts;
    for (auto t : dates) {
        const auto day = floor<days>(sys_seconds{seconds{t}});
        const year_month_day ymd{day};
        counts[{static_cast<int>(ymd.year()), static_cast<unsigned>(ymd.month()) <= 6 ? 1 : 2}]++;
    }
    std::vector<GrowthBucket> out;
    if (counts.empty()) return out;
    auto [year, half] = counts.begin()->first;
    const auto last = counts.rbegin()->first;
    std::size_t cumulative = 0;
    while (std::make_pair(year, half) <= last) {
        GrowthBucket b;
        b.year = year;
        b.half = half;
        auto it = counts.find({year, half});
        b.count = it == counts.end() ? 0 : it->second;
        const auto previous = cumulative;
        cumulative += b.count;
        b.cumulative = cumulative;
        if (!out.empty()) b.ratio = static_cast<double>(cumulative) / static_cast<double>(previous);
        out.push_back(b);
        if (half == 1) {
            half = 2;
        } else {
            half = 1;
            ++year;
        }
    }
    return out;
}

// ---------------------------------------------------------------------------

SyntheticArchive synthetic_archives(std::size_t n_sites, std::uint64_t seed) {
    SyntheticArchive out;
    out.filter_list = "! paywall library served by the simulator\n" + std::string(kPaywallScriptPath) + "\n";
    Rng rng(derive_stream_seed(seed, 0xa7c));
    const Timestamp origin = half_year_start(2012, 1);
    for (std::size_t i = 0; i < n_sites; ++i) {
        char id[32];
        std::snprintf(id, sizeof id, "arch-%03zu", i);
        const std::size_t n_versions = static_cast<std::size_t>(rng.between(3, 9));
        const std::size_t adopt = static_cast<std::size_t>(rng.between(1, static_cast<std::int64_t>(n_versions) - 1));
        std::vector<std::uint32_t> paragraphs(6, 4);
        const SitePlan free_plan(id, 6, std::nullopt, rng.below(2) == 1, paragraphs, false);
        const auto paid_plan = free_plan.with_policy(PaywallPolicy::soft(static_cast<std::uint32_t>(rng.between(1, 5)),
                                                                         Mechanism::obfuscate));
        Timestamp at = origin + rng.between(0, 180) * 86400;
        for (std::size_t v = 0; v < n_versions; ++v) {
            const auto& plan = v < adopt ? free_plan : paid_plan;
            Simulator sim({plan});
            InProcessTransport transport(sim);
            auto session = fresh_session("archive");
            auto snap = Browser(transport).visit(session, plan.root_url(), CrawlKind::initial, at);
            if (v + 1 == adopt) out.last_before_adoption[id] = at;
            out.store.add(id, at, std::move(snap));
            at += rng.between(30, 240) * 86400;
        }
    }
    return out;
}

std::string serialize_adoption_report(const std::map<std::string, Adoption>& results,
                                      const std::vector<GrowthBucket>& growth, std::uint64_t seed) {
    using nlohmann::ordered_json;
    ordered_json j;
    j["format"] = kAdoptionFormat;
    j["tool_version"] = kToolVersion;
    j["seed"] = seed;
    auto sites = ordered_json::array();
    for (const auto& [site, a] : results) {
        ordered_json s;
        s["site"] = site;
        s["result"] = std::string(to_string(a.kind));
        s["timestamp"] = a.at ? ordered_json(*a.at) : ordered_json(nullptr);
        sites.push_back(std::move(s));
    }
    j["sites"] = std::move(sites);
    auto g = ordered_json::array();
    for (const auto& b : growth) {
        ordered_json bj;
        bj["bucket"] = b.label();
        bj["count"] = b.count;
        bj["cumulative"] = b.cumulative;
        bj["ratio"] = b.ratio ? ordered_json(*b.ratio) : ordered_json(nullptr);
        g.push_back(std::move(bj));
    }
    j["growth"] = std::move(g);
    return j.dump(2) + "\n";
}

}  // namespace pwlab
