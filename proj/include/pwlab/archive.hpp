#pragma once

// One-sided paywall oracle (filter-list and seed-domain labeling) and the
// archive walk that dates paywall adoption.

#include <cstdint>
#include <filesystem>
#include <map>
#include <optional>
#include <string>
#include <string_view>
#include <utility>
#include <vector>

#include "pwlab/core.hpp"
#include "pwlab/filter_list.hpp"

namespace pwlab {

/// The oracle never says "not paywalled".
enum class OracleLabel { paywalled, unlabeled };
std::string_view to_string(OracleLabel l);

/// One host per line; blank lines and "#" comments ignored; lowercased.
std::vector<std::string> parse_seed_domains(std::string_view text);

OracleLabel label_site(const PageSnapshot& snapshot, const FilterList& rules,
                       const std::vector<std::string>& seed_domains = {});
OracleLabel label_site(const SiteCrawl& crawl, const FilterList& rules,
                       const std::vector<std::string>& seed_domains = {});

class ArchiveStore {
public:
    using Version = std::pair<Timestamp, PageSnapshot>;

    /// Throws ConfigError unless `at` is later than the site's newest version.
    void add(const std::string& site, Timestamp at, PageSnapshot snapshot);
    /// Oldest first; empty for an unknown site.
    const std::vector<Version>& versions(std::string_view site) const;
    std::vector<std::string> sites() const;

private:
    std::map<std::string, std::vector<Version>, std::less<>> sites_;
};

/// Layout: <dir>/<site>/<timestamp>/snapshot.json.
void write_archive(const ArchiveStore& store, const std::filesystem::path& dir);
ArchiveStore read_archive(const std::filesystem::path& dir);

struct Adoption {
    enum class Kind { adopted_around, censored, not_paywalled };
    Kind kind = Kind::not_paywalled;
    std::optional<Timestamp> at;

    friend bool operator==(const Adoption&, const Adoption&) = default;
};
std::string_view to_string(Adoption::Kind k);

/// Walks versions newest to oldest. Newest unlabeled: not paywalled.
/// Otherwise the first unlabeled version met dates the adoption; when every
/// version is labeled the result is censored at the earliest one. Throws
/// EmptyArchive when the site has no versions.
Adoption adoption_date(std::string_view site, const ArchiveStore& store, const FilterList& rules);

struct GrowthBucket {
    int year = 0;
    int half = 1;  // 1: Jan-Jun, 2: Jul-Dec
    std::size_t count = 0;
    std::size_t cumulative = 0;
    std::optional<double> ratio;  // cumulative / previous cumulative

    std::string label() const;  // "2016H2"
    friend bool operator==(const GrowthBucket&, const GrowthBucket&) = default;
};

/// Calendar half-year buckets from the first non-empty one to the last.
std::vector<GrowthBucket> growth_series(const std::vector<Timestamp>& dates);

/// Start of a calendar half-year, UTC.
Timestamp half_year_start(int year, int half);

struct SyntheticArchive {
    ArchiveStore store;
    std::map<std::string, Timestamp> last_before_adoption;  // ground truth per site
    std::string filter_list;                                // rules that recognize the simulator's library
};

/// `n_sites` archives, each a few root-page versions rendered by the
/// simulator: unpaywalled before a random adoption point, paywalled after.
SyntheticArchive synthetic_archives(std::size_t n_sites, std::uint64_t seed);

std::string serialize_adoption_report(const std::map<std::string, Adoption>& results,
                                      const std::vector<GrowthBucket>& growth, std::uint64_t seed);

}  // namespace pwlab
