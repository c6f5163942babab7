#include "pwlab/cli.hpp"

#include <algorithm>
#include <atomic>
#include <chrono>
#include <csignal>
#include <cstdio>
#include <exception>
#include <map>
#include <mutex>
#include <ostream>
#include <set>
#include <sstream>
#include <thread>

#include "CLI11.hpp"
#include "io.hpp"
#include "json_util.hpp"
#include "pwlab/archive.hpp"
#include "pwlab/circumvention.hpp"
#include "pwlab/corpus.hpp"
#include "pwlab/crawler.hpp"
#include "pwlab/dataset.hpp"
#include "pwlab/errors.hpp"
#include "pwlab/evaluation.hpp"
#include "pwlab/features.hpp"
#include "pwlab/filter_list.hpp"
#include "pwlab/http.hpp"
#include "pwlab/lexicon.hpp"
#include "pwlab/server.hpp"
#include "pwlab/simulator.hpp"
#include "pwlab/text.hpp"
#include "pwlab/version.hpp"

namespace fs = std::filesystem;

namespace pwlab::cli {

using jsonutil::ordered_json;

RunConfig load_run_config(const fs::path& file) {
    const auto root_json = jsonutil::parse(io::read_file(file));
    const jsonutil::Reader r(root_json, "");
    r.expect_format(kRunConfigFormat);
    const auto base = file.parent_path();
    auto path = [&](std::string_view key) -> std::optional<fs::path> {
        if (!r.has(key)) return std::nullopt;
        auto v = r.opt_str(key);
        if (!v) return std::nullopt;
        fs::path p(*v);
        return p.is_relative() ? base / p : p;
    };
    RunConfig c;
    if (r.has("seed")) c.seed = r.u64("seed");
    c.corpus = path("corpus");
    c.crawl = path("crawl");
    c.dataset = path("dataset");
    c.model = path("model");
    c.reports = path("reports");
    c.gencfg = path("gencfg");
    c.lexicon = path("lexicon");
    if (r.has("train")) {
        const auto t = r.obj("train");
        TrainConfig tc;
        if (t.has("n_trees")) tc.n_trees = static_cast<std::uint32_t>(t.u64("n_trees"));
        if (t.has("max_depth")) tc.max_depth = static_cast<std::uint32_t>(t.u64("max_depth"));
        if (t.has("min_leaf")) tc.min_leaf = static_cast<std::uint32_t>(t.u64("min_leaf"));
        if (t.has("features_per_split")) tc.features_per_split = static_cast<std::uint32_t>(t.u64("features_per_split"));
        if (t.has("bootstrap")) tc.bootstrap = t.boolean("bootstrap");
        if (t.has("seed")) tc.seed = t.u64("seed");
        if (t.has("k_folds")) tc.k_folds = static_cast<std::uint32_t>(t.u64("k_folds"));
        tc.validate();
        c.train = tc;
    }
    return c;
}

std::string serialize_run_config(const RunConfig& c) {
    ordered_json j;
    j["format"] = kRunConfigFormat;
    if (c.seed) j["seed"] = *c.seed;
    auto put = [&](const char* key, const std::optional<fs::path>& p) {
        if (p) j[key] = p->generic_string();
    };
    put("corpus", c.corpus);
    put("crawl", c.crawl);
    put("dataset", c.dataset);
    put("model", c.model);
    put("reports", c.reports);
    put("gencfg", c.gencfg);
    put("lexicon", c.lexicon);
    if (c.train) {
        ordered_json t;
        t["n_trees"] = c.train->n_trees;
        t["max_depth"] = c.train->max_depth;
        t["min_leaf"] = c.train->min_leaf;
        if (c.train->features_per_split) t["features_per_split"] = *c.train->features_per_split;
        t["bootstrap"] = c.train->bootstrap;
        t["seed"] = c.train->seed;
        t["k_folds"] = c.train->k_folds;
        j["train"] = std::move(t);
    }
    return j.dump(2) + "\n";
}

int exit_code_for(const std::string& code) {
    static const std::set<std::string> input = {"ParseError",       "SchemaError",     "ConfigError", "NotFound",
                                                "RegistryMismatch", "VersionMismatch", "InputError"};
    return input.count(code) ? kExitInput : kExitRuntime;
}

namespace {

std::atomic<bool> g_stop{false};

extern "C" void on_signal(int) { g_stop = true; }

/// Every option a subcommand may register, plus the loaded config.
struct Options {
    fs::path config_file;
    unsigned jobs = 1;

    std::uint64_t seed = 42;
    fs::path corpus, crawl, dataset, model, reports, out, archive, gencfg, lexicon, filter_list, snapshot;
    std::uint32_t sites = 200;
    std::size_t limit = kDefaultChildLimit;
    std::vector<std::string> block_patterns;
    bool no_script = false;
    bool reader_mode = false;
    std::string referrer;
    std::string target;
    std::string bind = "127.0.0.1:8080";
    std::vector<std::string> only_sites;
    std::vector<std::string> strategies;
    TrainConfig train;

    RunConfig cfg;
};

/// Fills unset options from the config file. `given` says whether the
/// flag appeared on the command line.
class Merger {
public:
    explicit Merger(CLI::App& sub) : sub_(sub) {}

    bool given(const std::string& flag) const {
        auto* o = sub_.get_option_no_throw(flag);
        return o && o->count() > 0;
    }

    void path(const std::string& flag, fs::path& target, const std::optional<fs::path>& from_cfg) const {
        if (!given(flag) && from_cfg) target = *from_cfg;
    }

private:
    CLI::App& sub_;
};

void require(const fs::path& p, const std::string& what) {
    if (p.empty()) throw InputError("missing " + what);
}

std::pair<std::string, int> split_host_port(const std::string& s) {
    const auto colon = s.rfind(':');
    if (colon == std::string::npos) throw ConfigError("expected host:port, got '" + s + "'");
    int port = 0;
    try {
        std::size_t used = 0;
        port = std::stoi(s.substr(colon + 1), &used);
        if (used != s.size() - colon - 1 || port < 0 || port > 65535) throw std::out_of_range("port");
    } catch (const std::exception&) {
        throw ConfigError("bad port in '" + s + "'");
    }
    return {s.substr(0, colon), port};
}

Lexicon load_lexicon(const fs::path& p) {
    if (p.empty()) return Lexicon::english_default();
    auto lex = deserialize_lexicon(io::read_file(p));
    lex.validate();
    return lex;
}

/// Runs fn(i) for i in [0, n) on `jobs` threads (stride partition) and
/// rethrows the failure with the lowest index.
template <class Fn>
void for_each_index(std::size_t n, unsigned jobs, Fn fn) {
    jobs = std::max(1u, jobs);
    if (jobs == 1 || n < 2) {
        for (std::size_t i = 0; i < n; ++i) fn(i);
        return;
    }
    std::vector<std::exception_ptr> errors(n);
    std::vector<std::thread> threads;
    for (unsigned w = 0; w < jobs; ++w) {
        threads.emplace_back([&, w] {
            for (std::size_t i = w; i < n; i += jobs) {
                try {
                    fn(i);
                } catch (...) {
                    errors[i] = std::current_exception();
                }
            }
        });
    }
    for (auto& t : threads) t.join();
    for (auto& e : errors) {
        if (e) std::rethrow_exception(e);
    }
}

// ---------------------------------------------------------------------------

int cmd_gen_corpus(const Options& o, std::ostream& out) {
    require(o.corpus, "--corpus (output directory)");
    GeneratorConfig g;
    if (!o.gencfg.empty()) g = deserialize_generator_config(io::read_file(o.gencfg));
    g.seed = o.seed;
    g.n_sites = o.sites;
    g.validate();
    const auto corpus = gen_corpus(g);
    write_corpus(corpus, o.corpus);
    std::size_t paywalled = 0;
    for (const auto& p : corpus.plans) paywalled += p.paywalled() ? 1 : 0;
    out << "wrote " << corpus.plans.size() << " sites (" << paywalled << " paywalled) to " << o.corpus.string()
        << "\n";
    return kExitOk;
}

int cmd_serve(const Options& o, std::ostream& out) {
    require(o.corpus, "--corpus");
    const auto corpus = read_corpus(o.corpus);
    Simulator sim(corpus.plans);
    Server server(sim);
    const auto [host, port] = split_host_port(o.bind);
    const int bound = server.bind(host, port);
    out << "serving " << corpus.plans.size() << " sites on http://" << host << ":" << bound << "/" << std::endl;
    g_stop = false;
    auto old_int = std::signal(SIGINT, on_signal);
    auto old_term = std::signal(SIGTERM, on_signal);
    server.start();
    while (!g_stop) std::this_thread::sleep_for(std::chrono::milliseconds(100));
    server.stop();
    std::signal(SIGINT, old_int);
    std::signal(SIGTERM, old_term);
    out << "stopped\n";
    return kExitOk;
}

int cmd_crawl(const Options& o, std::ostream& out) {
    require(o.corpus, "--corpus");
    require(o.crawl, "--out (crawl directory)");
    const auto corpus = read_corpus(o.corpus);
    Capabilities caps;
    caps.execute_paywall_script = !o.no_script;
    caps.reader_mode = o.reader_mode;
    caps.blocked_url_patterns = o.block_patterns;
    if (!o.referrer.empty()) caps.referrer_override = o.referrer;

    std::vector<const ManifestEntry*> selected;
    for (const auto& e : corpus.manifest.sites()) {
        if (o.only_sites.empty() ||
            std::find(o.only_sites.begin(), o.only_sites.end(), e.site_id) != o.only_sites.end()) {
            selected.push_back(&e);
        }
    }
    for (const auto& s : o.only_sites) {
        if (!corpus.manifest.find(s)) throw InputError("site " + s + " is not in the corpus");
    }

    std::optional<std::pair<std::string, int>> target;
    if (!o.target.empty()) target = split_host_port(o.target);

    for_each_index(selected.size(), o.jobs, [&](std::size_t i) {
        const auto& entry = *selected[i];
        const auto* plan = corpus.find(entry.site_id);
        std::unique_ptr<Simulator> sim;
        std::unique_ptr<Transport> transport;
        if (target) {
            transport = std::make_unique<HttpTransport>(target->first, target->second);
        } else {
            sim = std::make_unique<Simulator>(std::vector<SitePlan>{*plan});
            transport = std::make_unique<InProcessTransport>(*sim);
        }
        Crawler crawler(*transport, caps);
        auto crawl = crawler.crawl_site(entry.site_id, entry.root, o.limit).with_label(entry.label);
        write_site_crawl(crawl, o.crawl, corpus.manifest.seed());
    });
    out << "crawled " << selected.size() << " sites into " << o.crawl.string() << "\n";
    return kExitOk;
}

std::string measures_json(const PageMeasures& m) {
    ordered_json j;
    j["failed"] = m.failed;
    j["has_feed"] = m.has_feed;
    j["has_main_content"] = m.has_main_content;
    j["main_chars"] = m.main_chars;
    j["text_nodes"] = m.text_nodes;
    j["overlay_nodes"] = m.overlay_nodes;
    j["obscured_nodes"] = m.obscured_nodes;
    j["viewport_nodes"] = m.viewport_nodes;
    static const char* locations[] = {"readermode", "overlay", "elsewhere"};
    ordered_json phrases;
    for (std::size_t g = 0; g < 3; ++g) {
        ordered_json row;
        for (std::size_t l = 0; l < 3; ++l) row[locations[l]] = m.phrase[g][l];
        phrases[std::string(kLexiconGroups[g])] = std::move(row);
    }
    j["phrases"] = std::move(phrases);
    return j.dump(2) + "\n";
}

int cmd_extract(const Options& o, std::ostream& out) {
    const auto lexicon = load_lexicon(o.lexicon);
    if (!o.snapshot.empty()) {
        const auto snap = deserialize_snapshot(io::read_file(o.snapshot));
        out << measures_json(measure_page(snap, lexicon));
        return kExitOk;
    }
    require(o.crawl, "--crawl");
    require(o.dataset, "--out (dataset file)");
    if (!fs::is_directory(o.crawl)) throw InputError("crawl directory " + o.crawl.string() + " not found");
    std::vector<fs::path> site_dirs;
    for (const auto& e : fs::directory_iterator(o.crawl)) {
        if (e.is_directory() && fs::exists(e.path() / "crawl.json")) site_dirs.push_back(e.path());
    }
    std::sort(site_dirs.begin(), site_dirs.end());
    if (site_dirs.empty()) throw InputError("no site crawls under " + o.crawl.string());

    Dataset ds;
    ds.rows.resize(site_dirs.size());
    std::vector<std::uint64_t> seeds(site_dirs.size());
    for_each_index(site_dirs.size(), o.jobs, [&](std::size_t i) {
        const auto crawl = read_site_crawl(site_dirs[i], &seeds[i]);
        ds.rows[i] = assemble(crawl, lexicon);
    });
    for (std::size_t i = 1; i < seeds.size(); ++i) {
        if (seeds[i] != seeds[0]) {
            throw InputError("crawl " + site_dirs[i].filename().string() + " has seed " + std::to_string(seeds[i]) +
                             ", expected " + std::to_string(seeds[0]));
        }
    }
    ds.seed = seeds[0];
    io::write_file(o.dataset, serialize_dataset(ds));
    out << "wrote " << ds.rows.size() << " rows to " << o.dataset.string() << "\n";
    return kExitOk;
}

int cmd_train(const Options& o, std::ostream& out) {
    require(o.dataset, "--dataset");
    require(o.model, "--model");
    require(o.reports, "--reports");
    const auto ds = deserialize_dataset(io::read_file(o.dataset));
    const auto m = to_matrix(ds);
    o.train.validate();
    const auto metrics = kfold_eval(m, o.train, o.jobs);
    const auto forest = train_forest(m, o.train, ds.registry, feature_names(), o.jobs);
    io::write_file(o.model, serialize_forest(forest, ds.seed));
    io::write_file(o.reports / "train-metrics.json", serialize_metrics(metrics, ds.seed, ds.registry, "kfold"));
    out << metrics_table(metrics);
    return kExitOk;
}

int cmd_eval(const Options& o, std::ostream& out) {
    require(o.dataset, "--dataset");
    require(o.model, "--model");
    require(o.reports, "--reports");
    const auto forest = deserialize_forest(io::read_file(o.model));
    const auto ds = deserialize_dataset(io::read_file(o.dataset));
    if (forest.registry != ds.registry || forest.feature_names != feature_names()) {
        throw RegistryMismatch("model registry '" + forest.registry + "' does not match dataset registry '" +
                               ds.registry + "'");
    }
    const auto metrics = evaluate(forest, to_matrix(ds));
    io::write_file(o.reports / "eval-metrics.json", serialize_metrics(metrics, ds.seed, ds.registry, "eval"));
    out << metrics_table(metrics);
    return kExitOk;
}

int cmd_bypass(const Options& o, std::ostream& out) {
    require(o.corpus, "--corpus");
    require(o.reports, "--reports");
    const auto corpus = read_corpus(o.corpus);
    std::vector<BypassStrategy> strategies;
    if (o.strategies.empty()) {
        strategies = standard_strategies();
    } else {
        for (const auto& name : o.strategies) {
            auto s = strategy_from_name(name);
            if (!s) throw ConfigError("unknown strategy '" + name + "'");
            strategies.push_back(*s);
        }
    }
    const auto report = bypass_matrix(corpus.plans, strategies, o.jobs);
    io::write_file(o.reports / "bypass.json", serialize_bypass_report(report, corpus.manifest.seed()));
    out << bypass_table(report);
    return kExitOk;
}

int cmd_gen_archive(const Options& o, std::ostream& out) {
    require(o.archive, "--out (archive directory)");
    const auto synthetic = synthetic_archives(o.sites, o.seed);
    write_archive(synthetic.store, o.archive);
    io::write_file(o.archive / "filters.txt", synthetic.filter_list);
    ordered_json truth;
    truth["format"] = "archive-truth/1";
    truth["tool_version"] = kToolVersion;
    truth["seed"] = o.seed;
    ordered_json sites = ordered_json::object();
    for (const auto& [site, at] : synthetic.last_before_adoption) sites[site] = at;
    truth["last_before_adoption"] = std::move(sites);
    io::write_file(o.archive / "truth.json", truth.dump(2) + "\n");
    out << "wrote " << synthetic.store.sites().size() << " archived sites to " << o.archive.string() << "\n";
    return kExitOk;
}

int cmd_adoption(const Options& o, std::ostream& out) {
    require(o.archive, "--archive");
    require(o.reports, "--reports");
    const auto filter_path = o.filter_list.empty() ? o.archive / "filters.txt" : o.filter_list;
    const auto rules = parse_filter_list(io::read_file(filter_path));
    const auto store = read_archive(o.archive);
    std::map<std::string, Adoption> results;
    std::vector<Timestamp> dates;
    for (const auto& site : store.sites()) {
        const auto a = adoption_date(site, store, rules);
        results[site] = a;
        if (a.kind == Adoption::Kind::adopted_around) dates.push_back(*a.at);
    }
    const auto growth = growth_series(dates);
    io::write_file(o.reports / "adoption.json", serialize_adoption_report(results, growth, o.seed));
    std::map<std::string_view, std::size_t> counts;
    for (const auto& [site, a] : results) counts[to_string(a.kind)]++;
    for (const auto& [kind, n] : counts) out << kind << " " << n << "\n";
    for (const auto& b : growth) {
        out << b.label() << " " << b.count << " " << b.cumulative;
        if (b.ratio) out << " x" << text::format_double(*b.ratio);
        out << "\n";
    }
    return kExitOk;
}

// ---------------------------------------------------------------------------

struct Artifact {
    std::string file;
    std::string format;
    std::optional<std::uint64_t> seed;
    std::optional<ordered_json> json;
};

std::optional<Artifact> read_artifact(const fs::path& p) {
    const auto ext = p.extension().string();
    if (ext == ".json") {
        auto j = jsonutil::parse(io::read_file(p));
        if (!j.is_object() || !j.contains("format") || !j["format"].is_string()) return std::nullopt;
        Artifact a{p.filename().string(), j["format"].get<std::string>(), std::nullopt, std::nullopt};
        if (j.contains("seed") && j["seed"].is_number_unsigned()) a.seed = j["seed"].get<std::uint64_t>();
        a.json = std::move(j);
        return a;
    }
    if (ext == ".csv") {
        const auto ds = deserialize_dataset(io::read_file(p));
        return Artifact{p.filename().string(), kDatasetFormat, ds.seed, std::nullopt};
    }
    return std::nullopt;
}

EvalMetrics metrics_from_json(const ordered_json& j) {
    const jsonutil::Reader r(j, "");
    auto row = [](const jsonutil::Reader& f) {
        FoldMetrics m;
        m.n = f.u64("n");
        m.precision = f.num("precision");
        m.recall = f.num("recall");
        m.f_measure = f.num("f_measure");
        m.auroc = f.num("auroc");
        return m;
    };
    EvalMetrics m;
    const auto folds = r.arr("folds");
    for (std::size_t i = 0; i < folds.size(); ++i) {
        auto f = row(folds.obj_at(i));
        f.fold = folds.obj_at(i).u64("fold");
        m.folds.push_back(f);
    }
    m.weighted = row(r.obj("weighted"));
    return m;
}

BypassReport bypass_from_json(const ordered_json& j) {
    const jsonutil::Reader r(j, "");
    BypassReport rep;
    const auto list = r.arr("strategies");
    for (std::size_t i = 0; i < list.size(); ++i) {
        const auto s = list.obj_at(i);
        StrategyRates rates;
        rates.strategy = s.str("strategy");
        rates.soft_success = s.obj("soft").u64("success");
        rates.soft_total = s.obj("soft").u64("total");
        rates.hard_success = s.obj("hard").u64("success");
        rates.hard_total = s.obj("hard").u64("total");
        rates.hybrid_success = s.obj("hybrid").u64("success");
        rates.hybrid_total = s.obj("hybrid").u64("total");
        rates.never_triggered = s.u64("never_triggered");
        rep.rates.push_back(std::move(rates));
    }
    return rep;
}

int cmd_report(const Options& o, std::ostream& out) {
    require(o.reports, "--reports");
    if (!fs::is_directory(o.reports)) throw InputError("report directory " + o.reports.string() + " not found");
    std::vector<fs::path> files;
    for (const auto& e : fs::directory_iterator(o.reports)) {
        if (e.is_regular_file()) files.push_back(e.path());
    }
    std::sort(files.begin(), files.end());
    std::vector<Artifact> artifacts;
    for (const auto& f : files) {
        if (auto a = read_artifact(f)) artifacts.push_back(std::move(*a));
    }
    if (artifacts.empty()) throw InputError("no artifacts under " + o.reports.string());
    std::optional<std::uint64_t> seed;
    for (const auto& a : artifacts) {
        if (!a.seed) continue;
        if (seed && *seed != *a.seed) {
            throw InputError("mixed seeds: " + a.file + " has seed " + std::to_string(*a.seed) + ", others have " +
                             std::to_string(*seed));
        }
        seed = a.seed;
    }

    std::ostringstream s;
    s << "pwlab report (" << kToolVersion << ")\n";
    s << "seed: " << (seed ? std::to_string(*seed) : std::string("none")) << "\n";
    for (const auto& a : artifacts) {
        s << "\n== " << a.file << " [" << a.format << "]\n";
        if (a.format == kMetricsFormat) {
            s << "mode: " << (*a.json)["mode"].get<std::string>() << "\n";
            s << metrics_table(metrics_from_json(*a.json));
        } else if (a.format == kBypassFormat) {
            s << bypass_table(bypass_from_json(*a.json));
        } else if (a.format == kAdoptionFormat) {
            std::map<std::string, std::size_t> counts;
            for (const auto& site : (*a.json)["sites"]) counts[site["result"].get<std::string>()]++;
            for (const auto& [k, n] : counts) s << k << ": " << n << "\n";
            for (const auto& b : (*a.json)["growth"]) {
                s << b["bucket"].get<std::string>() << "  count " << b["count"].get<std::size_t>() << "  cumulative "
                  << b["cumulative"].get<std::size_t>();
                if (!b["ratio"].is_null()) s << "  ratio " << text::format_double(b["ratio"].get<double>());
                s << "\n";
            }
        } else if (a.format == kForestFormat) {
            s << "trees: " << (*a.json)["trees"].size() << "\n";
        }
    }
    const auto summary = s.str();
    io::write_file(o.reports / "summary.txt", summary);
    out << summary;
    return kExitOk;
}

// ---------------------------------------------------------------------------

std::string one_line(std::string s) {
    std::replace(s.begin(), s.end(), '\n', ' ');
    std::replace(s.begin(), s.end(), '\r', ' ');
    return s;
}

}  // namespace

int run(const std::vector<std::string>& args, std::ostream& out, std::ostream& err) {
    Options o;
    CLI::App app{"Paywall laboratory: simulate, crawl, detect and circumvent metered paywalls.", "paywall-lab"};
    app.require_subcommand(1);
    app.fallthrough();
    app.set_version_flag("--version", std::string(kToolVersion));
    app.add_option("--config", o.config_file, "run/1 config file with default paths and settings");
    app.add_option("--jobs", o.jobs, "worker threads (results do not depend on it)")->check(CLI::PositiveNumber);

    auto* gen = app.add_subcommand("gen-corpus", "generate a synthetic publisher corpus");
    gen->add_option("--seed", o.seed, "generator seed");
    gen->add_option("--sites", o.sites, "number of sites");
    gen->add_option("--gencfg", o.gencfg, "gencfg/1 generator config");
    gen->add_option("--corpus,--out", o.corpus, "output directory");

    auto* serve = app.add_subcommand("serve", "serve a corpus over HTTP until interrupted");
    serve->add_option("--corpus", o.corpus, "corpus directory");
    serve->add_option("--bind", o.bind, "host:port (port 0 picks one)");

    auto* crawl = app.add_subcommand("crawl", "run the three crawls over every corpus site");
    crawl->add_option("--corpus", o.corpus, "corpus directory");
    crawl->add_option("--out", o.crawl, "crawl output directory");
    crawl->add_option("--limit", o.limit, "children per site")->check(CLI::PositiveNumber);
    crawl->add_option("--block-pattern", o.block_patterns, "block requests matching this filter rule (repeatable)");
    crawl->add_flag("--no-script", o.no_script, "do not execute the paywall script");
    crawl->add_flag("--reader-mode", o.reader_mode, "render in reader mode");
    crawl->add_option("--referrer", o.referrer, "Referer to send with every request");
    crawl->add_option("--target", o.target, "crawl a running server at host:port instead of in-process");
    crawl->add_option("--site", o.only_sites, "crawl only this site (repeatable)");

    auto* extract = app.add_subcommand("extract", "compute the feature dataset from crawls");
    extract->add_option("--crawl", o.crawl, "crawl directory");
    extract->add_option("--out", o.dataset, "dataset CSV to write");
    extract->add_option("--lexicon", o.lexicon, "lexicon/1 file (default: built-in English)");
    extract->add_option("--snapshot", o.snapshot, "print page measurements of one snapshot file and exit");

    auto* train = app.add_subcommand("train", "k-fold evaluate, then train a forest on all labeled rows");
    train->add_option("--dataset", o.dataset, "dataset CSV");
    train->add_option("--model", o.model, "forest file to write");
    train->add_option("--reports", o.reports, "directory for train-metrics.json");
    train->add_option("--trees", o.train.n_trees, "number of trees");
    train->add_option("--folds", o.train.k_folds, "cross-validation folds");
    train->add_option("--max-depth", o.train.max_depth, "maximum tree depth");
    train->add_option("--min-leaf", o.train.min_leaf, "minimum samples per leaf");
    train->add_option("--seed", o.train.seed, "training seed");

    auto* eval = app.add_subcommand("eval", "score a dataset with a trained forest");
    eval->add_option("--model", o.model, "forest file");
    eval->add_option("--dataset", o.dataset, "dataset CSV");
    eval->add_option("--reports", o.reports, "directory for eval-metrics.json");

    auto* bypass = app.add_subcommand("bypass", "run every circumvention strategy against every paywalled site");
    bypass->add_option("--corpus", o.corpus, "corpus directory");
    bypass->add_option("--reports", o.reports, "directory for bypass.json");
    bypass->add_option("--strategy", o.strategies, "strategy name (repeatable; default: the standard nine)");

    auto* gen_archive = app.add_subcommand("gen-archive", "generate synthetic archives with known adoption dates");
    gen_archive->add_option("--out", o.archive, "archive directory");
    gen_archive->add_option("--sites", o.sites, "number of archived sites");
    gen_archive->add_option("--seed", o.seed, "seed");

    auto* adoption = app.add_subcommand("adoption", "date paywall adoption from archived versions");
    adoption->add_option("--archive", o.archive, "archive directory");
    adoption->add_option("--filter-list", o.filter_list, "filter list (default: <archive>/filters.txt)");
    adoption->add_option("--reports", o.reports, "directory for adoption.json");
    adoption->add_option("--seed", o.seed, "seed echoed into the report");

    auto* report = app.add_subcommand("report", "summarize the artifacts in a report directory");
    report->add_option("--reports", o.reports, "report directory");

    std::vector<std::string> argv_store;
    argv_store.reserve(args.size() + 1);
    argv_store.push_back("paywall-lab");
    argv_store.insert(argv_store.end(), args.begin(), args.end());
    std::vector<const char*> argv;
    for (const auto& a : argv_store) argv.push_back(a.c_str());

    try {
        app.parse(static_cast<int>(argv.size()), argv.data());
    } catch (const CLI::ParseError& e) {
        const int code = app.exit(e, out, err);
        return code == 0 ? kExitOk : kExitUsage;
    }

    try {
        if (!o.config_file.empty()) o.cfg = load_run_config(o.config_file);
        auto* sub = app.get_subcommands().front();
        const Merger m(*sub);
        if (o.cfg.seed) {
            if (!m.given("--seed")) o.seed = *o.cfg.seed;
        }
        m.path("--corpus", o.corpus, o.cfg.corpus);
        m.path("--gencfg", o.gencfg, o.cfg.gencfg);
        m.path("--lexicon", o.lexicon, o.cfg.lexicon);
        m.path("--dataset", o.dataset, o.cfg.dataset);
        m.path("--model", o.model, o.cfg.model);
        m.path("--reports", o.reports, o.cfg.reports);
        if (sub == crawl || sub == extract) m.path(sub == crawl ? "--out" : "--crawl", o.crawl, o.cfg.crawl);
        if (sub == extract && !m.given("--out") && o.cfg.dataset) o.dataset = *o.cfg.dataset;
        if (sub == train && o.cfg.train) {
            const auto& t = *o.cfg.train;
            if (!m.given("--trees")) o.train.n_trees = t.n_trees;
            if (!m.given("--folds")) o.train.k_folds = t.k_folds;
            if (!m.given("--max-depth")) o.train.max_depth = t.max_depth;
            if (!m.given("--min-leaf")) o.train.min_leaf = t.min_leaf;
            if (!m.given("--seed")) o.train.seed = t.seed;
            o.train.features_per_split = t.features_per_split;
            o.train.bootstrap = t.bootstrap;
        }

        if (sub == gen) return cmd_gen_corpus(o, out);
        if (sub == serve) return cmd_serve(o, out);
        if (sub == crawl) return cmd_crawl(o, out);
        if (sub == extract) return cmd_extract(o, out);
        if (sub == train) return cmd_train(o, out);
        if (sub == eval) return cmd_eval(o, out);
        if (sub == bypass) return cmd_bypass(o, out);
        if (sub == gen_archive) return cmd_gen_archive(o, out);
        if (sub == adoption) return cmd_adoption(o, out);
        if (sub == report) return cmd_report(o, out);
        return kExitUsage;
    } catch (const Error& e) {
        err << "pwlab: error[" << e.code() << "]: " << one_line(e.what()) << "\n";
        return exit_code_for(e.code());
    } catch (const std::exception& e) {
        err << "pwlab: error[Internal]: " << one_line(e.what()) << "\n";
        return kExitRuntime;
    }
}

}  // namespace pwlab::cli
