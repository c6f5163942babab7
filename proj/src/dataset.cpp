#include "pwlab/dataset.hpp"

#include <charconv>
#include <cmath>

#include "pwlab/errors.hpp"
#include "pwlab/text.hpp"
#include "pwlab/version.hpp"

namespace pwlab {

std::vector<const FeatureVector*> Dataset::labeled() const {
    std::vector<const FeatureVector*> out;
    for (const auto& r : rows) {
        if (r.label) out.push_back(&r);
    }
    return out;
}

std::string serialize_dataset(const Dataset& ds) {
    std::string out = "# " + std::string(kDatasetFormat) + " registry=" + ds.registry +
                      " seed=" + std::to_string(ds.seed) + " tool=" + kToolVersion + "\n";
    out += "site_id";
    for (const auto& n : feature_names()) out += "," + n;
    out += ",label\n";
    for (const auto& r : ds.rows) {
        out += r.site_id;
        for (double v : r.values) out += "," + text::format_double(v);
        out += ",";
        if (r.label) out += *r.label ? "1" : "0";
        out += "\n";
    }
    return out;
}

namespace {

std::string header_value(const std::string& line, std::string_view key) {
    const auto needle = " " + std::string(key) + "=";
    const auto at = line.find(needle);
    if (at == std::string::npos) return "";
    const auto start = at + needle.size();
    return line.substr(start, line.find(' ', start) - start);
}

}  // namespace

Dataset deserialize_dataset(std::string_view bytes) {
    auto lines = text::split(bytes, '\n');
    while (!lines.empty() && text::trim(lines.back()).empty()) lines.pop_back();
    if (lines.size() < 2 || lines[0].rfind("# ", 0) != 0) throw ParseError("dataset: missing header comment");
    const auto& meta = lines[0];
    if (meta.rfind("# " + std::string(kDatasetFormat) + " ", 0) != 0) {
        throw VersionMismatch("dataset: expected format " + std::string(kDatasetFormat));
    }
    Dataset ds;
    ds.registry = header_value(meta, "registry");
    if (ds.registry != kFeatureRegistry) {
        throw RegistryMismatch("dataset registry '" + ds.registry + "', expected '" + kFeatureRegistry + "'");
    }
    const auto seed_text = header_value(meta, "seed");
    auto [p, ec] = std::from_chars(seed_text.data(), seed_text.data() + seed_text.size(), ds.seed);
    if (ec != std::errc{} || seed_text.empty()) throw SchemaError("dataset: header seed is not an integer");

    const auto cols = text::split(lines[1], ',');
    const auto& names = feature_names();
    if (cols.size() != names.size() + 2 || cols.front() != "site_id" || cols.back() != "label") {
        throw RegistryMismatch("dataset columns do not match " + std::string(kFeatureRegistry));
    }
    for (std::size_t i = 0; i < names.size(); ++i) {
        if (cols[i + 1] != names[i]) throw RegistryMismatch("dataset column " + cols[i + 1] + " is not " + names[i]);
    }
    for (std::size_t li = 2; li < lines.size(); ++li) {
        const auto where = "dataset line " + std::to_string(li + 1);
        const auto f = text::split(lines[li], ',');
        if (f.size() != cols.size()) throw SchemaError(where + ": expected " + std::to_string(cols.size()) + " fields");
        FeatureVector fv;
        fv.site_id = f[0];
        for (std::size_t i = 1; i + 1 < f.size(); ++i) {
            double v = 0;
            auto [q, e] = std::from_chars(f[i].data(), f[i].data() + f[i].size(), v);
            if (e != std::errc{} || q != f[i].data() + f[i].size() || !std::isfinite(v)) {
                throw SchemaError(where + ": column " + cols[i] + " is not a finite number");
            }
            fv.values.push_back(v);
        }
        const auto& label = f.back();
        if (label == "1") {
            fv.label = true;
        } else if (label == "0") {
            fv.label = false;
        } else if (!label.empty()) {
            throw SchemaError(where + ": label must be 1, 0 or empty");
        }
        ds.rows.push_back(std::move(fv));
    }
    return ds;
}

}  // namespace pwlab
