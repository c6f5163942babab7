#include "pwlab/lexicon.hpp"

#include "json_util.hpp"
#include "pwlab/errors.hpp"
#include "pwlab/text.hpp"
#include "pwlab/version.hpp"

namespace pwlab {

bool PhraseGroup::matches(std::string_view raw) const {
    const auto haystack = text::normalize(raw);
    for (const auto& [lang, list] : phrases) {
        for (const auto& p : list) {
            if (!p.empty() && haystack.find(p) != std::string::npos) return true;
        }
    }
    return false;
}

Lexicon Lexicon::english_default() {
    return Lexicon{{{"subscribe", {{"en", {"subscribe"}}}},
                    {"signup", {{"en", {"sign up"}}}},
                    {"remaining", {{"en", {"remaining"}}}}}};
}

void Lexicon::validate() const {
    if (groups.size() != std::size(kLexiconGroups)) throw ConfigError("lexicon must have exactly three phrase groups");
    for (std::size_t i = 0; i < groups.size(); ++i) {
        if (groups[i].name != kLexiconGroups[i]) {
            throw ConfigError("lexicon group " + std::to_string(i) + " must be '" + std::string(kLexiconGroups[i]) +
                              "'");
        }
        bool any = false;
        for (const auto& [lang, list] : groups[i].phrases) {
            for (const auto& p : list) any = any || !p.empty();
        }
        if (!any) throw ConfigError("lexicon group '" + groups[i].name + "' has no phrases");
    }
}

std::string serialize_lexicon(const Lexicon& lex) {
    nlohmann::ordered_json j;
    j["format"] = kLexiconFormat;
    auto groups = nlohmann::ordered_json::array();
    for (const auto& g : lex.groups) {
        nlohmann::ordered_json gj;
        gj["name"] = g.name;
        nlohmann::ordered_json pj = nlohmann::ordered_json::object();
        for (const auto& [lang, list] : g.phrases) pj[lang] = list;
        gj["phrases"] = std::move(pj);
        groups.push_back(std::move(gj));
    }
    j["groups"] = std::move(groups);
    return j.dump(2) + "\n";
}

Lexicon deserialize_lexicon(std::string_view bytes) {
    const auto j = jsonutil::parse(bytes);
    jsonutil::Reader r(j, "");
    r.expect_format(kLexiconFormat);
    Lexicon lex;
    auto groups = r.arr("groups");
    for (std::size_t i = 0; i < groups.size(); ++i) {
        auto g = groups.obj_at(i);
        PhraseGroup pg;
        pg.name = g.str("name");
        const auto& phrases = g.at("phrases");
        if (!phrases.is_object()) throw SchemaError(g.child("phrases") + ": expected an object");
        for (const auto& [lang, list] : phrases.items()) {
            jsonutil::ArrayReader a(list, g.child("phrases") + "." + lang);
            auto& out = pg.phrases[lang];
            for (std::size_t k = 0; k < a.size(); ++k) out.push_back(text::normalize(a.str_at(k)));
        }
        lex.groups.push_back(std::move(pg));
    }
    try {
        lex.validate();
    } catch (const ConfigError& e) {
        throw SchemaError(e.what());
    }
    return lex;
}

}  // namespace pwlab
