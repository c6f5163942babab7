#pragma once

// Phrase lexicon for the text features: three groups (subscribe, signup,
// remaining), each a list of phrases per language tag.

#include <map>
#include <string>
#include <string_view>
#include <vector>

namespace pwlab {

struct PhraseGroup {
    std::string name;
    std::map<std::string, std::vector<std::string>> phrases;  // language tag -> normalized phrases

    /// Case-insensitive substring match over whitespace-normalized text.
    bool matches(std::string_view text) const;
};

struct Lexicon {
    std::vector<PhraseGroup> groups;  // always subscribe, signup, remaining

    static Lexicon english_default();
    /// Throws ConfigError unless the three groups are present, in order,
    /// each with at least one non-empty phrase.
    void validate() const;
};

inline constexpr std::string_view kLexiconGroups[] = {"subscribe", "signup", "remaining"};

std::string serialize_lexicon(const Lexicon& lex);
Lexicon deserialize_lexicon(std::string_view bytes);

}  // namespace pwlab
