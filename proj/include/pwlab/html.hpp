#pragma once

// Small forgiving HTML parser producing a mutable element tree. Covers the
// markup the simulator emits and ordinary hand-written pages: attributes in
// any quoting style, void elements, comments, raw-text script/style, the
// common character references.

#include <memory>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

#include "pwlab/core.hpp"

namespace pwlab::html {

struct Element {
    std::string tag;  // lowercase, or "#text"
    Attributes attrs;
    std::string text;  // text nodes only; whitespace-collapsed
    std::vector<std::unique_ptr<Element>> children;
    Element* parent = nullptr;

    bool is_text() const { return tag == "#text"; }
    std::optional<std::string> attr(std::string_view name) const;
    void set_attr(std::string_view name, std::string value);
    Element& append(std::unique_ptr<Element> child);
    /// Removes `child` and returns it.
    std::unique_ptr<Element> remove(const Element* child);

    /// Concatenated descendant text, nodes joined by one space.
    std::string inner_text() const;
};

/// Always returns an "html" root; content outside <html> is adopted into it.
std::unique_ptr<Element> parse(std::string_view source);

/// Parses a fragment; returns the top-level nodes.
std::vector<std::unique_ptr<Element>> parse_fragment(std::string_view source);

/// Pre-order traversal helpers.
template <class F>
void walk(Element& e, F&& f) {
    f(e);
    for (auto& c : e.children) walk(*c, f);
}
template <class F>
void walk(const Element& e, F&& f) {
    f(e);
    for (const auto& c : e.children) walk(static_cast<const Element&>(*c), f);
}

Element* find_first(Element& root, std::string_view tag);
std::vector<Element*> find_all(Element& root, std::string_view tag);

std::string decode_entities(std::string_view s);

}  // namespace pwlab::html
