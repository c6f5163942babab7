#include "pwlab/html.hpp"

#include <algorithm>
#include <array>
#include <cctype>
#include <charconv>

#include "pwlab/text.hpp"

namespace pwlab::html {

std::optional<std::string> Element::attr(std::string_view name) const {
    for (const auto& [k, v] : attrs) {
        if (k == name) return v;
    }
    return std::nullopt;
}

void Element::set_attr(std::string_view name, std::string value) {
    for (auto& [k, v] : attrs) {
        if (k == name) {
            v = std::move(value);
            return;
        }
    }
    attrs.emplace_back(std::string(name), std::move(value));
}

Element& Element::append(std::unique_ptr<Element> child) {
    child->parent = this;
    children.push_back(std::move(child));
    return *children.back();
}

std::unique_ptr<Element> Element::remove(const Element* child) {
    auto it = std::find_if(children.begin(), children.end(), [&](const auto& c) { return c.get() == child; });
    if (it == children.end()) return nullptr;
    auto out = std::move(*it);
    children.erase(it);
    out->parent = nullptr;
    return out;
}

std::string Element::inner_text() const {
    std::vector<std::string> parts;
    walk(*this, [&](const Element& e) {
        if (e.is_text()) parts.push_back(e.text);
    });
    return text::join(parts, " ");
}

namespace {

constexpr std::array<std::string_view, 14> kVoid = {"area", "base", "br",   "col",   "embed",  "hr",    "img",
                                                    "input", "link", "meta", "param", "source", "track", "wbr"};
constexpr std::array<std::string_view, 3> kRawText = {"script", "style", "textarea"};
// Start tags that implicitly close an open element of the same name.
constexpr std::array<std::string_view, 4> kSelfNesting = {"p", "li", "option", "tr"};

bool contains(auto const& arr, std::string_view s) { return std::find(arr.begin(), arr.end(), s) != arr.end(); }

bool is_space(char c) { return c == ' ' || c == '\t' || c == '\n' || c == '\r' || c == '\f'; }

void append_utf8(std::string& out, unsigned cp) {
    if (cp < 0x80) {
        out.push_back(static_cast<char>(cp));
    } else if (cp < 0x800) {
        out.push_back(static_cast<char>(0xC0 | (cp >> 6)));
        out.push_back(static_cast<char>(0x80 | (cp & 0x3F)));
    } else if (cp < 0x10000) {
        out.push_back(static_cast<char>(0xE0 | (cp >> 12)));
        out.push_back(static_cast<char>(0x80 | ((cp >> 6) & 0x3F)));
        out.push_back(static_cast<char>(0x80 | (cp & 0x3F)));
    } else {
        out.push_back(static_cast<char>(0xF0 | (cp >> 18)));
        out.push_back(static_cast<char>(0x80 | ((cp >> 12) & 0x3F)));
        out.push_back(static_cast<char>(0x80 | ((cp >> 6) & 0x3F)));
        out.push_back(static_cast<char>(0x80 | (cp & 0x3F)));
    }
}

class Parser {
public:
    explicit Parser(std::string_view s) : s_(s) {}

    std::unique_ptr<Element> run() {
        auto doc = std::make_unique<Element>();
        doc->tag = "#document";
        stack_.push_back(doc.get());
        while (pos_ < s_.size()) {
            if (s_[pos_] == '<') {
                if (starts("<!--")) {
                    skip_past("-->");
                } else if (starts("<!") || starts("<?")) {
                    skip_past(">");
                } else if (starts("</")) {
                    end_tag();
                } else if (pos_ + 1 < s_.size() && std::isalpha(static_cast<unsigned char>(s_[pos_ + 1]))) {
                    start_tag();
                } else {
                    text_until_tag();
                }
            } else {
                text_until_tag();
            }
        }
        return doc;
    }

private:
    bool starts(std::string_view p) const { return s_.substr(pos_, p.size()) == p; }

    void skip_past(std::string_view end) {
        auto at = s_.find(end, pos_);
        pos_ = at == std::string_view::npos ? s_.size() : at + end.size();
    }

    Element& top() { return *stack_.back(); }

    void add_text(std::string_view raw, bool decode) {
        auto t = text::trim(collapse(decode ? decode_entities(raw) : std::string(raw)));
        if (t.empty()) return;
        auto node = std::make_unique<Element>();
        node->tag = "#text";
        node->text = std::move(t);
        top().append(std::move(node));
    }

    static std::string collapse(std::string_view s) {
        std::string out;
        bool space = false;
        for (char c : s) {
            if (is_space(c)) {
                space = true;
                continue;
            }
            if (space && !out.empty()) out.push_back(' ');
            space = false;
            out.push_back(c);
        }
        if (space) out.push_back(' ');
        return out;
    }

    void text_until_tag() {
        auto next = s_.find('<', pos_ + 1);
        if (next == std::string_view::npos) next = s_.size();
        add_text(s_.substr(pos_, next - pos_), true);
        pos_ = next;
    }

    std::string read_name() {
        std::string name;
        while (pos_ < s_.size() && !is_space(s_[pos_]) && s_[pos_] != '>' && s_[pos_] != '/' && s_[pos_] != '=') {
            name.push_back(s_[pos_++]);
        }
        return text::to_lower(name);
    }

    void skip_spaces() {
        while (pos_ < s_.size() && is_space(s_[pos_])) ++pos_;
    }

    void start_tag() {
        ++pos_;  // '<'
        auto node = std::make_unique<Element>();
        node->tag = read_name();
        bool self_closing = false;
        while (pos_ < s_.size()) {
            skip_spaces();
            if (pos_ >= s_.size()) break;
            if (s_[pos_] == '>') {
                ++pos_;
                break;
            }
            if (s_[pos_] == '/') {
                self_closing = true;
                ++pos_;
                continue;
            }
            auto name = read_name();
            if (name.empty()) {
                ++pos_;
                continue;
            }
            skip_spaces();
            std::string value;
            if (pos_ < s_.size() && s_[pos_] == '=') {
                ++pos_;
                skip_spaces();
                if (pos_ < s_.size() && (s_[pos_] == '"' || s_[pos_] == '\'')) {
                    const char q = s_[pos_++];
                    auto end = s_.find(q, pos_);
                    if (end == std::string_view::npos) end = s_.size();
                    value = decode_entities(s_.substr(pos_, end - pos_));
                    pos_ = std::min(end + 1, s_.size());
                } else {
                    while (pos_ < s_.size() && !is_space(s_[pos_]) && s_[pos_] != '>') value.push_back(s_[pos_++]);
                    value = decode_entities(value);
                }
            }
            if (!node->attr(name)) node->attrs.emplace_back(std::move(name), std::move(value));
        }

        const auto tag = node->tag;
        if (contains(kSelfNesting, tag) && top().tag == tag) stack_.pop_back();
        Element& el = top().append(std::move(node));
        if (contains(kVoid, tag) || self_closing) return;
        if (contains(kRawText, tag)) {
            const std::string close = "</" + tag;
            std::size_t end = pos_;
            while (true) {
                end = s_.find("</", end);
                if (end == std::string_view::npos) break;
                if (text::starts_with_ci(s_.substr(end), close)) break;
                end += 2;
            }
            if (end == std::string_view::npos) end = s_.size();
            stack_.push_back(&el);
            add_text(s_.substr(pos_, end - pos_), tag == "textarea");
            stack_.pop_back();
            pos_ = end;
            if (pos_ < s_.size()) skip_past(">");
            return;
        }
        stack_.push_back(&el);
    }

    void end_tag() {
        pos_ += 2;
        auto name = read_name();
        skip_past(">");
        for (std::size_t i = stack_.size(); i-- > 1;) {
            if (stack_[i]->tag == name) {
                stack_.resize(i);
                return;
            }
        }
        // Unmatched end tags are ignored.
    }

    std::string_view s_;
    std::size_t pos_ = 0;
    std::vector<Element*> stack_;
};

}  // namespace

std::string decode_entities(std::string_view s) {
    std::string out;
    out.reserve(s.size());
    for (std::size_t i = 0; i < s.size(); ++i) {
        if (s[i] != '&') {
            out.push_back(s[i]);
            continue;
        }
        auto semi = s.find(';', i);
        if (semi == std::string_view::npos || semi - i > 10) {
            out.push_back('&');
            continue;
        }
        auto name = s.substr(i + 1, semi - i - 1);
        unsigned cp = 0;
        bool ok = true;
        if (!name.empty() && name[0] == '#') {
            const bool hex = name.size() > 1 && (name[1] == 'x' || name[1] == 'X');
            auto digits = name.substr(hex ? 2 : 1);
            auto [p, ec] = std::from_chars(digits.data(), digits.data() + digits.size(), cp, hex ? 16 : 10);
            ok = ec == std::errc{} && p == digits.data() + digits.size() && !digits.empty() && cp < 0x110000;
        } else if (name == "amp") {
            cp = '&';
        } else if (name == "lt") {
            cp = '<';
        } else if (name == "gt") {
            cp = '>';
        } else if (name == "quot") {
            cp = '"';
        } else if (name == "apos") {
            cp = '\'';
        } else if (name == "nbsp") {
            cp = ' ';
        } else {
            ok = false;
        }
        if (!ok) {
            out.push_back('&');
            continue;
        }
        append_utf8(out, cp);
        i = semi;
    }
    return out;
}

std::unique_ptr<Element> parse(std::string_view source) {
    auto doc = Parser(source).run();
    std::unique_ptr<Element> root;
    for (auto& c : doc->children) {
        if (c->tag == "html") {
            root = std::move(c);
            break;
        }
    }
    if (!root) {
        root = std::make_unique<Element>();
        root->tag = "html";
    }
    // Adopt anything that landed outside <html>.
    std::vector<std::unique_ptr<Element>> stray;
    for (auto& c : doc->children) {
        if (c) stray.push_back(std::move(c));
    }
    for (auto& c : stray) root->append(std::move(c));
    root->parent = nullptr;
    return root;
}

std::vector<std::unique_ptr<Element>> parse_fragment(std::string_view source) {
    auto doc = Parser(source).run();
    std::vector<std::unique_ptr<Element>> out;
    for (auto& c : doc->children) {
        c->parent = nullptr;
        out.push_back(std::move(c));
    }
    return out;
}

Element* find_first(Element& root, std::string_view tag) {
    if (root.tag == tag) return &root;
    for (auto& c : root.children) {
        if (auto* f = find_first(*c, tag)) return f;
    }
    return nullptr;
}

std::vector<Element*> find_all(Element& root, std::string_view tag) {
    std::vector<Element*> out;
    walk(root, [&](Element& e) {
        if (e.tag == tag) out.push_back(&e);
    });
    return out;
}

}  // namespace pwlab::html
