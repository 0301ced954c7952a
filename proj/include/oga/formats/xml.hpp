#pragma once

// Minimal non-validating XML reader: elements, attributes, character data,
// CDATA, comments, processing instructions and a skipped DOCTYPE. Enough for
// GraphML. No namespace processing; `prefix:name` is kept as written.

#include <oga/formats/common.hpp>

#include <cstdint>
#include <memory>
#include <string>
#include <string_view>
#include <utility>
#include <vector>

namespace oga::formats::xml {

struct Element;

struct Node {
    // Exactly one of these is set.
    std::unique_ptr<Element> element;
    std::string text;
};

struct Element {
    std::string name;
    std::vector<std::pair<std::string, std::string>> attributes;
    std::vector<Node> children;
    std::size_t offset = 0;
    /// Byte span of everything between the start and end tag.
    std::size_t inner_begin = 0;
    std::size_t inner_end = 0;

    std::string_view local_name() const {
        auto colon = name.find(':');
        return colon == std::string::npos ? std::string_view(name) : std::string_view(name).substr(colon + 1);
    }

    const std::string* attribute(std::string_view key) const {
        for (const auto& [k, v] : attributes)
            if (k == key) return &v;
        return nullptr;
    }

    bool has_element_children() const {
        for (const auto& c : children)
            if (c.element) return true;
        return false;
    }

    /// Concatenated character data of direct children.
    std::string text() const {
        std::string out;
        for (const auto& c : children)
            if (!c.element) out += c.text;
        return out;
    }
};

inline void append_utf8(std::string& out, std::uint32_t cp) {
    if (cp < 0x80) {
        out += static_cast<char>(cp);
    } else if (cp < 0x800) {
        out += static_cast<char>(0xC0 | (cp >> 6));
        out += static_cast<char>(0x80 | (cp & 0x3F));
    } else if (cp < 0x10000) {
        out += static_cast<char>(0xE0 | (cp >> 12));
        out += static_cast<char>(0x80 | ((cp >> 6) & 0x3F));
        out += static_cast<char>(0x80 | (cp & 0x3F));
    } else {
        out += static_cast<char>(0xF0 | (cp >> 18));
        out += static_cast<char>(0x80 | ((cp >> 12) & 0x3F));
        out += static_cast<char>(0x80 | ((cp >> 6) & 0x3F));
        out += static_cast<char>(0x80 | (cp & 0x3F));
    }
}

inline std::string escape(std::string_view s, bool attribute) {
    std::string out;
    out.reserve(s.size());
    for (char c : s) {
        switch (c) {
        case '&': out += "&amp;"; break;
        case '<': out += "&lt;"; break;
        case '>': out += "&gt;"; break;
        case '"':
            if (attribute) out += "&quot;";
            else out += c;
            break;
        case '\r': out += "&#13;"; break;
        case '\n':
            if (attribute) out += "&#10;";
            else out += c;
            break;
        case '\t':
            if (attribute) out += "&#9;";
            else out += c;
            break;
        default: out += c;
        }
    }
    return out;
}

class Reader {
public:
    explicit Reader(std::string_view text) : text_(text), lines_(text) {}

    std::unique_ptr<Element> read_document() {
        if (text_.substr(0, 3) == "\xEF\xBB\xBF") pos_ = 3;
        skip_misc(true);
        if (pos_ >= text_.size() || text_[pos_] != '<') lines_.fail(pos_, "expected root element");
        auto root = read_element(0);
        skip_misc(false);
        if (pos_ < text_.size()) lines_.fail(pos_, "content after root element");
        return root;
    }

    const detail::LineIndex& lines() const { return lines_; }
    std::string_view source() const { return text_; }

private:
    static constexpr int max_depth = 256;

    bool starts_with(std::string_view s) const { return text_.compare(pos_, s.size(), s) == 0; }

    void skip_space() {
        while (pos_ < text_.size() && detail::is_blank(text_[pos_])) ++pos_;
    }

    void skip_past(std::string_view terminator, const char* what) {
        auto end = text_.find(terminator, pos_);
        if (end == std::string_view::npos) lines_.fail(pos_, std::string("unterminated ") + what);
        pos_ = end + terminator.size();
    }

    /// Whitespace, comments, PIs, and (in the prolog) a DOCTYPE.
    void skip_misc(bool prolog) {
        for (;;) {
            skip_space();
            if (starts_with("<!--")) {
                skip_past("-->", "comment");
            } else if (starts_with("<?")) {
                skip_past("?>", "processing instruction");
            } else if (prolog && starts_with("<!DOCTYPE")) {
                int depth = 0;
                for (; pos_ < text_.size(); ++pos_) {
                    char c = text_[pos_];
                    if (c == '[') ++depth;
                    else if (c == ']') --depth;
                    else if (c == '>' && depth <= 0) break;
                }
                if (pos_ >= text_.size()) lines_.fail(pos_, "unterminated DOCTYPE");
                ++pos_;
            } else {
                return;
            }
        }
    }

    static bool is_name_start(char c) {
        return (c >= 'A' && c <= 'Z') || (c >= 'a' && c <= 'z') || c == '_' || c == ':' ||
               static_cast<unsigned char>(c) >= 0x80;
    }
    static bool is_name_char(char c) {
        return is_name_start(c) || detail::is_digit(c) || c == '-' || c == '.';
    }

    std::string read_name() {
        if (pos_ >= text_.size() || !is_name_start(text_[pos_])) lines_.fail(pos_, "expected a name");
        std::size_t b = pos_;
        while (pos_ < text_.size() && is_name_char(text_[pos_])) ++pos_;
        return std::string(text_.substr(b, pos_ - b));
    }

    void decode_reference(std::string& out) {
        std::size_t start = pos_;
        auto semi = text_.find(';', pos_);
        if (semi == std::string_view::npos || semi - pos_ > 12) lines_.fail(start, "malformed entity reference");
        std::string_view ref = text_.substr(pos_ + 1, semi - pos_ - 1);
        if (ref == "amp") out += '&';
        else if (ref == "lt") out += '<';
        else if (ref == "gt") out += '>';
        else if (ref == "quot") out += '"';
        else if (ref == "apos") out += '\'';
        else if (!ref.empty() && ref[0] == '#') {
            std::uint32_t cp = 0;
            bool hex = ref.size() > 1 && (ref[1] == 'x' || ref[1] == 'X');
            std::string_view digits = ref.substr(hex ? 2 : 1);
            if (digits.empty()) lines_.fail(start, "malformed character reference");
            for (char c : digits) {
                int v;
                if (detail::is_digit(c)) v = c - '0';
                else if (hex && c >= 'a' && c <= 'f') v = c - 'a' + 10;
                else if (hex && c >= 'A' && c <= 'F') v = c - 'A' + 10;
                else lines_.fail(start, "malformed character reference");
                cp = cp * (hex ? 16 : 10) + static_cast<std::uint32_t>(v);
                if (cp > 0x10FFFF) lines_.fail(start, "character reference out of range");
            }
            append_utf8(out, cp);
        } else {
            lines_.fail(start, "unknown entity '&" + std::string(ref) + ";'");
        }
        pos_ = semi + 1;
    }

    std::unique_ptr<Element> read_element(int depth) {
        if (depth > max_depth) lines_.fail(pos_, "elements nested too deeply");
        auto el = std::make_unique<Element>();
        el->offset = pos_;
        ++pos_; // '<'
        el->name = read_name();
        for (;;) {
            std::size_t before = pos_;
            skip_space();
            if (pos_ >= text_.size()) lines_.fail(pos_, "unterminated start tag");
            if (starts_with("/>")) {
                pos_ += 2;
                el->inner_begin = el->inner_end = pos_;
                return el;
            }
            if (text_[pos_] == '>') {
                ++pos_;
                break;
            }
            if (before == pos_) lines_.fail(pos_, "expected whitespace before attribute");
            std::string key = read_name();
            skip_space();
            if (pos_ >= text_.size() || text_[pos_] != '=') lines_.fail(pos_, "expected '=' after attribute name");
            ++pos_;
            skip_space();
            if (pos_ >= text_.size() || (text_[pos_] != '"' && text_[pos_] != '\''))
                lines_.fail(pos_, "expected quoted attribute value");
            char quote = text_[pos_++];
            std::string value;
            for (;;) {
                if (pos_ >= text_.size()) lines_.fail(pos_, "unterminated attribute value");
                char c = text_[pos_];
                if (c == quote) {
                    ++pos_;
                    break;
                }
                if (c == '<') lines_.fail(pos_, "'<' in attribute value");
                if (c == '&') {
                    decode_reference(value);
                } else {
                    value += c;
                    ++pos_;
                }
            }
            if (el->attribute(key)) lines_.fail(before, "duplicate attribute '" + key + "'");
            el->attributes.emplace_back(std::move(key), std::move(value));
        }

        el->inner_begin = pos_;
        std::string text;
        auto flush_text = [&] {
            if (!text.empty()) {
                el->children.push_back(Node{nullptr, std::move(text)});
                text.clear();
            }
        };
        for (;;) {
            if (pos_ >= text_.size()) lines_.fail(el->offset, "element '" + el->name + "' is not closed");
            char c = text_[pos_];
            if (c == '<') {
                if (starts_with("</")) {
                    el->inner_end = pos_;
                    std::size_t tag = pos_;
                    pos_ += 2;
                    std::string name = read_name();
                    if (name != el->name)
                        lines_.fail(tag, "mismatched end tag '" + name + "', expected '" + el->name + "'");
                    skip_space();
                    if (pos_ >= text_.size() || text_[pos_] != '>') lines_.fail(pos_, "expected '>'");
                    ++pos_;
                    flush_text();
                    return el;
                }
                if (starts_with("<!--")) {
                    skip_past("-->", "comment");
                } else if (starts_with("<![CDATA[")) {
                    pos_ += 9;
                    auto end = text_.find("]]>", pos_);
                    if (end == std::string_view::npos) lines_.fail(pos_, "unterminated CDATA section");
                    text.append(text_.substr(pos_, end - pos_));
                    pos_ = end + 3;
                } else if (starts_with("<?")) {
                    skip_past("?>", "processing instruction");
                } else if (starts_with("<!")) {
                    lines_.fail(pos_, "unexpected markup declaration");
                } else {
                    flush_text();
                    el->children.push_back(Node{read_element(depth + 1), {}});
                }
            } else if (c == '&') {
                decode_reference(text);
            } else {
                text += c;
                ++pos_;
            }
        }
    }

    std::string_view text_;
    detail::LineIndex lines_;
    std::size_t pos_ = 0;
};

} // namespace oga::formats::xml
