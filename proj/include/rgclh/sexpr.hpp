#pragma once

#include <cctype>
#include <stdexcept>
#include <string>
#include <string_view>
#include <vector>

namespace rgclh {

class ParseError : public std::runtime_error {
public:
    ParseError(const std::string& what, int line)
        : std::runtime_error("line " + std::to_string(line) + ": " + what), line_(line)
    {
    }
    int line() const noexcept { return line_; }

private:
    int line_;
};

/// A parsed s-expression: either an atom or a list of s-expressions.
struct SExpr {
    bool atom = false;
    std::string text;
    std::vector<SExpr> items;
    int line = 0;

    bool is_atom(std::string_view s) const { return atom && text == s; }
    bool is_list() const { return !atom; }

    /// True for a list whose first item is the atom `head`.
    bool is_form(std::string_view head) const { return !atom && !items.empty() && items[0].is_atom(head); }

    const std::string& head() const
    {
        if (atom || items.empty() || !items[0].atom) {
            throw ParseError("expected a form with a head symbol", line);
        }
        return items[0].text;
    }

    std::string str() const
    {
        if (atom) {
            return text;
        }
        std::string s = "(";
        for (std::size_t k = 0; k < items.size(); ++k) {
            if (k) {
                s += ' ';
            }
            s += items[k].str();
        }
        return s + ")";
    }
};

namespace detail {

class SExprReader {
public:
    explicit SExprReader(std::string_view src) : src_(src) {}

    std::vector<SExpr> read_all()
    {
        std::vector<SExpr> out;
        skip();
        while (pos_ < src_.size()) {
            out.push_back(read());
            skip();
        }
        return out;
    }

private:
    void skip()
    {
        while (pos_ < src_.size()) {
            char c = src_[pos_];
            if (c == '\n') {
                ++line_;
                ++pos_;
            } else if (std::isspace(static_cast<unsigned char>(c))) {
                ++pos_;
            } else if (c == ';') {
                while (pos_ < src_.size() && src_[pos_] != '\n') {
                    ++pos_;
                }
            } else {
                break;
            }
        }
    }

    SExpr read()
    {
        skip();
        if (pos_ >= src_.size()) {
            throw ParseError("unexpected end of input", line_);
        }
        char c = src_[pos_];
        if (c == ')') {
            throw ParseError("unbalanced ')'", line_);
        }
        if (c == '(') {
            SExpr e;
            e.line = line_;
            ++pos_;
            while (true) {
                skip();
                if (pos_ >= src_.size()) {
                    throw ParseError("missing ')'", e.line);
                }
                if (src_[pos_] == ')') {
                    ++pos_;
                    return e;
                }
                e.items.push_back(read());
            }
        }
        SExpr a;
        a.atom = true;
        a.line = line_;
        if (c == '"') {
            ++pos_;
            std::size_t start = pos_;
            while (pos_ < src_.size() && src_[pos_] != '"') {
                ++pos_;
            }
            if (pos_ >= src_.size()) {
                throw ParseError("unterminated string", a.line);
            }
            a.text = std::string(src_.substr(start, pos_ - start));
            ++pos_;
            return a;
        }
        std::size_t start = pos_;
        while (pos_ < src_.size()) {
            char d = src_[pos_];
            if (std::isspace(static_cast<unsigned char>(d)) || d == '(' || d == ')' || d == ';') {
                break;
            }
            ++pos_;
        }
        a.text = std::string(src_.substr(start, pos_ - start));
        return a;
    }

    std::string_view src_;
    std::size_t pos_ = 0;
    int line_ = 1;
};

}  // namespace detail

inline std::vector<SExpr> parse_sexprs(std::string_view src) { return detail::SExprReader(src).read_all(); }

inline SExpr parse_sexpr(std::string_view src)
{
    auto all = parse_sexprs(src);
    if (all.size() != 1) {
        throw ParseError("expected exactly one expression, found " + std::to_string(all.size()), 1);
    }
    return std::move(all.front());
}

}  // namespace rgclh
