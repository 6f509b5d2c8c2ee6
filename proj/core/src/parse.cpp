#include "parse.hpp"

#include <cctype>
#include <string>

#include <ckp/errors.hpp>
#include <ckp/integrate.hpp>

namespace ckp::detail {

namespace {

class Parser {
public:
    Parser(std::string_view text, bool allow_d) : text_(text), allow_d_(allow_d) {}

    std::map<int, DiffPoly> run() {
        auto out = sum(true);
        skip();
        if (pos_ != text_.size()) fail("unexpected character");
        return out;
    }

private:
    [[noreturn]] void fail(const std::string &what) const {
        throw ParseError(what + " at position " + std::to_string(pos_) + " in '" + std::string(text_) + "'");
    }

    void skip() {
        while (pos_ < text_.size() && std::isspace(static_cast<unsigned char>(text_[pos_]))) ++pos_;
    }

    char peek() {
        skip();
        return pos_ < text_.size() ? text_[pos_] : '\0';
    }

    bool accept(char c) {
        if (peek() != c) return false;
        ++pos_;
        return true;
    }

    bool accept_word(std::string_view w) {
        skip();
        if (text_.substr(pos_, w.size()) != w) return false;
        const std::size_t end = pos_ + w.size();
        if (end < text_.size() && std::isalpha(static_cast<unsigned char>(text_[end]))) return false;
        pos_ = end;
        return true;
    }

    long integer(bool allow_sign) {
        skip();
        const std::size_t start = pos_;
        if (allow_sign && pos_ < text_.size() && (text_[pos_] == '-' || text_[pos_] == '+')) ++pos_;
        while (pos_ < text_.size() && std::isdigit(static_cast<unsigned char>(text_[pos_]))) ++pos_;
        std::string digits(text_.substr(start, pos_ - start));
        if (digits.empty() || digits == "-" || digits == "+") fail("expected integer");
        if (digits.size() > 9) fail("integer too large");
        return std::stol(digits);
    }

    std::map<int, DiffPoly> sum(bool top) {
        std::map<int, DiffPoly> out;
        bool negate = false;
        if (accept('-')) {
            negate = true;
        } else {
            accept('+');
        }
        while (true) {
            auto [order, value] = product(top);
            if (negate) value = -value;
            out[order] += value;
            if (accept('+')) {
                negate = false;
            } else if (accept('-')) {
                negate = true;
            } else {
                break;
            }
        }
        for (auto it = out.begin(); it != out.end();) it = it->second.is_zero() ? out.erase(it) : std::next(it);
        return out;
    }

    std::pair<int, DiffPoly> product(bool top) {
        DiffPoly value(Rational(1));
        int order = 0;
        bool have_d = false;
        do {
            if (have_d) fail("the power of d must be the last factor of a term");
            if (top && allow_d_ && accept_word("d")) {
                have_d = true;
                order = accept('^') ? static_cast<int>(integer(true)) : 1;
                continue;
            }
            value *= factor();
        } while (accept('*'));
        return {order, value};
    }

    DiffPoly factor() {
        DiffPoly base = primary();
        if (accept('^')) {
            const long e = integer(false);
            if (e > 64) fail("exponent too large");
            base = pow(base, static_cast<int>(e));
        }
        return base;
    }

    DiffPoly scalar_sum() {
        auto graded = sum(false);
        if (graded.empty()) return DiffPoly();
        return graded.at(0);
    }

    DiffPoly primary() {
        const char c = peek();
        if (std::isdigit(static_cast<unsigned char>(c))) {
            std::string num = std::to_string(integer(false));
            if (accept('/')) num += "/" + std::to_string(integer(false));
            Rational value(num);
            if (value.get_den() == 0) fail("zero denominator");
            value.canonicalize();
            return DiffPoly(value);
        }
        if (c == '(') {
            ++pos_;
            DiffPoly inner = scalar_sum();
            if (!accept(')')) fail("expected ')'");
            return inner;
        }
        if (accept_word("lam")) {
            if (accept('^')) return DiffPoly(Monomial::lambda(static_cast<int>(integer(true))));
            return DiffPoly(Monomial::lambda(1));
        }
        if (text_.substr(pos_, 2) == "I(") {
            pos_ += 2;
            DiffPoly inner = scalar_sum();
            if (!accept(')')) fail("expected ')' closing I(");
            return integ_.antiderivative(inner);
        }
        if (c == 'q' || c == 'r' || c == 'u') {
            ++pos_;
            const Symbol s = c == 'q' ? Symbol::q : c == 'r' ? Symbol::r : Symbol::u;
            int order = 0;
            if (pos_ < text_.size() && text_[pos_] == '[') {
                ++pos_;
                order = static_cast<int>(integer(false));
                if (pos_ >= text_.size() || text_[pos_] != ']') fail("expected ']'");
                ++pos_;
            } else {
                while (pos_ < text_.size() && text_[pos_] == '\'') {
                    ++order;
                    ++pos_;
                }
            }
            if (pos_ < text_.size() && std::isalnum(static_cast<unsigned char>(text_[pos_]))) fail("unknown symbol");
            return DiffPoly::jet(s, order);
        }
        fail(c == '\0' ? "unexpected end of input" : "unexpected character");
    }

    std::string_view text_;
    bool allow_d_;
    std::size_t pos_ = 0;
    Integrator integ_{16};
};

} // namespace

std::map<int, DiffPoly> parse_graded(std::string_view text, bool allow_d) { return Parser(text, allow_d).run(); }

} // namespace ckp::detail

namespace ckp {

DiffPoly DiffPoly::parse(std::string_view text) {
    auto graded = detail::parse_graded(text, false);
    return graded.empty() ? DiffPoly() : graded.at(0);
}

} // namespace ckp
