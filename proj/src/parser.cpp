#include "agcal/parser.hpp"

#include <cctype>
#include <cstdlib>
#include <optional>

#include "agcal/errors.hpp"

namespace agcal {

namespace {

struct Token {
    enum Type { Ident, Int, Float, Punct, End } type = End;
    std::string text;
    std::int64_t intValue = 0;
    double floatValue = 0.0;
    std::size_t pos = 0;
};

class Lexer {
public:
    explicit Lexer(const std::string& src) : src_(src) {}

    // k tokens ahead; 0 is the current token.
    const Token& peek(std::size_t k = 0) {
        while (buf_.size() <= k) buf_.push_back(lexOne());
        return buf_[k];
    }

    Token take() {
        const Token t = peek();
        buf_.erase(buf_.begin());
        return t;
    }

private:
    Token lexOne() {
        while (i_ < src_.size() && std::isspace(static_cast<unsigned char>(src_[i_]))) ++i_;
        Token tok;
        tok.pos = i_;
        if (i_ >= src_.size()) { tok.type = Token::End; return tok; }
        const char c = src_[i_];
        if (std::isalpha(static_cast<unsigned char>(c)) || c == '_') {
            std::size_t j = i_;
            while (j < src_.size() &&
                   (std::isalnum(static_cast<unsigned char>(src_[j])) || src_[j] == '_'))
                ++j;
            tok.type = Token::Ident;
            tok.text = src_.substr(i_, j - i_);
            i_ = j;
            return tok;
        }
        if (std::isdigit(static_cast<unsigned char>(c))) {
            std::size_t j = i_;
            bool isFloat = false;
            while (j < src_.size() && std::isdigit(static_cast<unsigned char>(src_[j]))) ++j;
            if (j < src_.size() && src_[j] == '.') {
                isFloat = true;
                ++j;
                while (j < src_.size() && std::isdigit(static_cast<unsigned char>(src_[j]))) ++j;
            }
            // Scientific suffix, but only when digits follow: "1e-3" is a
            // float while "3eps" must stay Int followed by Ident.
            if (j < src_.size() && (src_[j] == 'e' || src_[j] == 'E')) {
                std::size_t k = j + 1;
                if (k < src_.size() && (src_[k] == '+' || src_[k] == '-')) ++k;
                if (k < src_.size() && std::isdigit(static_cast<unsigned char>(src_[k]))) {
                    isFloat = true;
                    ++k;
                    while (k < src_.size() && std::isdigit(static_cast<unsigned char>(src_[k]))) ++k;
                    j = k;
                }
            }
            const std::string text = src_.substr(i_, j - i_);
            if (isFloat) {
                tok.type = Token::Float;
                tok.floatValue = std::strtod(text.c_str(), nullptr);
            } else {
                tok.type = Token::Int;
                errno = 0;
                tok.intValue = std::strtoll(text.c_str(), nullptr, 10);
                if (errno == ERANGE) throw ParseError("integer literal out of range", i_);
            }
            tok.text = text;
            i_ = j;
            return tok;
        }
        tok.type = Token::Punct;
        tok.text = std::string(1, c);
        ++i_;
        return tok;
    }

    const std::string& src_;
    std::size_t i_ = 0;
    std::vector<Token> buf_;
};

class Parser {
public:
    explicit Parser(const std::string& src) : lex_(src) {}

    RateExpr run() {
        RateExpr e = parseExpr();
        if (lex_.peek().type != Token::End)
            throw ParseError("trailing input '" + lex_.peek().text + "'", lex_.peek().pos);
        return e;
    }

private:
    bool punct(const char* p) {
        return lex_.peek().type == Token::Punct && lex_.peek().text == p;
    }
    void expect(const char* p) {
        if (!punct(p))
            throw ParseError(std::string("expected '") + p + "'", lex_.peek().pos);
        lex_.take();
    }

    RateExpr parseExpr() {
        std::vector<RateExpr> terms;
        bool negate = false;
        if (punct("-")) { lex_.take(); negate = true; }
        RateExpr first = parseTerm();
        terms.push_back(negate ? rx::neg(first) : first);
        while (punct("+") || punct("-")) {
            const bool minus = lex_.peek().text == "-";
            lex_.take();
            RateExpr t = parseTerm();
            terms.push_back(minus ? rx::neg(t) : t);
        }
        return terms.size() == 1 ? terms[0] : rx::add(std::move(terms));
    }

    RateExpr parseTerm() {
        RateExpr acc = parseFactor();
        while (punct("*") || punct("/")) {
            const bool divide = lex_.peek().text == "/";
            lex_.take();
            RateExpr rhs = parseFactor();
            acc = divide ? rx::div(acc, rhs) : rx::mul(acc, rhs);
        }
        return acc;
    }

    RateExpr parseFactor() {
        RateExpr base = parsePrimary();
        if (punct("^")) {
            lex_.take();
            return rx::pow(base, parseRational());
        }
        return base;
    }

    // Rational in exponent/argument position, optionally parenthesized,
    // consumed greedily: -3/2 is one number.
    Rational parseRational() {
        bool paren = false;
        if (punct("(")) { lex_.take(); paren = true; }
        bool neg = false;
        if (punct("-")) { lex_.take(); neg = true; }
        else if (punct("+")) lex_.take();
        if (lex_.peek().type != Token::Int)
            throw ParseError("expected an integer", lex_.peek().pos);
        std::int64_t n = lex_.take().intValue;
        if (neg) n = -n;
        std::int64_t d = 1;
        if (punct("/")) {
            lex_.take();
            if (lex_.peek().type != Token::Int)
                throw ParseError("expected a denominator", lex_.peek().pos);
            d = lex_.take().intValue;
            if (d <= 0) throw ParseError("denominator must be positive", lex_.peek().pos);
        }
        Rational r(n, d);
        if (paren) expect(")");
        return r;
    }

    RateExpr parseCall1(RateExpr (*build)(const RateExpr&)) {
        expect("(");
        RateExpr arg = parseExpr();
        expect(")");
        return build(arg);
    }

    RateExpr parsePrimary() {
        const Token& t = lex_.peek();
        switch (t.type) {
            case Token::Int: {
                Token tok = lex_.take();
                // int '/' nat is one rational literal -- unless the
                // denominator carries its own exponent, since ^ binds
                // tighter than division (3/4^2 is 3 / 4^2).
                if (punct("/") && lex_.peek(1).type == Token::Int &&
                    lex_.peek(1).intValue > 0 &&
                    !(lex_.peek(2).type == Token::Punct && lex_.peek(2).text == "^")) {
                    lex_.take();
                    const std::int64_t d = lex_.take().intValue;
                    return rx::lit(Rational(tok.intValue, d));
                }
                return rx::lit(Rational(tok.intValue));
            }
            case Token::Float: {
                Token tok = lex_.take();
                return rx::num(tok.floatValue);
            }
            case Token::Ident: {
                const std::string name = lex_.take().text;
                if (name == "eps") return rx::eps();
                if (name == "log") return parseCall1(&rx::log);
                if (name == "abs") return parseCall1(&rx::absv);
                if (name == "exp") {
                    if (punct("@")) {
                        lex_.take();
                        if (lex_.peek().type != Token::Int)
                            throw ParseError("expected iteration count after exp@", lex_.peek().pos);
                        const std::int64_t k = lex_.take().intValue;
                        if (k < 1 || k > 64)
                            throw ParseError("exp@ level must be in 1..64", t.pos);
                        expect("(");
                        RateExpr arg = parseExpr();
                        expect(")");
                        return rx::expIter(static_cast<int>(k), arg);
                    }
                    return parseCall1(&rx::exp);
                }
                if (name == "hyper") {
                    expect("(");
                    Rational a = parseRational();
                    expect(")");
                    return rx::hyper(a);
                }
                if (name == "comp") {
                    expect("(");
                    RateExpr body = parseExpr();
                    expect(",");
                    RateExpr scale = parseExpr();
                    expect(")");
                    return rx::comp(body, scale);
                }
                throw ParseError("unknown name '" + name + "'", t.pos);
            }
            case Token::Punct:
                if (t.text == "(") {
                    lex_.take();
                    RateExpr e = parseExpr();
                    expect(")");
                    return e;
                }
                throw ParseError("unexpected '" + t.text + "'", t.pos);
            case Token::End:
                throw ParseError("unexpected end of input", t.pos);
        }
        throw ParseError("unexpected token", t.pos);
    }

    Lexer lex_;
};

} // namespace

RateExpr parse(const std::string& text) { return Parser(text).run(); }

} // namespace agcal
