#pragma once
// Complex amplitude expressions: "1/sqrt(2)", "-2/3", "e^{i*pi/4}", "exp(i pi/3)".
// Grammar (usual precedence, ^ right-associative, implicit multiplication
// between adjacent factors):
//   expr   := term (('+'|'-') term)*
//   term   := unary (('*'|'/')? unary)*
//   unary  := ('+'|'-') unary | power
//   power  := atom ('^' unary)?
//   atom   := number | 'i' | 'pi' | 'e' | func '(' expr ')' | '(' expr ')' | '{' expr '}'
//   func   := sqrt | exp | sin | cos | conj | abs

#include <cctype>
#include <string>

#include "core.hpp"

namespace walklab {

namespace detail {

class ExprParser {
public:
    explicit ExprParser(const std::string& s) : s_(s) {}

    cplx parse() {
        cplx v = expr();
        skip();
        if (pos_ != s_.size()) fail("unexpected '" + std::string(1, s_[pos_]) + "'");
        return v;
    }

private:
    const std::string& s_;
    size_t pos_ = 0;

    [[noreturn]] void fail(const std::string& why) const {
        throw Error(ErrorKind::ConfigError, "bad amplitude expression \"" + s_ + "\": " + why);
    }

    void skip() {
        while (pos_ < s_.size() && std::isspace(static_cast<unsigned char>(s_[pos_]))) ++pos_;
    }
    bool eat(char c) {
        skip();
        if (pos_ < s_.size() && s_[pos_] == c) {
            ++pos_;
            return true;
        }
        return false;
    }
    bool starts_factor() {
        skip();
        if (pos_ >= s_.size()) return false;
        char c = s_[pos_];
        return std::isdigit(static_cast<unsigned char>(c)) || c == '.' || c == '(' || c == '{' ||
               std::isalpha(static_cast<unsigned char>(c));
    }

    cplx expr() {
        cplx v = term();
        for (;;) {
            if (eat('+')) v += term();
            else if (eat('-')) v -= term();
            else return v;
        }
    }
    cplx term() {
        cplx v = unary();
        for (;;) {
            if (eat('*')) v *= unary();
            else if (eat('/')) {
                cplx d = unary();
                if (d == cplx{}) fail("division by zero");
                v /= d;
            } else if (starts_factor()) v *= power();
            else return v;
        }
    }
    cplx unary() {
        if (eat('-')) return -unary();
        if (eat('+')) return unary();
        return power();
    }
    cplx power() {
        cplx base = atom();
        if (eat('^')) {
            cplx ex = unary();
            if (ex.imag() == 0.0 && ex.real() == std::round(ex.real()) && std::abs(ex.real()) < 64) {
                int n = static_cast<int>(ex.real());
                cplx r = 1.0;
                for (int k = 0; k < std::abs(n); ++k) r *= base;
                return n >= 0 ? r : 1.0 / r;
            }
            return std::pow(base, ex);
        }
        return base;
    }
    cplx atom() {
        skip();
        if (pos_ >= s_.size()) fail("unexpected end");
        char c = s_[pos_];
        if (c == '(') {
            ++pos_;
            cplx v = expr();
            if (!eat(')')) fail("missing ')'");
            return v;
        }
        if (c == '{') {
            ++pos_;
            cplx v = expr();
            if (!eat('}')) fail("missing '}'");
            return v;
        }
        if (std::isdigit(static_cast<unsigned char>(c)) || c == '.') {
            size_t used = 0;
            double x = 0.0;
            try {
                x = std::stod(s_.substr(pos_), &used);
            } catch (const std::exception&) {
                fail("bad number");
            }
            pos_ += used;
            return x;
        }
        if (std::isalpha(static_cast<unsigned char>(c))) {
            size_t b = pos_;
            while (pos_ < s_.size() && std::isalpha(static_cast<unsigned char>(s_[pos_]))) ++pos_;
            std::string id = s_.substr(b, pos_ - b);
            if (id == "i") return kI;
            if (id == "pi") return kPi;
            if (id == "e") return std::exp(1.0);
            cplx arg;
            if (eat('(')) {
                arg = expr();
                if (!eat(')')) fail("missing ')'");
            } else {
                fail("unknown identifier '" + id + "'");
            }
            if (id == "sqrt") return std::sqrt(arg);
            if (id == "exp") return std::exp(arg);
            if (id == "sin") return std::sin(arg);
            if (id == "cos") return std::cos(arg);
            if (id == "conj") return std::conj(arg);
            if (id == "abs") return std::abs(arg);
            fail("unknown function '" + id + "'");
        }
        fail("unexpected '" + std::string(1, c) + "'");
    }
};

}  // namespace detail

inline cplx parse_amplitude(const std::string& s) { return detail::ExprParser(s).parse(); }

}  // namespace walklab
