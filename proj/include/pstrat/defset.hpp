#pragma once

#include <cstdint>
#include <map>
#include <memory>
#include <optional>
#include <string>
#include <variant>
#include <vector>

#include "pstrat/finite_set.hpp"

namespace pstrat {

// ---------------------------------------------------------------------------
// A small constraint language over O^n:
//
//   expr := atom | expr "&" expr | expr "|" expr | "!" expr | "(" expr ")"
//   atom := poly "= 0"
//         | "val(" poly ")" cmp INT          cmp in { =, >=, >, <=, < }
//         | "rv(" poly ")" "=" "(" INT "," INT ")"
//   poly := integer polynomial in x1..xn, with ^ for powers
//
// "= 0" means valuation >= m (truncation equality).  Valuation thresholds
// c >= m are clamped: "val(...) >= c" then means "= 0"; other comparisons
// against clamped thresholds are undecidable at zero values and raise
// PrecisionExhausted with the offending point and atom.
// ---------------------------------------------------------------------------

struct DegreeOverflowError : UsageError {
    DegreeOverflowError() : UsageError("polynomial total degree exceeds 16") {}
};

struct UnknownVariableError : UsageError {
    explicit UnknownVariableError(const std::string& name)
        : UsageError("unknown variable: " + name) {}
};

struct SyntaxError : UsageError {
    int line, col;
    std::string expected;
    SyntaxError(int line_, int col_, const std::string& expected_)
        : UsageError("syntax error at " + std::to_string(line_) + ":" + std::to_string(col_) +
                     ": expected " + expected_),
          line(line_), col(col_), expected(expected_) {}
};

// ---------------------------------------------------------------------------
// Polynomials: canonical sparse form, exponent vectors over at most 4
// variables, 64-bit coefficients.
// ---------------------------------------------------------------------------

inline constexpr int kMaxTotalDegree = 16;

struct Poly {
    // exponent vector -> coefficient; zero coefficients are never stored
    std::map<std::array<std::uint8_t, kMaxDim>, std::int64_t> terms;

    static Poly constant(std::int64_t c) {
        Poly p;
        if (c != 0) p.terms[{0, 0, 0, 0}] = c;
        return p;
    }
    static Poly variable(int idx) { // 0-based
        Poly p;
        std::array<std::uint8_t, kMaxDim> e{};
        e[std::size_t(idx)] = 1;
        p.terms[e] = 1;
        return p;
    }

    int total_degree() const {
        int deg = 0;
        for (const auto& [e, c] : terms) {
            int d = e[0] + e[1] + e[2] + e[3];
            if (d > deg) deg = d;
        }
        return deg;
    }
    int max_variable() const { // 1-based index of the highest variable used
        int mv = 0;
        for (const auto& [e, c] : terms)
            for (int i = 0; i < kMaxDim; ++i)
                if (e[std::size_t(i)] > 0) mv = std::max(mv, i + 1);
        return mv;
    }
    bool operator==(const Poly&) const = default;
};

namespace detail {

inline std::int64_t checked_add(std::int64_t a, std::int64_t b) {
    __int128 s = __int128(a) + b;
    if (s > INT64_MAX || s < INT64_MIN) throw UsageError("polynomial coefficient overflow");
    return std::int64_t(s);
}

inline std::int64_t checked_mul(std::int64_t a, std::int64_t b) {
    __int128 s = __int128(a) * b;
    if (s > INT64_MAX || s < INT64_MIN) throw UsageError("polynomial coefficient overflow");
    return std::int64_t(s);
}

} // namespace detail

inline Poly poly_add(const Poly& a, const Poly& b) {
    Poly r = a;
    for (const auto& [e, c] : b.terms) {
        auto it = r.terms.find(e);
        if (it == r.terms.end()) {
            r.terms[e] = c;
        } else {
            it->second = detail::checked_add(it->second, c);
            if (it->second == 0) r.terms.erase(it);
        }
    }
    if (r.total_degree() > kMaxTotalDegree) throw DegreeOverflowError();
    return r;
}

inline Poly poly_neg(const Poly& a) {
    Poly r = a;
    for (auto& [e, c] : r.terms) c = -c;
    return r;
}

inline Poly poly_sub(const Poly& a, const Poly& b) { return poly_add(a, poly_neg(b)); }

inline Poly poly_mul(const Poly& a, const Poly& b) {
    Poly r;
    for (const auto& [ea, ca] : a.terms)
        for (const auto& [eb, cb] : b.terms) {
            std::array<std::uint8_t, kMaxDim> e{};
            int deg = 0;
            for (int i = 0; i < kMaxDim; ++i) {
                e[std::size_t(i)] = std::uint8_t(ea[std::size_t(i)] + eb[std::size_t(i)]);
                deg += e[std::size_t(i)];
            }
            if (deg > kMaxTotalDegree) throw DegreeOverflowError();
            auto it = r.terms.find(e);
            std::int64_t prod = detail::checked_mul(ca, cb);
            if (it == r.terms.end()) {
                if (prod != 0) r.terms[e] = prod;
            } else {
                it->second = detail::checked_add(it->second, prod);
                if (it->second == 0) r.terms.erase(it);
            }
        }
    return r;
}

inline Poly poly_pow(const Poly& a, int k) {
    Poly r = Poly::constant(1);
    for (int i = 0; i < k; ++i) r = poly_mul(r, a);
    return r;
}

/// Partial derivative with respect to variable idx (0-based).
inline Poly poly_derivative(const Poly& a, int idx) {
    Poly r;
    for (const auto& [e, c] : a.terms) {
        if (e[std::size_t(idx)] == 0) continue;
        auto e2 = e;
        e2[std::size_t(idx)] -= 1;
        r.terms[e2] = detail::checked_mul(c, e[std::size_t(idx)]);
    }
    return r;
}

inline Scalar poly_eval(const PadicContext& ctx, const Poly& f, const Point& x) {
    std::uint64_t acc = 0;
    for (const auto& [e, c] : f.terms) {
        std::uint64_t t = std::uint64_t(scalar_reduce(ctx, c));
        for (int i = 0; i < ctx.n(); ++i)
            for (int k = 0; k < e[std::size_t(i)]; ++k) t = t * x[i] % ctx.modulus();
        acc = (acc + t) % ctx.modulus();
    }
    return Scalar(acc);
}

inline std::string poly_str(const Poly& f) {
    if (f.terms.empty()) return "0";
    // canonical order: total degree descending, then exponent vector descending
    std::vector<std::pair<std::array<std::uint8_t, kMaxDim>, std::int64_t>> ts(f.terms.begin(),
                                                                               f.terms.end());
    std::sort(ts.begin(), ts.end(), [](const auto& a, const auto& b) {
        int da = a.first[0] + a.first[1] + a.first[2] + a.first[3];
        int db = b.first[0] + b.first[1] + b.first[2] + b.first[3];
        if (da != db) return da > db;
        return a.first > b.first;
    });
    std::string s;
    bool first = true;
    for (const auto& [e, c] : ts) {
        std::int64_t coeff = c;
        if (first) {
            if (coeff < 0) {
                s += "-";
                coeff = -coeff;
            }
        } else {
            s += coeff < 0 ? " - " : " + ";
            if (coeff < 0) coeff = -coeff;
        }
        first = false;
        bool has_var = e[0] || e[1] || e[2] || e[3];
        if (coeff != 1 || !has_var) s += std::to_string(coeff);
        bool star = coeff != 1 || !has_var;
        for (int i = 0; i < kMaxDim; ++i) {
            if (e[std::size_t(i)] == 0) continue;
            if (star) s += "*";
            star = true;
            s += "x" + std::to_string(i + 1);
            if (e[std::size_t(i)] > 1) s += "^" + std::to_string(int(e[std::size_t(i)]));
        }
    }
    return s;
}

// ---------------------------------------------------------------------------
// AST.
// ---------------------------------------------------------------------------

enum class Cmp { Eq, Ge, Gt, Le, Lt };

inline const char* cmp_str(Cmp c) {
    switch (c) {
        case Cmp::Eq: return "=";
        case Cmp::Ge: return ">=";
        case Cmp::Gt: return ">";
        case Cmp::Le: return "<=";
        case Cmp::Lt: return "<";
    }
    return "?";
}

struct SetExpr;
using SetExprPtr = std::shared_ptr<const SetExpr>;

struct AtomZero { Poly poly; };                     // poly = 0
struct AtomVal { Poly poly; Cmp cmp; int bound; };  // val(poly) cmp INT
struct AtomRv { Poly poly; int lambda; int unit; }; // rv(poly) = (INT, INT)
struct OpAnd { SetExprPtr lhs, rhs; };
struct OpOr { SetExprPtr lhs, rhs; };
struct OpNot { SetExprPtr arg; };

struct SetExpr {
    std::variant<AtomZero, AtomVal, AtomRv, OpAnd, OpOr, OpNot> node;
};

inline SetExprPtr make_expr(SetExpr e) { return std::make_shared<const SetExpr>(std::move(e)); }

// ---------------------------------------------------------------------------
// Lexer and parser.
// ---------------------------------------------------------------------------

namespace detail {

enum class Tok { Int, Ident, Plus, Minus, Star, Caret, LParen, RParen, Amp, Pipe, Bang, Eq, Ge, Gt, Le, Lt, Comma, End };

struct Token {
    Tok kind;
    std::int64_t value = 0;
    std::string text;
    int line = 1, col = 1;
};

inline std::vector<Token> lex(const std::string& src) {
    std::vector<Token> out;
    int line = 1, col = 1;
    std::size_t i = 0;
    auto push = [&](Tok k, std::string text, std::int64_t v = 0) {
        out.push_back(Token{k, v, std::move(text), line, col});
    };
    while (i < src.size()) {
        char c = src[i];
        if (c == '\n') {
            ++line;
            col = 1;
            ++i;
            continue;
        }
        if (c == ' ' || c == '\t' || c == '\r') {
            ++col;
            ++i;
            continue;
        }
        if (c >= '0' && c <= '9') {
            std::size_t j = i;
            std::int64_t v = 0;
            while (j < src.size() && src[j] >= '0' && src[j] <= '9') {
                v = v * 10 + (src[j] - '0');
                if (v > (std::int64_t(1) << 52)) throw SyntaxError(line, col, "a smaller integer");
                ++j;
            }
            push(Tok::Int, src.substr(i, j - i), v);
            col += int(j - i);
            i = j;
            continue;
        }
        if ((c >= 'a' && c <= 'z') || (c >= 'A' && c <= 'Z')) {
            std::size_t j = i;
            while (j < src.size() &&
                   ((src[j] >= 'a' && src[j] <= 'z') || (src[j] >= 'A' && src[j] <= 'Z') ||
                    (src[j] >= '0' && src[j] <= '9')))
                ++j;
            push(Tok::Ident, src.substr(i, j - i));
            col += int(j - i);
            i = j;
            continue;
        }
        switch (c) {
            case '+': push(Tok::Plus, "+"); break;
            case '-': push(Tok::Minus, "-"); break;
            case '*': push(Tok::Star, "*"); break;
            case '^': push(Tok::Caret, "^"); break;
            case '(': push(Tok::LParen, "("); break;
            case ')': push(Tok::RParen, ")"); break;
            case '&': push(Tok::Amp, "&"); break;
            case '|': push(Tok::Pipe, "|"); break;
            case '!': push(Tok::Bang, "!"); break;
            case ',': push(Tok::Comma, ","); break;
            case '=': push(Tok::Eq, "="); break;
            case '>':
                if (i + 1 < src.size() && src[i + 1] == '=') {
                    push(Tok::Ge, ">=");
                    ++i;
                    ++col;
                } else {
                    push(Tok::Gt, ">");
                }
                break;
            case '<':
                if (i + 1 < src.size() && src[i + 1] == '=') {
                    push(Tok::Le, "<=");
                    ++i;
                    ++col;
                } else {
                    push(Tok::Lt, "<");
                }
                break;
            default:
                throw SyntaxError(line, col, std::string("a token (got '") + c + "')");
        }
        ++i;
        ++col;
    }
    out.push_back(Token{Tok::End, 0, "", line, col});
    return out;
}

class Parser {
public:
    explicit Parser(std::vector<Token> toks) : toks_(std::move(toks)) {}

    SetExprPtr parse() {
        SetExprPtr e = parse_or();
        expect(Tok::End, "end of input");
        return e;
    }

private:
    std::vector<Token> toks_;
    std::size_t pos_ = 0;
    std::optional<SyntaxError> best_;

    const Token& peek() const { return toks_[pos_]; }
    const Token& get() { return toks_[pos_++]; }

    [[noreturn]] void fail(const std::string& expected) {
        SyntaxError e(peek().line, peek().col, expected);
        raise(e);
    }
    [[noreturn]] void raise(const SyntaxError& e) {
        if (!best_ || e.line > best_->line || (e.line == best_->line && e.col > best_->col)) best_ = e;
        throw *best_;
    }
    void expect(Tok k, const std::string& what) {
        if (peek().kind != k) fail(what);
        get();
    }

    SetExprPtr parse_or() {
        SetExprPtr lhs = parse_and();
        while (peek().kind == Tok::Pipe) {
            get();
            SetExprPtr rhs = parse_and();
            lhs = make_expr(SetExpr{OpOr{lhs, rhs}});
        }
        return lhs;
    }

    SetExprPtr parse_and() {
        SetExprPtr lhs = parse_unary();
        while (peek().kind == Tok::Amp) {
            get();
            SetExprPtr rhs = parse_unary();
            lhs = make_expr(SetExpr{OpAnd{lhs, rhs}});
        }
        return lhs;
    }

    SetExprPtr parse_unary() {
        if (peek().kind == Tok::Bang) {
            get();
            return make_expr(SetExpr{OpNot{parse_unary()}});
        }
        if (peek().kind == Tok::LParen) {
            // try a parenthesized expression; fall back to a polynomial atom
            std::size_t save = pos_;
            try {
                get();
                SetExprPtr e = parse_or();
                expect(Tok::RParen, ")");
                return e;
            } catch (const SyntaxError& e) {
                if (!best_ || e.line > best_->line || (e.line == best_->line && e.col > best_->col))
                    best_ = e;
                pos_ = save;
                return parse_poly_atom();
            }
        }
        if (peek().kind == Tok::Ident && peek().text == "val") return parse_val_atom();
        if (peek().kind == Tok::Ident && peek().text == "rv") return parse_rv_atom();
        return parse_poly_atom();
    }

    SetExprPtr parse_val_atom() {
        get(); // val
        expect(Tok::LParen, "(");
        Poly p = parse_poly();
        expect(Tok::RParen, ")");
        Cmp cmp;
        switch (peek().kind) {
            case Tok::Eq: cmp = Cmp::Eq; break;
            case Tok::Ge: cmp = Cmp::Ge; break;
            case Tok::Gt: cmp = Cmp::Gt; break;
            case Tok::Le: cmp = Cmp::Le; break;
            case Tok::Lt: cmp = Cmp::Lt; break;
            default: fail("a comparison (=, >=, >, <=, <)");
        }
        get();
        if (peek().kind != Tok::Int) fail("INT");
        int bound = int(get().value);
        return make_expr(SetExpr{AtomVal{std::move(p), cmp, bound}});
    }

    SetExprPtr parse_rv_atom() {
        get(); // rv
        expect(Tok::LParen, "(");
        Poly p = parse_poly();
        expect(Tok::RParen, ")");
        expect(Tok::Eq, "=");
        expect(Tok::LParen, "(");
        if (peek().kind != Tok::Int) fail("INT");
        int lambda = int(get().value);
        expect(Tok::Comma, ",");
        if (peek().kind != Tok::Int) fail("INT");
        int unit = int(get().value);
        expect(Tok::RParen, ")");
        return make_expr(SetExpr{AtomRv{std::move(p), lambda, unit}});
    }

    SetExprPtr parse_poly_atom() {
        Poly p = parse_poly();
        expect(Tok::Eq, "=");
        if (peek().kind != Tok::Int || peek().value != 0) fail("0");
        get();
        return make_expr(SetExpr{AtomZero{std::move(p)}});
    }

    Poly parse_poly() {
        bool neg = false;
        if (peek().kind == Tok::Minus) {
            get();
            neg = true;
        }
        Poly acc = parse_term();
        if (neg) acc = poly_neg(acc);
        while (peek().kind == Tok::Plus || peek().kind == Tok::Minus) {
            bool minus = get().kind == Tok::Minus;
            Poly t = parse_term();
            acc = minus ? poly_sub(acc, t) : poly_add(acc, t);
        }
        return acc;
    }

    Poly parse_term() {
        Poly acc = parse_factor();
        while (peek().kind == Tok::Star) {
            get();
            acc = poly_mul(acc, parse_factor());
        }
        return acc;
    }

    Poly parse_factor() {
        Poly base = parse_base();
        if (peek().kind == Tok::Caret) {
            get();
            if (peek().kind != Tok::Int) fail("INT exponent");
            std::int64_t k = get().value;
            if (k < 0 || k > kMaxTotalDegree) throw DegreeOverflowError();
            return poly_pow(base, int(k));
        }
        return base;
    }

    Poly parse_base() {
        if (peek().kind == Tok::Int) return Poly::constant(get().value);
        if (peek().kind == Tok::Ident) {
            const Token& t = get();
            if (t.text.size() >= 2 && t.text[0] == 'x') {
                bool digits = true;
                for (std::size_t i = 1; i < t.text.size(); ++i)
                    digits = digits && t.text[i] >= '0' && t.text[i] <= '9';
                if (digits) {
                    int idx = std::stoi(t.text.substr(1));
                    if (idx < 1 || idx > kMaxDim) throw UnknownVariableError(t.text);
                    return Poly::variable(idx - 1);
                }
            }
            throw UnknownVariableError(t.text);
        }
        if (peek().kind == Tok::LParen) {
            get();
            Poly p = parse_poly();
            expect(Tok::RParen, ")");
            return p;
        }
        fail("a polynomial");
    }
};

} // namespace detail

inline SetExprPtr parse(const std::string& text) {
    return detail::Parser(detail::lex(text)).parse();
}

/// Canonical rendering; parse(print(e)) reproduces e.
inline std::string print(const SetExprPtr& e) {
    struct V {
        std::string operator()(const AtomZero& a) const { return poly_str(a.poly) + " = 0"; }
        std::string operator()(const AtomVal& a) const {
            return "val(" + poly_str(a.poly) + ") " + cmp_str(a.cmp) + " " + std::to_string(a.bound);
        }
        std::string operator()(const AtomRv& a) const {
            return "rv(" + poly_str(a.poly) + ") = (" + std::to_string(a.lambda) + ", " +
                   std::to_string(a.unit) + ")";
        }
        std::string operator()(const OpAnd& a) const {
            return wrap_or(a.lhs) + " & " + wrap_not_lower(a.rhs);
        }
        std::string operator()(const OpOr& a) const { return print(a.lhs) + " | " + wrap_or_rhs(a.rhs); }
        std::string operator()(const OpNot& a) const { return "!" + wrap_atomic(a.arg); }

        static std::string wrap_or(const SetExprPtr& e) {
            if (std::holds_alternative<OpOr>(e->node)) return "(" + print(e) + ")";
            return print(e);
        }
        static std::string wrap_or_rhs(const SetExprPtr& e) {
            // keep left association on reparse
            if (std::holds_alternative<OpOr>(e->node)) return "(" + print(e) + ")";
            return print(e);
        }
        static std::string wrap_not_lower(const SetExprPtr& e) {
            if (std::holds_alternative<OpOr>(e->node) || std::holds_alternative<OpAnd>(e->node))
                return "(" + print(e) + ")";
            return print(e);
        }
        static std::string wrap_atomic(const SetExprPtr& e) {
            if (std::holds_alternative<OpNot>(e->node)) return print(e);
            return "(" + print(e) + ")";
        }
    };
    return std::visit(V{}, e->node);
}

// ---------------------------------------------------------------------------
// Evaluation.
// ---------------------------------------------------------------------------

struct EvalResult {
    FiniteSet set;
    std::vector<bool> sensitive; // per point: truth used the truncation convention
};

namespace detail {

struct AtomEval {
    bool truth;
    bool sensitive;
};

inline AtomEval eval_atom_zero(const PadicContext& ctx, const AtomZero& a, const Point& x) {
    Scalar v = poly_eval(ctx, a.poly, x);
    return AtomEval{v == 0, v == 0};
}

inline AtomEval eval_atom_val(const PadicContext& ctx, const AtomVal& a, const Point& x,
                              const std::string& atom_text) {
    Scalar value = poly_eval(ctx, a.poly, x);
    int w = scalar_val(ctx, value);
    bool clamped = a.bound >= ctx.m();
    if (!clamped) {
        int c = a.bound;
        if (w != PadicContext::infinity) {
            switch (a.cmp) {
                case Cmp::Eq: return {w == c, false};
                case Cmp::Ge: return {w >= c, false};
                case Cmp::Gt: return {w > c, false};
                case Cmp::Le: return {w <= c, false};
                case Cmp::Lt: return {w < c, false};
            }
        }
        // truncated zero: the true valuation is at least m > c, so every
        // comparison against c is stable under refinement
        switch (a.cmp) {
            case Cmp::Eq: return {false, false};
            case Cmp::Ge: return {true, false};
            case Cmp::Gt: return {true, false};
            case Cmp::Le: return {false, false};
            case Cmp::Lt: return {false, false};
        }
    }
    // clamped threshold: only decidable against exact (finite) valuations,
    // except that ">= c" is the documented synonym of "= 0"
    if (w != PadicContext::infinity) {
        switch (a.cmp) {
            case Cmp::Eq: return {false, false};
            case Cmp::Ge: return {false, false};
            case Cmp::Gt: return {false, false};
            case Cmp::Le: return {true, false};
            case Cmp::Lt: return {true, false};
        }
    }
    if (a.cmp == Cmp::Ge) return {true, true};
    throw PrecisionExhausted("atom '" + atom_text + "' is undecidable at point " + point_str(ctx, x) +
                             ": the value vanishes at precision m and the threshold is not below m");
}

inline AtomEval eval_atom_rv(const PadicContext& ctx, const AtomRv& a, const Point& x,
                             const std::string& atom_text) {
    if (a.unit % ctx.p() == 0)
        throw UsageError("rv literal unit must be nonzero mod p in '" + atom_text + "'");
    Scalar value = poly_eval(ctx, a.poly, x);
    int w = scalar_val(ctx, value);
    if (a.lambda >= ctx.m()) {
        if (w == PadicContext::infinity)
            throw PrecisionExhausted("atom '" + atom_text + "' is undecidable at point " +
                                     point_str(ctx, x) +
                                     ": the value vanishes at precision m and the literal valuation "
                                     "is not below m");
        return {false, false};
    }
    if (w == PadicContext::infinity) return {false, false};
    if (w != a.lambda) return {false, false};
    int unit = int((value / ctx.pow(w)) % ctx.p());
    return {unit == a.unit % ctx.p(), false};
}

struct ExprEval {
    bool truth;
    bool sensitive;
};

inline ExprEval eval_expr(const PadicContext& ctx, const SetExprPtr& e, const Point& x) {
    struct V {
        const PadicContext& ctx;
        const Point& x;
        ExprEval operator()(const AtomZero& a) const {
            auto r = eval_atom_zero(ctx, a, x);
            return {r.truth, r.sensitive};
        }
        ExprEval operator()(const AtomVal& a) const {
            auto r = eval_atom_val(ctx, a, x, "val(" + poly_str(a.poly) + ") " +
                                                  std::string(cmp_str(a.cmp)) + " " +
                                                  std::to_string(a.bound));
            return {r.truth, r.sensitive};
        }
        ExprEval operator()(const AtomRv& a) const {
            auto r = eval_atom_rv(ctx, a, x, "rv(" + poly_str(a.poly) + ")");
            return {r.truth, r.sensitive};
        }
        ExprEval operator()(const OpAnd& a) const {
            ExprEval l = eval_expr(ctx, a.lhs, x), r = eval_expr(ctx, a.rhs, x);
            return {l.truth && r.truth, l.sensitive || r.sensitive};
        }
        ExprEval operator()(const OpOr& a) const {
            ExprEval l = eval_expr(ctx, a.lhs, x), r = eval_expr(ctx, a.rhs, x);
            return {l.truth || r.truth, l.sensitive || r.sensitive};
        }
        ExprEval operator()(const OpNot& a) const {
            ExprEval v = eval_expr(ctx, a.arg, x);
            return {!v.truth, v.sensitive};
        }
    };
    return std::visit(V{ctx, x}, e->node);
}

inline int expr_max_variable(const SetExprPtr& e) {
    struct V {
        int operator()(const AtomZero& a) const { return a.poly.max_variable(); }
        int operator()(const AtomVal& a) const { return a.poly.max_variable(); }
        int operator()(const AtomRv& a) const { return a.poly.max_variable(); }
        int operator()(const OpAnd& a) const {
            return std::max(expr_max_variable(a.lhs), expr_max_variable(a.rhs));
        }
        int operator()(const OpOr& a) const {
            return std::max(expr_max_variable(a.lhs), expr_max_variable(a.rhs));
        }
        int operator()(const OpNot& a) const { return expr_max_variable(a.arg); }
    };
    return std::visit(V{}, e->node);
}

} // namespace detail

inline EvalResult evaluate(const PadicContext& ctx, const SetExprPtr& e) {
    ctx.require_enumerable();
    int mv = detail::expr_max_variable(e);
    if (mv > ctx.n()) throw UnknownVariableError("x" + std::to_string(mv));
    EvalResult out{FiniteSet(ctx), std::vector<bool>(ctx.space_size(), false)};
    for (std::uint64_t r = 0; r < ctx.space_size(); ++r) {
        Point x = point_from_rank(ctx, r);
        auto v = detail::eval_expr(ctx, e, x);
        out.set.set(r, v.truth);
        out.sensitive[r] = v.sensitive;
    }
    return out;
}

} // namespace pstrat
