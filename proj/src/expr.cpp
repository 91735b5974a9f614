#include "einbulk/expr.hpp"

#include "einbulk/errors.hpp"

#include <cctype>
#include <cmath>
#include <cstdlib>

namespace einbulk {

namespace {

ExprPtr make(ExprAst::Kind k) {
    auto n = std::make_unique<ExprAst>();
    n->kind = k;
    return n;
}

ExprPtr make_binary(ExprAst::Kind k, ExprPtr a, ExprPtr b) {
    auto n = make(k);
    n->a = std::move(a);
    n->b = std::move(b);
    return n;
}

/// Recursive-descent parser over a byte cursor.  Offsets reported 1-based.
class Parser {
public:
    explicit Parser(const std::string& src) : s_(src) {}

    ExprPtr run() {
        auto e = expression();
        skip_ws();
        if (pos_ < s_.size()) fail("unexpected trailing input");
        return e;
    }

private:
    [[noreturn]] void fail(const std::string& msg) { throw SyntaxError(pos_ + 1, msg); }

    void skip_ws() {
        while (pos_ < s_.size() && std::isspace(static_cast<unsigned char>(s_[pos_]))) ++pos_;
    }

    char peek() {
        skip_ws();
        return pos_ < s_.size() ? s_[pos_] : '\0';
    }

    bool accept(char c) {
        if (peek() == c) {
            ++pos_;
            return true;
        }
        return false;
    }

    void expect(char c, const char* what) {
        if (!accept(c)) fail(std::string("expected ") + what);
    }

    ExprPtr expression() {
        auto lhs = term();
        while (true) {
            char c = peek();
            if (c == '+' || c == '-') {
                ++pos_;
                lhs = make_binary(c == '+' ? ExprAst::Kind::Add : ExprAst::Kind::Sub,
                                  std::move(lhs), term());
            } else {
                return lhs;
            }
        }
    }

    ExprPtr term() {
        auto lhs = unary();
        while (true) {
            char c = peek();
            if (c == '*' || c == '/') {
                ++pos_;
                lhs = make_binary(c == '*' ? ExprAst::Kind::Mul : ExprAst::Kind::Div,
                                  std::move(lhs), unary());
            } else {
                return lhs;
            }
        }
    }

    ExprPtr unary() {
        if (accept('-')) {
            auto n = make(ExprAst::Kind::Neg);
            n->a = unary();
            return n;
        }
        return power();
    }

    ExprPtr power() {
        auto base = primary();
        while (accept('^')) {
            skip_ws();
            bool neg = accept('-');
            skip_ws();
            if (pos_ >= s_.size() || !std::isdigit(static_cast<unsigned char>(s_[pos_])))
                fail("exponent must be an integer");
            long long e = 0;
            while (pos_ < s_.size() && std::isdigit(static_cast<unsigned char>(s_[pos_])))
                e = e * 10 + (s_[pos_++] - '0');
            auto n = make(ExprAst::Kind::Pow);
            n->exponent = neg ? -e : e;
            n->a = std::move(base);
            base = std::move(n);
        }
        return base;
    }

    ExprPtr primary() {
        char c = peek();
        if (c == '(') {
            ++pos_;
            auto e = expression();
            expect(')', "')'");
            return e;
        }
        if (std::isdigit(static_cast<unsigned char>(c)) || c == '.') return number();
        if (std::isalpha(static_cast<unsigned char>(c)) || c == '_') return identifier();
        fail("expected a number, coordinate, function or '('");
    }

    ExprPtr number() {
        std::size_t start = pos_;
        while (pos_ < s_.size() && std::isdigit(static_cast<unsigned char>(s_[pos_]))) ++pos_;
        if (pos_ < s_.size() && s_[pos_] == '.') {
            ++pos_;
            while (pos_ < s_.size() && std::isdigit(static_cast<unsigned char>(s_[pos_]))) ++pos_;
        }
        if (pos_ < s_.size() && (s_[pos_] == 'e' || s_[pos_] == 'E')) {
            std::size_t mark = pos_++;
            if (pos_ < s_.size() && (s_[pos_] == '+' || s_[pos_] == '-')) ++pos_;
            if (pos_ < s_.size() && std::isdigit(static_cast<unsigned char>(s_[pos_]))) {
                while (pos_ < s_.size() && std::isdigit(static_cast<unsigned char>(s_[pos_]))) ++pos_;
            } else {
                pos_ = mark; // not an exponent after all
            }
        }
        if (pos_ == start || (pos_ == start + 1 && s_[start] == '.'))
            fail("malformed number");
        auto n = make(ExprAst::Kind::Number);
        n->number = std::strtod(s_.substr(start, pos_ - start).c_str(), nullptr);
        return n;
    }

    ExprPtr identifier() {
        std::size_t start = pos_;
        while (pos_ < s_.size() &&
               (std::isalnum(static_cast<unsigned char>(s_[pos_])) || s_[pos_] == '_'))
            ++pos_;
        std::string id = s_.substr(start, pos_ - start);
        if (id == "sin" || id == "cos" || id == "exp" || id == "sqrt") {
            ExprAst::Kind k = id == "sin" ? ExprAst::Kind::Sin
                              : id == "cos" ? ExprAst::Kind::Cos
                              : id == "exp" ? ExprAst::Kind::Exp
                                            : ExprAst::Kind::Sqrt;
            expect('(', "'(' after function name");
            auto n = make(k);
            n->a = expression();
            expect(')', "')'");
            return n;
        }
        if (id == "y") {
            auto n = make(ExprAst::Kind::Symbol);
            n->symbol = -1; // last coordinate
            return n;
        }
        if (id.size() >= 2 && id[0] == 'x') {
            bool digits = true;
            for (std::size_t i = 1; i < id.size(); ++i)
                if (!std::isdigit(static_cast<unsigned char>(id[i]))) digits = false;
            if (digits && id[1] != '0') {
                auto n = make(ExprAst::Kind::Symbol);
                n->symbol = std::atoi(id.c_str() + 1) - 1;
                return n;
            }
        }
        throw UnknownSymbol("unknown symbol '" + id + "' at offset " + std::to_string(start + 1));
    }

    const std::string& s_;
    std::size_t pos_ = 0;
};

} // namespace

ExprPtr parse(const std::string& src) { return Parser(src).run(); }

std::string to_string(const ExprAst& n) {
    switch (n.kind) {
        case ExprAst::Kind::Number: {
            double intpart;
            if (std::modf(n.number, &intpart) == 0.0 && std::abs(n.number) < 1e15)
                return std::to_string(static_cast<long long>(n.number));
            return std::to_string(n.number);
        }
        case ExprAst::Kind::Symbol:
            return n.symbol < 0 ? "y" : "x" + std::to_string(n.symbol + 1);
        case ExprAst::Kind::Add: return "Add(" + to_string(*n.a) + ", " + to_string(*n.b) + ")";
        case ExprAst::Kind::Sub: return "Sub(" + to_string(*n.a) + ", " + to_string(*n.b) + ")";
        case ExprAst::Kind::Mul: return "Mul(" + to_string(*n.a) + ", " + to_string(*n.b) + ")";
        case ExprAst::Kind::Div: return "Div(" + to_string(*n.a) + ", " + to_string(*n.b) + ")";
        case ExprAst::Kind::Neg: return "Neg(" + to_string(*n.a) + ")";
        case ExprAst::Kind::Pow:
            return "Pow(" + to_string(*n.a) + ", " + std::to_string(n.exponent) + ")";
        case ExprAst::Kind::Sin: return "Sin(" + to_string(*n.a) + ")";
        case ExprAst::Kind::Cos: return "Cos(" + to_string(*n.a) + ")";
        case ExprAst::Kind::Exp: return "Exp(" + to_string(*n.a) + ")";
        case ExprAst::Kind::Sqrt: return "Sqrt(" + to_string(*n.a) + ")";
    }
    return "?";
}

namespace {

int resolve_symbol(int symbol, int dim) {
    int idx = symbol < 0 ? dim - 1 : symbol;
    if (idx >= dim)
        throw UnknownSymbol("coordinate x" + std::to_string(symbol + 1) +
                            " exceeds chart dimension " + std::to_string(dim));
    return idx;
}

Jet expand_node(const ExprAst& n, const std::vector<double>& center, int order) {
    int dim = static_cast<int>(center.size());
    switch (n.kind) {
        case ExprAst::Kind::Number: return Jet::constant(dim, order, n.number);
        case ExprAst::Kind::Symbol: {
            int idx = resolve_symbol(n.symbol, dim);
            return Jet::variable(dim, order, idx, center[idx]);
        }
        case ExprAst::Kind::Add:
            return jet_add(expand_node(*n.a, center, order), expand_node(*n.b, center, order));
        case ExprAst::Kind::Sub:
            return jet_sub(expand_node(*n.a, center, order), expand_node(*n.b, center, order));
        case ExprAst::Kind::Mul:
            return jet_mul(expand_node(*n.a, center, order), expand_node(*n.b, center, order));
        case ExprAst::Kind::Div: {
            Jet num = expand_node(*n.a, center, order);
            Jet den = expand_node(*n.b, center, order);
            try {
                return jet_mul(num, jet_reciprocal(den));
            } catch (const ZeroConstantTerm&) {
                throw SingularExpansion("division by a function vanishing at the center");
            }
        }
        case ExprAst::Kind::Neg: return jet_neg(expand_node(*n.a, center, order));
        case ExprAst::Kind::Pow: {
            Jet base = expand_node(*n.a, center, order);
            try {
                return jet_pow_int(base, n.exponent);
            } catch (const ZeroConstantTerm&) {
                throw SingularExpansion("negative power of a function vanishing at the center");
            }
        }
        case ExprAst::Kind::Sin: return jet_sin(expand_node(*n.a, center, order));
        case ExprAst::Kind::Cos: return jet_cos(expand_node(*n.a, center, order));
        case ExprAst::Kind::Exp: return jet_exp(expand_node(*n.a, center, order));
        case ExprAst::Kind::Sqrt: {
            Jet arg = expand_node(*n.a, center, order);
            try {
                return jet_sqrt(arg);
            } catch (const SingularExpansion&) {
                throw SingularExpansion("sqrt of a non-positive value at the center");
            }
        }
    }
    throw SingularExpansion("unreachable expression node");
}

} // namespace

Jet expand(const ExprAst& ast, const std::vector<double>& center, int order) {
    return expand_node(ast, center, order);
}

double evaluate(const ExprAst& n, const std::vector<double>& point) {
    int dim = static_cast<int>(point.size());
    switch (n.kind) {
        case ExprAst::Kind::Number: return n.number;
        case ExprAst::Kind::Symbol: return point[resolve_symbol(n.symbol, dim)];
        case ExprAst::Kind::Add: return evaluate(*n.a, point) + evaluate(*n.b, point);
        case ExprAst::Kind::Sub: return evaluate(*n.a, point) - evaluate(*n.b, point);
        case ExprAst::Kind::Mul: return evaluate(*n.a, point) * evaluate(*n.b, point);
        case ExprAst::Kind::Div: return evaluate(*n.a, point) / evaluate(*n.b, point);
        case ExprAst::Kind::Neg: return -evaluate(*n.a, point);
        case ExprAst::Kind::Pow: return std::pow(evaluate(*n.a, point), static_cast<double>(n.exponent));
        case ExprAst::Kind::Sin: return std::sin(evaluate(*n.a, point));
        case ExprAst::Kind::Cos: return std::cos(evaluate(*n.a, point));
        case ExprAst::Kind::Exp: return std::exp(evaluate(*n.a, point));
        case ExprAst::Kind::Sqrt: return std::sqrt(evaluate(*n.a, point));
    }
    return 0.0;
}

} // namespace einbulk
