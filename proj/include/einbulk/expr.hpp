#pragma once

#include "einbulk/jets.hpp"

#include <memory>
#include <string>
#include <vector>

namespace einbulk {

/// AST for metric component formulas.  Coordinates are x1..xd with alias y
/// for the last (fiber) coordinate.
struct ExprAst {
    enum class Kind { Number, Symbol, Add, Sub, Mul, Div, Neg, Pow, Sin, Cos, Exp, Sqrt };

    Kind kind;
    double number = 0.0;     // Number
    int symbol = 0;          // Symbol: 0-based coordinate index, -1 = alias y
    long long exponent = 0;  // Pow
    std::unique_ptr<ExprAst> a, b;
};

using ExprPtr = std::unique_ptr<ExprAst>;

/// Parse with standard precedence (^ > unary - > *,/ > +,-), left associative.
/// Throws SyntaxError (1-based byte offset) or UnknownSymbol.
ExprPtr parse(const std::string& src);

/// Compact shape printer, e.g. "Add(1, Pow(x1, 2))".
std::string to_string(const ExprAst& ast);

/// Taylor-expand about `center` to the given truncation order.
/// Throws SingularExpansion when an intrinsic is not analytic at the center,
/// UnknownSymbol when a coordinate index exceeds the center dimension.
Jet expand(const ExprAst& ast, const std::vector<double>& center, int order);

/// Direct floating evaluation (round-trip oracle for expand).
double evaluate(const ExprAst& ast, const std::vector<double>& point);

} // namespace einbulk
