#pragma once

#include <stdexcept>
#include <string>

namespace einbulk {

/// Base class for all einbulk errors; carries a short machine-readable code.
class Error : public std::runtime_error {
public:
    Error(std::string code, const std::string& what)
        : std::runtime_error(what), code_(std::move(code)) {}
    const std::string& code() const noexcept { return code_; }

private:
    std::string code_;
};

struct VariableMismatch : Error {
    explicit VariableMismatch(const std::string& w) : Error("VariableMismatch", w) {}
};

struct ZeroConstantTerm : Error {
    explicit ZeroConstantTerm(const std::string& w) : Error("ZeroConstantTerm", w) {}
};

/// Parse failure; offset is 1-based byte position of the offending input.
struct SyntaxError : Error {
    SyntaxError(std::size_t offset, const std::string& w)
        : Error("SyntaxError", w + " at offset " + std::to_string(offset)), offset(offset) {}
    std::size_t offset;
};

struct UnknownSymbol : Error {
    explicit UnknownSymbol(const std::string& w) : Error("UnknownSymbol", w) {}
};

struct SingularExpansion : Error {
    explicit SingularExpansion(const std::string& w) : Error("SingularExpansion", w) {}
};

struct SingularMetric : Error {
    explicit SingularMetric(const std::string& w) : Error("SingularMetric", w) {}
};

struct DimensionTwoWithNonzeroLambda : Error {
    explicit DimensionTwoWithNonzeroLambda(const std::string& w)
        : Error("DimensionTwoWithNonzeroLambda", w) {}
};

struct ExpansionOutsideSupport : Error {
    explicit ExpansionOutsideSupport(const std::string& w)
        : Error("ExpansionOutsideSupport", w) {}
};

struct CoverageGap : Error {
    explicit CoverageGap(const std::string& w) : Error("CoverageGap", w) {}
};

struct MultiplicityExceeded : Error {
    explicit MultiplicityExceeded(const std::string& w) : Error("MultiplicityExceeded", w) {}
};

struct ConstraintSolveFailed : Error {
    ConstraintSolveFailed(double best, const std::string& w)
        : Error("ConstraintSolveFailed", w), best_residual(best) {}
    double best_residual;
};

struct RecursionBreakdown : Error {
    explicit RecursionBreakdown(const std::string& w) : Error("RecursionBreakdown", w) {}
};

struct InconsistentTargets : Error {
    InconsistentTargets(double residual, const std::string& w)
        : Error("InconsistentTargets", w), residual(residual) {}
    double residual;
};

struct RankDeficiencyBeyondTolerance : Error {
    explicit RankDeficiencyBeyondTolerance(const std::string& w)
        : Error("RankDeficiencyBeyondTolerance", w) {}
};

struct DegenerateFiberComponent : Error {
    explicit DegenerateFiberComponent(const std::string& w)
        : Error("DegenerateFiberComponent", w) {}
};

struct UnknownManifold : Error {
    explicit UnknownManifold(const std::string& w) : Error("UnknownManifold", w) {}
};

struct LevelOutOfRange : Error {
    explicit LevelOutOfRange(const std::string& w) : Error("LevelOutOfRange", w) {}
};

struct ManifestError : Error {
    explicit ManifestError(const std::string& w) : Error("ManifestError", w) {}
};

} // namespace einbulk
