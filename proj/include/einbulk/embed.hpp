#pragma once

#include "einbulk/geometry.hpp"

#include <optional>
#include <vector>

namespace einbulk {

/// Analytic seed metric on an n-dimensional chart about its origin.
struct SeedMetric {
    int n = 0;
    ChartMetric g; // dim n, jets in n variables
};

/// Outcome of a codimension-1 Einstein extension in the normal gauge
/// (phi == 1, fiber block eps dy^2), with the certification numbers.
struct EmbeddingResult {
    BulkChartMetric bulk;
    double lambda = 0.0;
    int order = 0;
    double residual_norm = 0.0;   // all components, through degree order-2
    double constraint_norm = 0.0; // (A, n+1) components at y = 0
};

struct CertifyReport {
    double slice_max_deviation = 0.0;
    std::vector<double> residual_by_degree;
    double residual_norm = 0.0;
    double constraint_norm = 0.0;
    bool block_form_ok = false;
};

/// First-order normal data proportional to the seed: c1 = 2 lambda0 g.
SymJets proportional_initial_data(const SeedMetric& seed, double lambda0, int order);

/// Solve the n+1 constraint components of the Einstein condition at y = 0
/// for first-order data c1 = 2 (lambda0 g + s), damped Newton least squares.
/// Throws ConstraintSolveFailed with the best residual on stagnation,
/// DimensionTwoWithNonzeroLambda for n = 1 with lambda != 0.
SymJets initial_data_solve(const SeedMetric& seed, double lambda, double epsilon, int order);

/// Fill the Taylor coefficients in the extra coordinate by recursion on the
/// ij-block of the Einstein condition, then certify against chart_geometry.
/// `initial` overrides the constraint solve (e.g. a closed-form ansatz).
EmbeddingResult extend_metric(const SeedMetric& seed, double lambda, double epsilon, int order,
                              const std::optional<SymJets>& initial = std::nullopt);

/// Re-derive every certification number from the finished bulk metric alone.
CertifyReport certify(const EmbeddingResult& result, const SeedMetric& seed);

/// Constraint components ((i, n+1) and (n+1, n+1)) of the Einstein residual
/// at y = 0 for a bulk built from seed + first-order data; used by the solver
/// and exposed for the propagation diagnostics.
std::vector<Jet> constraint_components(const SeedMetric& seed, const SymJets& c1, double lambda,
                                       double epsilon, int order);

} // namespace einbulk
