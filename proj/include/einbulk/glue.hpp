#pragma once

#include "einbulk/atlas.hpp"
#include "einbulk/embed.hpp"
#include "einbulk/geometry.hpp"

#include <Eigen/Dense>

#include <cstdint>
#include <map>
#include <string>
#include <vector>

namespace einbulk {

/// The product bulk E = M x F with its chart-level projections: every chart
/// of `total` factors as (base chart) x (fiber chart); the base block of any
/// assembled metric is the pullback of the base metric through pi.
struct ProductBulk {
    ManifoldSpec base;
    std::string fiber_kind;
    ManifoldSpec total;
    int n = 0; // base dimension
};

ProductBulk make_product_bulk(const ManifoldSpec& base, const std::string& fiber_kind);

/// Equation count of the overlap systems:
/// M = 2n + 5 + sum_{t=2}^{n} (n+3-t)...(n+2) / t!   (n >= 1).
long long count_equations(int n);

struct GlueConfig {
    int order = 4;           ///< jet order of targets and per-chart extensions
    int coeff_order = 2;     ///< jet order of rows and psi unknowns
    int overlap_samples = 8; ///< sample points per pairwise chart overlap
    int interior_samples = 8;///< sample points per chart (first is the anchor)
    double lambda = 0.0;
    double epsilon = 1.0;
    std::uint64_t seed = 2026;
    int n_override = 0;      ///< psi functions per class; 0 means M + 1
    double fiber_band = 0.15;///< normalized fiber band for sampling
    double solve_tol = 1e-8;
};

/// Per-chart fiber-fiber targets: the eps*phi^2 component of each chart's
/// certified Einstein extension, as a jet in that chart's coordinates about
/// the chart anchor.
struct TargetSet {
    std::vector<Jet> phi;                    // per chart, n+1 variables
    std::vector<EmbeddingResult> extensions; // per chart
};

/// Seed metric of one chart: the base metric pulled back to normalized chart
/// coordinates about the given base point (exact affine pullback).
SeedMetric chart_seed(const ProductBulk& bulk, int chart, int order,
                      const std::vector<double>* base_point = nullptr);

TargetSet target_components(const ProductBulk& bulk, const AtlasCover& cover,
                            const GlueConfig& config);

/// One collocation unknown: the multi-index beta coefficient of psi^(i_a)'s
/// jet about the sample point, in member coordinates.
struct PsiUnknown {
    int cls = 0;
    int member = 0;
    MultiIndex beta;
};

struct SystemRow {
    int chart = 0;
    MultiIndex alpha;
    int sigma_level = 0; // (n+2) - |containing charts| + 1
};

/// The sampled equations at one point; the full system is the direct sum of
/// the point blocks (psi jets at distinct points are distinct unknowns).
struct PointBlock {
    std::vector<double> point; // global coordinates
    std::vector<int> charts;   // Q_j containing the point
    std::vector<int> active;   // classes whose ball contains the point
    Eigen::MatrixXd A;
    Eigen::VectorXd b;
    std::vector<SystemRow> rows;
    std::vector<PsiUnknown> unknowns;
};

struct OverlapSystem {
    std::vector<PointBlock> blocks;
    long long M = 0; // paper equation count for the base dimension
    int N = 0;       // psi functions per class
    int n = 0;       // base dimension
    int coeff_order = 0;
    long long total_rows() const;
    long long total_unknowns() const;
};

/// Deterministic sample set: low-discrepancy points on every pairwise chart
/// overlap plus per-chart interiors (first interior point is the anchor).
std::vector<std::vector<double>> glue_sample_points(const ProductBulk& bulk,
                                                    const AtlasCover& cover,
                                                    const GlueConfig& config);

/// Assemble rows (Phi_(j) jet = sum Theta psi jet, coefficients through
/// coeff_order) at every sample point and containing chart.  Throws
/// ManifestError if the unknowns do not outnumber the rows, CoverageGap if a
/// sample point has no active bell.
OverlapSystem build_system(const ProductBulk& bulk, const AtlasCover& cover,
                           const TargetSet& targets,
                           const std::vector<std::vector<double>>& sample_points,
                           const GlueConfig& config);

/// psi jets of one sample point: (class, member) -> jet in member coords.
using PointPsi = std::map<std::pair<int, int>, Jet>;

struct PsiSolution {
    std::vector<PointPsi> per_point; // aligned with system blocks
    double residual = 0.0;           // max |A x - b| over all rows
    long long rank = 0;              // summed numerical rank
    std::vector<Jet> anchor_psis;    // per (class*N + member): jet at the class anchor
};

/// Minimum-norm least squares per point block.  Throws InconsistentTargets
/// when the residual exceeds the tolerance, RankDeficiencyBeyondTolerance on
/// numerical rank collapse.
PsiSolution solve_psi(const OverlapSystem& system, const AtlasCover& cover,
                      const GlueConfig& config);

/// Everything needed to evaluate the glued metric of the bulk.
struct GlobalMetricSpec {
    ProductBulk bulk;
    AtlasCover cover;
    TargetSet targets;
    OverlapSystem system;
    PsiSolution psis;
    GlueConfig config;
};

/// Base metric pulled back to chart coordinates about a global point, as
/// n-variable jets (the exact g_M | chart presentation).
ChartMetric base_metric_in_chart(const ProductBulk& bulk, int chart,
                                 const std::vector<double>& p, int order);

/// The glued metric on chart `chart` about sample point `sample`: base block
/// pulled back through pi plus the fiber-fiber block sum f psi (dx o pr_F)^2.
/// Throws DegenerateFiberComponent when no bell is positive at the point.
ChartMetric assemble_metric(const GlobalMetricSpec& spec, int sample, int chart);

/// Same fiber assembly from caller-provided psi jets (chart coordinates about
/// the given global point); supports hand-built metrics in tests and tools.
ChartMetric assemble_metric_at(const ProductBulk& bulk, const AtlasCover& cover, int chart,
                               const std::vector<double>& p, const PointPsi& psi, int order);

/// Base-block restriction to the y = 0 slice: returns the n-dimensional
/// chart metric, coefficient-identical to base_metric_in_chart.
ChartMetric restrict_to_base(const GlobalMetricSpec& spec, int sample, int chart);

} // namespace einbulk
