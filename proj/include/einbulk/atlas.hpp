#pragma once

#include "einbulk/bells.hpp"
#include "einbulk/jets.hpp"

#include <Eigen/Dense>

#include <cstdint>
#include <string>
#include <vector>

namespace einbulk {

/// Axis-aligned chart domain in the global coordinates of a manifold spec.
struct ChartBox {
    std::vector<double> center;
    std::vector<double> half;
};

/// A manifold operationalized as a finite chart list over a flat coordinate
/// space with optional per-axis periods (0 = line axis).  Chart coordinate
/// maps are the per-axis normalizations xi_k = wrap(x_k - c_k) / h_k, so every
/// chart image is (-1,1)^dim and all transitions are affine.
struct ManifoldSpec {
    std::string name;
    int dim = 0;
    std::vector<double> periods;                   // size dim, 0 for line axes
    std::vector<ChartBox> charts;
    std::vector<std::vector<std::string>> metric;  // base-metric exprs, global coords
    int fiber_axes = 0;                            // trailing axes of the fiber factor
};

/// Shortest periodic representative of a coordinate difference.
double wrap_delta(double dx, double period);

/// Catalog ids: "circle", "torus", "interval", "flat1", "flat2".
ManifoldSpec catalog_manifold(const std::string& id);
/// Product bulk chart structure M x F with a 1-dimensional fiber
/// ("interval" or "circle"); fiber charts share one coordinate scale.
ManifoldSpec product_with_fiber(const ManifoldSpec& base, const std::string& fiber_kind);

bool chart_contains(const ManifoldSpec& m, int chart, const std::vector<double>& p);
/// Normalized chart coordinates of a global point.
std::vector<double> chart_coords(const ManifoldSpec& m, int chart, const std::vector<double>& p);
/// Global point of normalized chart coordinates.
std::vector<double> chart_point(const ManifoldSpec& m, int chart, const std::vector<double>& xi);

/// One member of a W-class: an invertible linear variant of the chart
/// coordinates (base-block rotation and scale, separate fiber scale).  The
/// class anchor maps to the origin in every member.
struct AffineVariant {
    Eigen::MatrixXd A;
    Eigen::MatrixXd Ainv;
};

/// N distinct coordinate systems riding on one Q-chart, together with the
/// inverted-ball radius in member-1 coordinates.
struct CoverClass {
    int chart = 0;
    std::vector<AffineVariant> members;
    double radius = 0.0;
};

/// The three covers of a finite atlas: Q-charts (the manifold spec charts),
/// the W-classes of N variants each, and the inverted balls carrying the
/// bell functions.
struct AtlasCover {
    ManifoldSpec manifold;
    int N = 0;
    std::vector<CoverClass> classes;            // one per chart
    std::vector<std::vector<int>> overlap;      // chart adjacency
    std::vector<std::vector<double>> sample_points;
    std::vector<int> multiplicity_histogram;    // index = number of covering charts
};

/// Uniform grid over the spec: `per_axis` points per axis; line axes are
/// sampled within `line_band` of their normalized chart range.
std::vector<std::vector<double>> default_sample_grid(const ManifoldSpec& m, int per_axis,
                                                     double line_band = 0.15);

/// Halton low-discrepancy point in [0,1)^dim.
std::vector<double> halton_point(std::uint64_t index, int dim);

/// Build the Q/W/B cover structure: N affine variants per chart (seeded,
/// |det| bounded away from 0), ball radii at 0.9 x the largest radius fitting
/// in the intersection of the variant images (bisection), multiplicity
/// verified at the sample points.  Throws CoverageGap / MultiplicityExceeded.
AtlasCover build_cover(const ManifoldSpec& m, int N,
                       const std::vector<std::vector<double>>& sample_points,
                       std::uint64_t seed);

/// Bell of a class, in member-1 coordinates (center at the class anchor).
/// chart_id is "Q<j>/B"; plain "Q<j>" ids name untransformed chart coords.
BellFunction class_bell(const AtlasCover& cover, int cls);
/// The full family {f_ia}: one entry per (class, member); members of a class
/// share values and differ only in the attached coordinate system.
std::vector<BellFunction> cover_bell_family(const AtlasCover& cover);
/// Value of the class bell at a global manifold point.
double class_bell_value(const AtlasCover& cover, int cls, const std::vector<double>& p);
/// The class bell as a jet in the normalized coordinates of chart `chart`
/// about the global point p (which must lie in that chart).
Jet class_bell_jet_in_chart(const AtlasCover& cover, int cls, int chart,
                            const std::vector<double>& p, int order);
/// Affine presentation of class-member coordinates as a function of the
/// chart-`chart` coordinate offsets z about p: member coords = L z + b,
/// where b is the member image of p itself.
void member_coords_in_chart(const AtlasCover& cover, int cls, int member, int chart,
                            const std::vector<double>& p, Eigen::MatrixXd& L,
                            Eigen::VectorXd& b);

struct PositivityReport {
    double min_sum = 0.0;
    bool pass = false;
    std::vector<double> witness;
};

/// Min over sweep points of the summed bell family; pass iff > 0.
PositivityReport positivity_check(const AtlasCover& cover,
                                  const std::vector<BellFunction>& bells,
                                  const std::vector<std::vector<double>>& sweep);

} // namespace einbulk
