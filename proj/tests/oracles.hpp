#pragma once

// Test-side oracles, deliberately independent of the jet pipeline: curvature
// quantities from central finite differences on pointwise-evaluated metrics,
// plus a brute-force subset enumerator.

#include <Eigen/Dense>

#include <functional>
#include <random>
#include <vector>

namespace oracle {

using MetricFn = std::function<Eigen::MatrixXd(const Eigen::VectorXd&)>;

/// Gamma^c_ab at x from 4th-order central differences of the metric.
std::vector<Eigen::MatrixXd> christoffel_fd(const MetricFn& g, const Eigen::VectorXd& x,
                                            double h = 1e-2);

/// R_ab at x, differencing the Christoffel field with the same stencil.
Eigen::MatrixXd ricci_fd(const MetricFn& g, const Eigen::VectorXd& x, double h = 1e-2);

/// Number of nonempty subsets of m items, counted one bitmask at a time.
long long count_nonempty_subsets(int m);

/// Random polynomial perturbation of the flat metric, exactly evaluable both
/// pointwise and as jets.
struct PolyTerm {
    double c;
    std::vector<int> e;
};

struct PolyMetric {
    int dim = 0;
    // upper triangle [i][j-i] for i <= j
    std::vector<std::vector<std::vector<PolyTerm>>> terms;

    Eigen::MatrixXd eval(const Eigen::VectorXd& x) const;
    MetricFn fn() const;
};

PolyMetric random_poly_metric(std::mt19937_64& rng, int dim, int max_degree = 3,
                              double amplitude = 0.08);

} // namespace oracle
