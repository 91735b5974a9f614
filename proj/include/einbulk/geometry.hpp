#pragma once

#include "einbulk/jets.hpp"

#include <vector>

namespace einbulk {

/// Symmetric rank-2 field of jets on one chart (upper-triangular storage).
class SymJets {
public:
    SymJets() = default;
    SymJets(int dim, int nvars, int order);

    int dim() const { return dim_; }
    const Jet& operator()(int i, int j) const { return u_[idx(i, j)]; }
    Jet& operator()(int i, int j) { return u_[idx(i, j)]; }

    int nvars() const { return u_.empty() ? 0 : u_[0].nvars(); }
    int order() const { return u_.empty() ? 0 : u_[0].order(); }

private:
    int idx(int i, int j) const {
        if (i > j) std::swap(i, j);
        return i * dim_ - i * (i - 1) / 2 + (j - i);
    }
    int dim_ = 0;
    std::vector<Jet> u_;
};

/// Metric component array g_AB on a chart.  `dim` is the tensor dimension;
/// the jets may carry more variables than `dim` (bulk base blocks depend on
/// the fiber coordinate as well).
struct ChartMetric {
    int dim = 0;
    SymJets g;
    std::vector<int> signature; // diagnostics only

    const Jet& operator()(int i, int j) const { return g(i, j); }
};

/// Builds the metric and computes the signature from the constant-term matrix.
ChartMetric make_chart_metric(int dim, const SymJets& components);

/// Block metric of an embedding chart: base block g~_ij (n-dim, jets in n+1
/// variables), fiber block eps * phi^2 with vanishing off-diagonal.
struct BulkChartMetric {
    ChartMetric base; // dim n, jets in n+1 variables
    double epsilon = 1.0;
    Jet phi;

    int bulk_dim() const { return base.dim + 1; }
    ChartMetric to_full() const;
};

/// Connection coefficients, upper index first: gamma(c, a, b) = Gamma^c_ab.
class ChristoffelField {
public:
    ChristoffelField() = default;
    ChristoffelField(int dim, int nvars, int order);

    int dim() const { return dim_; }
    const Jet& operator()(int c, int a, int b) const { return u_[slot(c, a, b)]; }
    Jet& operator()(int c, int a, int b) { return u_[slot(c, a, b)]; }

private:
    int slot(int c, int a, int b) const {
        if (a > b) std::swap(a, b);
        return c * dim_ * (dim_ + 1) / 2 + a * dim_ - a * (a - 1) / 2 + (b - a);
    }
    int dim_ = 0;
    std::vector<Jet> u_;
};

using RicciField = SymJets;

struct StressEnergy {
    SymJets T;
    double k = 1.0;
};

/// g^{AB} with g^{AC} g_CB = delta^A_B to jet order; throws SingularMetric.
SymJets inverse_metric(const ChartMetric& g);

/// Gamma^C_AB = 1/2 g^{CM} (-d_M g_AB + d_A g_BM + d_B g_MA).
ChristoffelField christoffel(const ChartMetric& g);

/// R_AB = d_M Gamma^M_AB + Gamma^M_AB Gamma^N_MN
///        - d_B Gamma^M_AM - Gamma^M_AN Gamma^N_MB.
RicciField ricci(const ChristoffelField& gamma);

/// R = g^{AB} R_AB.
Jet scalar_curvature(const ChartMetric& g, const RicciField& ric);

/// Ric(g) - (2 Lambda / (D - 2)) g; plain Ricci when Lambda = 0.
/// Throws DimensionTwoWithNonzeroLambda when D = 2 and Lambda != 0.
RicciField einstein_residual(const ChartMetric& g, double lambda);

/// Ric - 1/2 R g - k T + Lambda g.
RicciField field_equation_residual(const ChartMetric& g, const StressEnergy& T, double lambda);

/// (div S)_B = g^{AM} (d_M S_AB - Gamma^L_MA S_LB - Gamma^L_MB S_AL);
/// used for the contracted Bianchi diagnostics.
std::vector<Jet> covariant_divergence(const ChartMetric& g, const SymJets& S);

/// Congruence transform under the constant linear change x = P x':
/// g'_CD(x') = P^A_C P^B_D g_AB(P x').
SymJets pushforward_linear(const SymJets& s, const std::vector<std::vector<double>>& P);

/// Max coefficient magnitude over components through the given total degree.
double residual_norm(const SymJets& s, int up_to_degree);
/// Per-degree max coefficient magnitude, degrees 0..max_degree.
std::vector<double> residual_by_degree(const SymJets& s, int max_degree);

} // namespace einbulk
