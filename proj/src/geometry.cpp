#include "einbulk/geometry.hpp"

#include "einbulk/errors.hpp"

#include <Eigen/Dense>

#include <cmath>

namespace einbulk {

SymJets::SymJets(int dim, int nvars, int order) : dim_(dim) {
    u_.assign(dim * (dim + 1) / 2, Jet(nvars, order));
}

ChristoffelField::ChristoffelField(int dim, int nvars, int order) : dim_(dim) {
    u_.assign(dim * dim * (dim + 1) / 2, Jet(nvars, order));
}

namespace {

Eigen::MatrixXd constant_matrix(const SymJets& g) {
    Eigen::MatrixXd m(g.dim(), g.dim());
    for (int i = 0; i < g.dim(); ++i)
        for (int j = 0; j < g.dim(); ++j) m(i, j) = g(i, j).constant_term();
    return m;
}

} // namespace

ChartMetric make_chart_metric(int dim, const SymJets& components) {
    ChartMetric m;
    m.dim = dim;
    m.g = components;
    Eigen::MatrixXd g0 = constant_matrix(components);
    Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> es(g0);
    m.signature.resize(dim);
    for (int i = 0; i < dim; ++i) m.signature[i] = es.eigenvalues()[i] >= 0.0 ? 1 : -1;
    return m;
}

ChartMetric BulkChartMetric::to_full() const {
    int n = base.dim;
    int nv = base.g.nvars();
    int order = base.g.order();
    SymJets full(n + 1, nv, order);
    for (int i = 0; i < n; ++i)
        for (int j = i; j < n; ++j) full(i, j) = base.g(i, j);
    full(n, n) = jet_scale(jet_mul(phi, phi), epsilon);
    return make_chart_metric(n + 1, full);
}

SymJets inverse_metric(const ChartMetric& g) {
    int d = g.dim;
    int nv = g.g.nvars();
    int order = g.g.order();
    Eigen::MatrixXd g0 = constant_matrix(g.g);
    Eigen::FullPivLU<Eigen::MatrixXd> lu(g0);
    if (!lu.isInvertible())
        throw SingularMetric("constant-term metric matrix is singular (|det| = " +
                             std::to_string(std::abs(g0.determinant())) + ")");
    Eigen::MatrixXd inv0 = lu.inverse();

    // g = g0 + h with h vanishing at the center; then
    // g^{-1} = (sum_k (-g0^{-1} h)^k) g0^{-1}, truncated at the jet order.
    std::vector<Jet> X(d * d, Jet(nv, order)); // g0^{-1} h
    for (int i = 0; i < d; ++i)
        for (int j = 0; j < d; ++j) {
            Jet acc(nv, order);
            for (int k = 0; k < d; ++k) {
                Jet hkj = g.g(k, j);
                hkj[0] = 0.0;
                acc = jet_add(acc, jet_scale(hkj, inv0(i, k)));
            }
            X[i * d + j] = acc;
        }

    std::vector<Jet> series(d * d, Jet(nv, order)); // sum (-X)^k
    std::vector<Jet> power(d * d, Jet(nv, order));  // current (-X)^k
    for (int i = 0; i < d; ++i) {
        series[i * d + i] = Jet::constant(nv, order, 1.0);
        power[i * d + i] = Jet::constant(nv, order, 1.0);
    }
    for (int k = 1; k <= order; ++k) {
        std::vector<Jet> next(d * d, Jet(nv, order));
        for (int i = 0; i < d; ++i)
            for (int j = 0; j < d; ++j) {
                Jet acc(nv, order);
                for (int m = 0; m < d; ++m)
                    acc = jet_add(acc, jet_mul(power[i * d + m], X[m * d + j]));
                next[i * d + j] = jet_neg(acc);
            }
        power = std::move(next);
        for (int i = 0; i < d * d; ++i) series[i] = jet_add(series[i], power[i]);
    }

    SymJets res(d, nv, order);
    for (int i = 0; i < d; ++i)
        for (int j = i; j < d; ++j) {
            Jet acc(nv, order);
            for (int m = 0; m < d; ++m)
                acc = jet_add(acc, jet_scale(series[i * d + m], inv0(m, j)));
            res(i, j) = acc;
        }
    return res;
}

ChristoffelField christoffel(const ChartMetric& g) {
    int d = g.dim;
    int nv = g.g.nvars();
    int order = g.g.order();
    if (nv < d) throw VariableMismatch("christoffel: metric jets carry fewer variables than dim");
    SymJets ginv = inverse_metric(g);

    // first derivatives d_M g_AB
    std::vector<Jet> dg(d * d * d);
    auto dgi = [&](int m, int a, int b) -> Jet& {
        if (a > b) std::swap(a, b);
        return dg[(m * d + a) * d + b];
    };
    for (int m = 0; m < d; ++m)
        for (int a = 0; a < d; ++a)
            for (int b = a; b < d; ++b) dgi(m, a, b) = jet_diff(g.g(a, b), m);

    ChristoffelField gamma(d, nv, std::max(order - 1, 0));
    for (int c = 0; c < d; ++c)
        for (int a = 0; a < d; ++a)
            for (int b = a; b < d; ++b) {
                Jet acc(nv, std::max(order - 1, 0));
                for (int m = 0; m < d; ++m) {
                    Jet bracket = jet_add(jet_sub(dgi(a, b, m), dgi(m, a, b)), dgi(b, m, a));
                    acc = jet_add(acc, jet_mul(ginv(c, m), bracket));
                }
                gamma(c, a, b) = jet_scale(acc, 0.5);
            }
    return gamma;
}

RicciField ricci(const ChristoffelField& gamma) {
    int d = gamma.dim();
    const Jet& probe = gamma(0, 0, 0);
    int nv = probe.nvars();
    int order = std::max(probe.order() - 1, 0);

    // trace Gamma^N_MN per M
    std::vector<Jet> trace(d);
    for (int m = 0; m < d; ++m) {
        Jet acc(nv, probe.order());
        for (int n = 0; n < d; ++n) acc = jet_add(acc, gamma(n, m, n));
        trace[m] = acc;
    }

    RicciField r(d, nv, order);
    for (int a = 0; a < d; ++a)
        for (int b = a; b < d; ++b) {
            Jet acc(nv, order);
            for (int m = 0; m < d; ++m) {
                acc = jet_add(acc, jet_diff(gamma(m, a, b), m));
                acc = jet_add(acc, jet_truncate(jet_mul(gamma(m, a, b), trace[m]), order));
            }
            acc = jet_sub(acc, jet_diff(trace[a], b));
            for (int m = 0; m < d; ++m)
                for (int n = 0; n < d; ++n)
                    acc = jet_sub(acc, jet_truncate(jet_mul(gamma(m, a, n), gamma(n, m, b)), order));
            r(a, b) = acc;
        }
    return r;
}

Jet scalar_curvature(const ChartMetric& g, const RicciField& ric) {
    SymJets ginv = inverse_metric(g);
    Jet acc(g.g.nvars(), ric.order());
    for (int a = 0; a < g.dim; ++a)
        for (int b = 0; b < g.dim; ++b)
            acc = jet_add(acc, jet_truncate(jet_mul(ginv(a, b), ric(a, b)), ric.order()));
    return acc;
}

RicciField einstein_residual(const ChartMetric& g, double lambda) {
    RicciField ric = ricci(christoffel(g));
    if (lambda == 0.0) return ric; // Ricci-flat case, any dimension
    if (g.dim == 2)
        throw DimensionTwoWithNonzeroLambda(
            "Einstein factor 2*Lambda/(D-2) is undefined at D = 2");
    double factor = 2.0 * lambda / (g.dim - 2);
    RicciField res(g.dim, g.g.nvars(), ric.order());
    for (int a = 0; a < g.dim; ++a)
        for (int b = a; b < g.dim; ++b)
            res(a, b) = jet_sub(ric(a, b), jet_scale(jet_truncate(g.g(a, b), ric.order()), factor));
    return res;
}

RicciField field_equation_residual(const ChartMetric& g, const StressEnergy& T, double lambda) {
    RicciField ric = ricci(christoffel(g));
    Jet R = scalar_curvature(g, ric);
    int order = ric.order();
    RicciField res(g.dim, g.g.nvars(), order);
    for (int a = 0; a < g.dim; ++a)
        for (int b = a; b < g.dim; ++b) {
            Jet gab = jet_truncate(g.g(a, b), order);
            Jet acc = jet_sub(ric(a, b), jet_scale(jet_mul(R, gab), 0.5));
            acc = jet_sub(acc, jet_scale(jet_truncate(T.T(a, b), order), T.k));
            acc = jet_add(acc, jet_scale(gab, lambda));
            res(a, b) = acc;
        }
    return res;
}

std::vector<Jet> covariant_divergence(const ChartMetric& g, const SymJets& S) {
    int d = g.dim;
    SymJets ginv = inverse_metric(g);
    ChristoffelField gamma = christoffel(g);
    int order = std::max(S.order() - 1, 0);
    std::vector<Jet> out(d, Jet(g.g.nvars(), order));
    for (int b = 0; b < d; ++b) {
        Jet acc(g.g.nvars(), order);
        for (int a = 0; a < d; ++a)
            for (int m = 0; m < d; ++m) {
                Jet nabla = jet_diff(S(a, b), m);
                for (int l = 0; l < d; ++l) {
                    nabla = jet_sub(nabla, jet_truncate(jet_mul(gamma(l, m, a), S(l, b)), order));
                    nabla = jet_sub(nabla, jet_truncate(jet_mul(gamma(l, m, b), S(a, l)), order));
                }
                acc = jet_add(acc, jet_truncate(jet_mul(ginv(a, m), nabla), order));
            }
        out[b] = acc;
    }
    return out;
}

SymJets pushforward_linear(const SymJets& s, const std::vector<std::vector<double>>& P) {
    int d = s.dim();
    int nv = s.nvars();
    int order = s.order();
    std::vector<Jet> args;
    args.reserve(nv);
    for (int v = 0; v < nv; ++v) {
        Jet acc(nv, order);
        for (int j = 0; j < nv; ++j) {
            double pij = v < d && j < d ? P[v][j] : (v == j ? 1.0 : 0.0);
            if (pij != 0.0) acc = jet_add(acc, jet_scale(Jet::variable(nv, order, j), pij));
        }
        args.push_back(acc);
    }
    SymJets out(d, nv, order);
    for (int c = 0; c < d; ++c)
        for (int e = c; e < d; ++e) {
            Jet acc(nv, order);
            for (int a = 0; a < d; ++a)
                for (int b = 0; b < d; ++b) {
                    double w = P[a][c] * P[b][e];
                    if (w != 0.0) acc = jet_add(acc, jet_scale(jet_substitute(s(a, b), args), w));
                }
            out(c, e) = acc;
        }
    return out;
}

double residual_norm(const SymJets& s, int up_to_degree) {
    double m = 0.0;
    for (int a = 0; a < s.dim(); ++a)
        for (int b = a; b < s.dim(); ++b)
            m = std::max(m, max_abs_coeff_up_to(s(a, b), up_to_degree));
    return m;
}

std::vector<double> residual_by_degree(const SymJets& s, int max_degree) {
    std::vector<double> out(max_degree + 1, 0.0);
    for (int a = 0; a < s.dim(); ++a)
        for (int b = a; b < s.dim(); ++b) {
            const Jet& j = s(a, b);
            for (int d = 0; d <= std::min(max_degree, j.order()); ++d)
                for (int i = j.layout().degree_begin(d); i < j.layout().degree_end(d); ++i)
                    out[d] = std::max(out[d], std::abs(j[i]));
        }
    return out;
}

} // namespace einbulk
