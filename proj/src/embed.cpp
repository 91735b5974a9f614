#include "einbulk/embed.hpp"

#include "einbulk/errors.hpp"

#include <Eigen/Dense>

#include <cmath>

namespace einbulk {

namespace {

/// Copy an x-jet (n vars) into the y^m coefficient block of a bulk jet
/// (n+1 vars), truncating x-degrees beyond order - m.
void add_y_block(Jet& bulk, int m, const Jet& xjet) {
    int n = xjet.nvars();
    const JetLayout& lx = xjet.layout();
    MultiIndex mi(n + 1, 0);
    for (int i = 0; i < lx.size(); ++i) {
        if (xjet[i] == 0.0) continue;
        if (lx.degree(i) + m > bulk.order()) continue;
        for (int v = 0; v < n; ++v) mi[v] = lx.exponent(i, v);
        mi[n] = m;
        bulk.set_coeff(mi, bulk.coeff(mi) + xjet[i]);
    }
}

/// Extract the y^m coefficient block of a bulk jet as an x-jet.
Jet y_block(const Jet& bulk, int m) {
    int n = bulk.nvars() - 1;
    Jet out(n, std::max(bulk.order() - m, 0));
    const JetLayout& lb = bulk.layout();
    MultiIndex mi(n, 0);
    for (int i = 0; i < lb.size(); ++i) {
        if (bulk[i] == 0.0) continue;
        if (lb.exponent(i, n) != m) continue;
        for (int v = 0; v < n; ++v) mi[v] = lb.exponent(i, v);
        if (total_degree(mi) <= out.order()) out.set_coeff(mi, bulk[i]);
    }
    return out;
}

BulkChartMetric bulk_from_blocks(const SeedMetric& seed, const SymJets* c1, double epsilon,
                                 int order) {
    int n = seed.n;
    SymJets base(n, n + 1, order);
    std::vector<int> vmap(n);
    for (int v = 0; v < n; ++v) vmap[v] = v;
    for (int i = 0; i < n; ++i)
        for (int j = i; j < n; ++j) {
            Jet comp(n + 1, order);
            add_y_block(comp, 0, jet_truncate(seed.g.g(i, j), order));
            if (c1) add_y_block(comp, 1, jet_truncate((*c1)(i, j), std::max(order - 1, 0)));
            base(i, j) = comp;
        }
    BulkChartMetric bulk;
    bulk.base.dim = n;
    bulk.base.g = base;
    bulk.base.signature = seed.g.signature;
    bulk.epsilon = epsilon;
    bulk.phi = Jet::constant(n + 1, order, 1.0);
    return bulk;
}

/// One pass of the ij-recursion: the y^m coefficient of the ij Einstein
/// residual fixes the y^(m+2) metric block,
///   c^(m+2) = 2 eps / ((m+2)(m+1)) * [residual with c^(m+2) = 0]_{y^m}.
void run_recursion(BulkChartMetric& bulk, double lambda, int order) {
    int n = bulk.base.dim;
    for (int m = 0; m + 2 <= order; ++m) {
        ChartMetric full = bulk.to_full();
        RicciField res = einstein_residual(full, lambda);
        double scale = 2.0 * bulk.epsilon / ((m + 2.0) * (m + 1.0));
        for (int i = 0; i < n; ++i)
            for (int j = i; j < n; ++j) {
                Jet block = y_block(res(i, j), m);
                if (!block.all_finite())
                    throw RecursionBreakdown("non-finite coefficients at y-order " +
                                             std::to_string(m + 2));
                add_y_block(bulk.base.g(i, j), m + 2, jet_scale(block, scale));
            }
    }
}

double constraint_norm_of(const std::vector<Jet>& comps) {
    double m = 0.0;
    for (const Jet& c : comps) m = std::max(m, max_abs_coeff(c));
    return m;
}

} // namespace

SymJets proportional_initial_data(const SeedMetric& seed, double lambda0, int order) {
    SymJets c1(seed.n, seed.n, order);
    for (int i = 0; i < seed.n; ++i)
        for (int j = i; j < seed.n; ++j)
            c1(i, j) = jet_scale(jet_truncate(seed.g.g(i, j), order), 2.0 * lambda0);
    return c1;
}

std::vector<Jet> constraint_components(const SeedMetric& seed, const SymJets& c1, double lambda,
                                       double epsilon, int order) {
    BulkChartMetric bulk = bulk_from_blocks(seed, &c1, epsilon, order);
    // the (n+1,n+1) residual at y=0 reads c^(2); fill it from the ij evolution
    int n = seed.n;
    {
        ChartMetric full = bulk.to_full();
        RicciField res = einstein_residual(full, lambda);
        double scale = 2.0 * epsilon / 2.0;
        for (int i = 0; i < n; ++i)
            for (int j = i; j < n; ++j)
                add_y_block(bulk.base.g(i, j), 2, jet_scale(y_block(res(i, j), 0), scale));
    }
    ChartMetric full = bulk.to_full();
    RicciField res = einstein_residual(full, lambda);
    std::vector<Jet> comps;
    for (int i = 0; i <= n; ++i) comps.push_back(y_block(res(i, n), 0));
    return comps;
}

SymJets initial_data_solve(const SeedMetric& seed, double lambda, double epsilon, int order) {
    int n = seed.n;
    if (n == 1 && lambda != 0.0)
        throw DimensionTwoWithNonzeroLambda(
            "bulk dimension 2: Einstein factor undefined, only Ricci-flat 1-d seeds extend");

    int c1_order = std::max(order - 1, 0);
    const int ncoeff = JetLayout::get(n, c1_order)->size();
    const int nsym = n * (n + 1) / 2;
    const int nunknowns = 1 + nsym * ncoeff;

    auto make_c1 = [&](const Eigen::VectorXd& u) {
        SymJets c1 = proportional_initial_data(seed, u[0], c1_order);
        int pos = 1;
        for (int i = 0; i < n; ++i)
            for (int j = i; j < n; ++j) {
                Jet s(n, c1_order);
                for (int k = 0; k < ncoeff; ++k) s[k] = u[pos++];
                c1(i, j) = jet_add(c1(i, j), jet_scale(s, 2.0));
            }
        return c1;
    };
    auto residual_vec = [&](const Eigen::VectorXd& u) {
        std::vector<Jet> comps = constraint_components(seed, make_c1(u), lambda, epsilon, order);
        int per = comps[0].layout().size();
        Eigen::VectorXd r(static_cast<int>(comps.size()) * per);
        int pos = 0;
        for (const Jet& c : comps)
            for (int k = 0; k < per; ++k) r[pos++] = c[k];
        return r;
    };

    Eigen::VectorXd u = Eigen::VectorXd::Zero(nunknowns);
    u[0] = 0.1;
    Eigen::VectorXd r = residual_vec(u);
    double best = r.cwiseAbs().maxCoeff();
    const double tol = 1e-8;

    for (int iter = 0; iter < 100 && best > tol; ++iter) {
        // forward-difference Jacobian
        Eigen::MatrixXd J(r.size(), nunknowns);
        for (int c = 0; c < nunknowns; ++c) {
            double h = 1e-6 * std::max(1.0, std::abs(u[c]));
            Eigen::VectorXd up = u;
            up[c] += h;
            J.col(c) = (residual_vec(up) - r) / h;
        }
        Eigen::VectorXd step = J.completeOrthogonalDecomposition().solve(-r);
        double alpha = 1.0;
        Eigen::VectorXd u_next;
        Eigen::VectorXd r_next;
        double next_norm = best;
        while (alpha > 1e-4) {
            u_next = u + alpha * step;
            r_next = residual_vec(u_next);
            next_norm = r_next.cwiseAbs().maxCoeff();
            if (next_norm < best) break;
            alpha *= 0.5; // damping on residual increase
        }
        if (next_norm >= best) break; // stagnation
        u = u_next;
        r = r_next;
        best = next_norm;
    }

    if (best > tol)
        throw ConstraintSolveFailed(best, "constraint solve stagnated at residual " +
                                              std::to_string(best));
    return make_c1(u);
}

EmbeddingResult extend_metric(const SeedMetric& seed, double lambda, double epsilon, int order,
                              const std::optional<SymJets>& initial) {
    if (order < 2) throw ManifestError("extend_metric: order must be at least 2");
    if (seed.g.g.order() < order)
        throw ManifestError("extend_metric: seed jets must carry order >= the requested order");
    if (seed.n == 1 && lambda != 0.0)
        throw DimensionTwoWithNonzeroLambda(
            "bulk dimension 2: Einstein factor undefined, only Ricci-flat 1-d seeds extend");
    if (epsilon * epsilon != 1.0) throw ManifestError("extend_metric: epsilon must be +1 or -1");

    SymJets c1 = initial ? *initial : initial_data_solve(seed, lambda, epsilon, order);

    EmbeddingResult result;
    result.bulk = bulk_from_blocks(seed, &c1, epsilon, order);
    result.lambda = lambda;
    result.order = order;
    run_recursion(result.bulk, lambda, order);

    CertifyReport rep = certify(result, seed);
    result.residual_norm = rep.residual_norm;
    result.constraint_norm = rep.constraint_norm;
    return result;
}

CertifyReport certify(const EmbeddingResult& result, const SeedMetric& seed) {
    CertifyReport rep;
    int n = result.bulk.base.dim;
    int order = result.order;

    // slice condition: y^0 coefficients equal the seed coefficients exactly
    double dev = 0.0;
    for (int i = 0; i < n; ++i)
        for (int j = i; j < n; ++j) {
            Jet slice = y_block(result.bulk.base.g(i, j), 0);
            Jet diff = jet_sub(slice, jet_truncate(seed.g.g(i, j), slice.order()));
            dev = std::max(dev, max_abs_coeff(diff));
        }
    rep.slice_max_deviation = dev;

    // independent residual measurement on the finished bulk
    ChartMetric full = result.bulk.to_full();
    RicciField res = einstein_residual(full, result.lambda);
    rep.residual_by_degree = residual_by_degree(res, std::max(order - 2, 0));
    rep.residual_norm = residual_norm(res, std::max(order - 2, 0));

    std::vector<Jet> constraints;
    for (int i = 0; i <= n; ++i) constraints.push_back(y_block(res(i, n), 0));
    rep.constraint_norm = constraint_norm_of(constraints);

    bool eps_ok = result.bulk.epsilon * result.bulk.epsilon == 1.0;
    Jet phi_dev = jet_sub(result.bulk.phi,
                          Jet::constant(result.bulk.phi.nvars(), result.bulk.phi.order(), 1.0));
    rep.block_form_ok = eps_ok && max_abs_coeff(phi_dev) == 0.0;
    return rep;
}

} // namespace einbulk
