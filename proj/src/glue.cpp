#include "einbulk/glue.hpp"

#include "einbulk/errors.hpp"
#include "einbulk/expr.hpp"

#include <algorithm>
#include <cmath>

namespace einbulk {

ProductBulk make_product_bulk(const ManifoldSpec& base, const std::string& fiber_kind) {
    ProductBulk bulk;
    bulk.base = base;
    bulk.fiber_kind = fiber_kind;
    bulk.total = product_with_fiber(base, fiber_kind);
    bulk.n = base.dim;
    return bulk;
}

long long count_equations(int n) {
    if (n < 1) throw ManifestError("count_equations: n must be at least 1");
    long long m = 2LL * n + 5;
    for (int t = 2; t <= n; ++t) {
        long long num = 1;
        for (int f = n + 3 - t; f <= n + 2; ++f) num *= f;
        long long den = 1;
        for (int f = 2; f <= t; ++f) den *= f;
        m += num / den;
    }
    return m;
}

SeedMetric chart_seed(const ProductBulk& bulk, int chart, int order,
                      const std::vector<double>* base_point) {
    const ManifoldSpec& total = bulk.total;
    const ChartBox& box = total.charts[chart];
    int n = bulk.n;

    std::vector<double> x0(n);
    if (base_point) {
        std::vector<double> xi = chart_coords(total, chart, *base_point);
        for (int k = 0; k < n; ++k) x0[k] = box.center[k] + xi[k] * box.half[k];
    } else {
        for (int k = 0; k < n; ++k) x0[k] = box.center[k];
    }

    // exact affine pullback: g_ab(xi) = h_a h_b ghat_ab(x0 + h xi)
    std::vector<Jet> args;
    for (int k = 0; k < n; ++k)
        args.push_back(jet_scale(Jet::variable(n, order, k), box.half[k]));

    SymJets g(n, n, order);
    for (int i = 0; i < n; ++i)
        for (int j = i; j < n; ++j) {
            Jet expanded = expand(*parse(bulk.base.metric[i][j]), x0, order);
            g(i, j) = jet_scale(jet_substitute(expanded, args), box.half[i] * box.half[j]);
        }
    SeedMetric seed;
    seed.n = n;
    seed.g = make_chart_metric(n, g);
    return seed;
}

TargetSet target_components(const ProductBulk& bulk, const AtlasCover& cover,
                            const GlueConfig& config) {
    TargetSet targets;
    int nv = bulk.n + 1;
    for (int j = 0; j < static_cast<int>(bulk.total.charts.size()); ++j) {
        SeedMetric seed = chart_seed(bulk, j, config.order);
        EmbeddingResult ext = extend_metric(seed, config.lambda, config.epsilon, config.order);
        ChartMetric full = ext.bulk.to_full();
        targets.phi.push_back(full.g(nv - 1, nv - 1));
        targets.extensions.push_back(std::move(ext));
    }
    (void)cover;
    return targets;
}

namespace {

/// Monomials (L z)^beta of the linear member-coordinate offsets, indexed by
/// the unknown-jet layout.
std::vector<Jet> member_monomials(const Eigen::MatrixXd& L, int order) {
    int d = static_cast<int>(L.rows());
    std::vector<Jet> lin;
    for (int row = 0; row < d; ++row) {
        Jet u(d, order);
        for (int k = 0; k < d; ++k)
            if (L(row, k) != 0.0)
                u = jet_add(u, jet_scale(Jet::variable(d, order, k), L(row, k)));
        lin.push_back(u);
    }
    auto layout = JetLayout::get(d, order);
    std::vector<std::vector<Jet>> powers(d);
    for (int row = 0; row < d; ++row) powers[row].push_back(Jet::constant(d, order, 1.0));
    std::vector<Jet> mono;
    for (int i = 0; i < layout->size(); ++i) {
        Jet m = Jet::constant(d, order, 1.0);
        for (int row = 0; row < d; ++row) {
            int e = layout->exponent(i, row);
            while (static_cast<int>(powers[row].size()) <= e)
                powers[row].push_back(jet_mul(powers[row].back(), lin[row]));
            if (e > 0) m = jet_mul(m, powers[row][e]);
        }
        mono.push_back(m);
    }
    return mono;
}

} // namespace

std::vector<std::vector<double>> glue_sample_points(const ProductBulk& bulk,
                                                    const AtlasCover& cover,
                                                    const GlueConfig& config) {
    const ManifoldSpec& m = bulk.total;
    int d = m.dim;
    int fib = d - 1;
    std::vector<std::vector<double>> points;
    std::uint64_t h = 0;

    auto wrap_into = [&](double x, int axis) {
        if (m.periods[axis] > 0.0) {
            x = std::fmod(x, m.periods[axis]);
            if (x < 0.0) x += m.periods[axis];
        }
        return x;
    };

    // per-chart interiors, anchor first
    for (int j = 0; j < static_cast<int>(m.charts.size()); ++j) {
        const ChartBox& box = m.charts[j];
        std::vector<double> anchor(d);
        for (int k = 0; k < d; ++k) anchor[k] = wrap_into(box.center[k], k);
        points.push_back(anchor);
        for (int s = 1; s < config.interior_samples; ++s) {
            auto u = halton_point(h++, d);
            std::vector<double> p(d);
            for (int k = 0; k < d; ++k) {
                double xi = (u[k] - 0.5) * (k == fib ? 2.0 * config.fiber_band : 1.0);
                p[k] = wrap_into(box.center[k] + xi * box.half[k], k);
            }
            points.push_back(p);
        }
    }

    // pairwise overlap windows (periodic axes can meet in two windows)
    for (int j = 0; j < static_cast<int>(m.charts.size()); ++j)
        for (int jp : cover.overlap[j]) {
            if (jp < j) continue;
            const ChartBox& bj = m.charts[j];
            const ChartBox& bp = m.charts[jp];
            std::vector<std::vector<std::pair<double, double>>> axis_windows(d);
            for (int k = 0; k < d; ++k) {
                double base = wrap_delta(bp.center[k] - bj.center[k], m.periods[k]);
                std::vector<double> deltas{base};
                if (m.periods[k] > 0.0) {
                    deltas.push_back(base + m.periods[k]);
                    deltas.push_back(base - m.periods[k]);
                }
                for (double delta : deltas) {
                    double lo = std::max(-bj.half[k], delta - bp.half[k]);
                    double hi = std::min(bj.half[k], delta + bp.half[k]);
                    if (k == fib) {
                        lo = std::max(lo, -config.fiber_band * bj.half[k]);
                        hi = std::min(hi, config.fiber_band * bj.half[k]);
                    }
                    if (hi - lo > 1e-9) {
                        double inset = 0.05 * (hi - lo);
                        axis_windows[k].push_back({lo + inset, hi - inset});
                    }
                }
            }
            bool empty = false;
            std::size_t nboxes = 1;
            for (int k = 0; k < d; ++k) {
                if (axis_windows[k].empty()) empty = true;
                nboxes *= std::max<std::size_t>(axis_windows[k].size(), 1);
            }
            if (empty) continue;
            for (int s = 0; s < config.overlap_samples; ++s) {
                std::size_t box_idx = s % nboxes;
                auto u = halton_point(h++, d);
                std::vector<double> p(d);
                std::size_t rem = box_idx;
                for (int k = 0; k < d; ++k) {
                    const auto& wins = axis_windows[k];
                    const auto& w = wins[rem % wins.size()];
                    rem /= wins.size();
                    double local = w.first + u[k] * (w.second - w.first);
                    p[k] = wrap_into(bj.center[k] + local, k);
                }
                points.push_back(p);
            }
        }
    return points;
}

long long OverlapSystem::total_rows() const {
    long long r = 0;
    for (const auto& blk : blocks) r += blk.A.rows();
    return r;
}

long long OverlapSystem::total_unknowns() const {
    long long c = 0;
    for (const auto& blk : blocks) c += blk.A.cols();
    return c;
}

OverlapSystem build_system(const ProductBulk& bulk, const AtlasCover& cover,
                           const TargetSet& targets,
                           const std::vector<std::vector<double>>& sample_points,
                           const GlueConfig& config) {
    OverlapSystem sys;
    sys.n = bulk.n;
    sys.M = count_equations(bulk.n);
    sys.N = config.n_override > 0 ? config.n_override : static_cast<int>(sys.M) + 1;
    if (cover.N != sys.N)
        throw ManifestError("build_system: cover carries N=" + std::to_string(cover.N) +
                            " but the system needs N=" + std::to_string(sys.N));
    sys.coeff_order = config.coeff_order;

    const ManifoldSpec& total = bulk.total;
    int d = total.dim; // n + 1
    int q = config.coeff_order;
    auto layout = JetLayout::get(d, q);
    int ncoeff = layout->size();
    int nchart = static_cast<int>(total.charts.size());

    for (const auto& p : sample_points) {
        PointBlock blk;
        blk.point = p;
        for (int j = 0; j < nchart; ++j)
            if (chart_contains(total, j, p)) blk.charts.push_back(j);
        if (blk.charts.empty()) throw CoverageGap("glue sample point lies in no chart");
        for (int i = 0; i < static_cast<int>(cover.classes.size()); ++i)
            if (class_bell_value(cover, i, p) > 0.0) blk.active.push_back(i);
        if (blk.active.empty())
            throw CoverageGap("glue sample point is outside every bell support");

        int ncols = static_cast<int>(blk.active.size()) * sys.N * ncoeff;
        int nrows = static_cast<int>(blk.charts.size()) * ncoeff;
        blk.A = Eigen::MatrixXd::Zero(nrows, ncols);
        blk.b = Eigen::VectorXd::Zero(nrows);

        for (int ai = 0; ai < static_cast<int>(blk.active.size()); ++ai)
            for (int a = 0; a < sys.N; ++a)
                for (int k = 0; k < ncoeff; ++k) {
                    PsiUnknown u;
                    u.cls = blk.active[ai];
                    u.member = a;
                    u.beta = layout->exponents(k);
                    blk.unknowns.push_back(std::move(u));
                }

        int sigma = sys.n + 2 - static_cast<int>(blk.charts.size()) + 1;
        int row0 = 0;
        for (int j : blk.charts) {
            std::vector<double> xi_j = chart_coords(total, j, p);
            Jet phi = jet_truncate(jet_shift(targets.phi[j], xi_j), q);
            for (int k = 0; k < ncoeff; ++k) {
                SystemRow row;
                row.chart = j;
                row.alpha = layout->exponents(k);
                row.sigma_level = sigma;
                blk.rows.push_back(std::move(row));
                blk.b[row0 + k] = phi[k];
            }

            for (int ai = 0; ai < static_cast<int>(blk.active.size()); ++ai) {
                int cls = blk.active[ai];
                Jet f_ij = class_bell_jet_in_chart(cover, cls, j, p, q);
                for (int a = 0; a < sys.N; ++a) {
                    Eigen::MatrixXd L;
                    Eigen::VectorXd boff;
                    member_coords_in_chart(cover, cls, a, j, p, L, boff);
                    double deriv = L(d - 1, d - 1); // fiber-coordinate derivative
                    std::vector<Jet> mono = member_monomials(L, q);
                    int col0 = (ai * sys.N + a) * ncoeff;
                    for (int beta = 0; beta < ncoeff; ++beta) {
                        Jet contrib = jet_scale(jet_mul(f_ij, mono[beta]), deriv * deriv);
                        for (int k = 0; k < ncoeff; ++k)
                            blk.A(row0 + k, col0 + beta) = contrib[k];
                    }
                }
            }
            row0 += ncoeff;
        }
        sys.blocks.push_back(std::move(blk));
    }

    if (sys.total_unknowns() <= sys.total_rows())
        throw ManifestError("build_system: " + std::to_string(sys.total_rows()) +
                            " rows but only " + std::to_string(sys.total_unknowns()) +
                            " unknowns; the system must stay underdetermined");
    return sys;
}

PsiSolution solve_psi(const OverlapSystem& system, const AtlasCover& cover,
                      const GlueConfig& config) {
    PsiSolution sol;
    int d = system.n + 1;

    for (const PointBlock& blk : system.blocks) {
        Eigen::CompleteOrthogonalDecomposition<Eigen::MatrixXd> cod(blk.A);
        Eigen::VectorXd x = cod.solve(blk.b);
        if (!x.allFinite())
            throw RankDeficiencyBeyondTolerance("psi solve produced non-finite coefficients");
        double res = (blk.A * x - blk.b).cwiseAbs().maxCoeff();
        sol.residual = std::max(sol.residual, res);
        sol.rank += cod.rank();

        PointPsi psi;
        for (int u = 0; u < static_cast<int>(blk.unknowns.size()); ++u) {
            const PsiUnknown& uk = blk.unknowns[u];
            auto key = std::make_pair(uk.cls, uk.member);
            auto it = psi.find(key);
            if (it == psi.end()) it = psi.emplace(key, Jet(d, system.coeff_order)).first;
            it->second.set_coeff(uk.beta, x[u]);
        }
        sol.per_point.push_back(std::move(psi));
    }

    if (sol.residual > config.solve_tol)
        throw InconsistentTargets(sol.residual,
                                  "psi system residual " + std::to_string(sol.residual) +
                                      " exceeds tolerance");

    // anchor jets: the solved psi at the sample point nearest each class anchor
    const ManifoldSpec& m = cover.manifold;
    sol.anchor_psis.assign(cover.classes.size() * system.N, Jet(d, system.coeff_order));
    for (int cls = 0; cls < static_cast<int>(cover.classes.size()); ++cls) {
        const ChartBox& box = m.charts[cover.classes[cls].chart];
        int best = -1;
        double best_d = 0.0;
        for (int bi = 0; bi < static_cast<int>(system.blocks.size()); ++bi) {
            const PointBlock& blk = system.blocks[bi];
            if (std::find(blk.active.begin(), blk.active.end(), cls) == blk.active.end())
                continue;
            double dist = 0.0;
            for (int k = 0; k < m.dim; ++k) {
                double dd = wrap_delta(blk.point[k] - box.center[k], m.periods[k]);
                dist += dd * dd;
            }
            if (best < 0 || dist < best_d) {
                best = bi;
                best_d = dist;
            }
        }
        if (best < 0) continue;
        for (int a = 0; a < system.N; ++a) {
            auto it = sol.per_point[best].find({cls, a});
            if (it != sol.per_point[best].end())
                sol.anchor_psis[cls * system.N + a] = it->second;
        }
    }
    return sol;
}

ChartMetric base_metric_in_chart(const ProductBulk& bulk, int chart,
                                 const std::vector<double>& p, int order) {
    SeedMetric seed = chart_seed(bulk, chart, order, &p);
    return seed.g;
}

ChartMetric assemble_metric_at(const ProductBulk& bulk, const AtlasCover& cover, int chart,
                               const std::vector<double>& p, const PointPsi& psi, int order) {
    int n = bulk.n;
    int d = n + 1;

    // base block: the exact n-variable pullback embedded into n+1 variables,
    // so restriction to the slice is coefficient-identical to g_M
    ChartMetric base = base_metric_in_chart(bulk, chart, p, order);
    std::vector<int> vmap(n);
    for (int v = 0; v < n; ++v) vmap[v] = v;

    SymJets full(d, d, order);
    for (int i = 0; i < n; ++i)
        for (int j = i; j < n; ++j) full(i, j) = jet_embed(base.g(i, j), d, vmap);

    double bell_sum = 0.0;
    Jet fiber(d, order);
    for (const auto& [key, psi_jet] : psi) {
        auto [cls, member] = key;
        double f_val = class_bell_value(cover, cls, p);
        bell_sum += f_val;
        if (f_val <= 0.0) continue;
        Jet f_ij = class_bell_jet_in_chart(cover, cls, chart, p, order);
        Eigen::MatrixXd L;
        Eigen::VectorXd boff;
        member_coords_in_chart(cover, cls, member, chart, p, L, boff);
        double deriv = L(d - 1, d - 1);
        // psi jet lives in member-coordinate offsets; substitute u = L z
        std::vector<Jet> args;
        for (int row = 0; row < d; ++row) {
            Jet u(d, order);
            for (int k = 0; k < d; ++k)
                if (L(row, k) != 0.0)
                    u = jet_add(u, jet_scale(Jet::variable(d, order, k), L(row, k)));
            args.push_back(u);
        }
        Jet psi_in_chart = jet_substitute(jet_truncate(psi_jet, order), args);
        fiber = jet_add(fiber, jet_scale(jet_mul(f_ij, psi_in_chart), deriv * deriv));
    }
    if (bell_sum <= 0.0)
        throw DegenerateFiberComponent("no bell is positive at the requested point");
    full(n, n) = fiber;
    return make_chart_metric(d, full);
}

ChartMetric assemble_metric(const GlobalMetricSpec& spec, int sample, int chart) {
    const PointBlock& blk = spec.system.blocks.at(sample);
    if (std::find(blk.charts.begin(), blk.charts.end(), chart) == blk.charts.end())
        throw ManifestError("assemble_metric: sample point does not lie in the chart");
    return assemble_metric_at(spec.bulk, spec.cover, chart, blk.point,
                              spec.psis.per_point.at(sample), spec.config.coeff_order);
}

ChartMetric restrict_to_base(const GlobalMetricSpec& spec, int sample, int chart) {
    ChartMetric assembled = assemble_metric(spec, sample, chart);
    int n = spec.bulk.n;
    SymJets g(n, n, assembled.g.order());
    for (int i = 0; i < n; ++i)
        for (int j = i; j < n; ++j) g(i, j) = jet_restrict_last(assembled.g(i, j));
    return make_chart_metric(n, g);
}

} // namespace einbulk
