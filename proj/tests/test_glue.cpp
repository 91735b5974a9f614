#include "einbulk/errors.hpp"
#include "einbulk/glue.hpp"

#include "oracles.hpp"

#include <doctest.h>

#include <cmath>
#include <random>

using namespace einbulk;

namespace {

GlueConfig small_config() {
    GlueConfig cfg;
    cfg.order = 4;
    cfg.coeff_order = 2;
    cfg.overlap_samples = 8;
    cfg.interior_samples = 8;
    cfg.lambda = 0.0;
    cfg.epsilon = 1.0;
    cfg.seed = 99;
    return cfg;
}

struct GluePipeline {
    ProductBulk bulk;
    AtlasCover cover;
    TargetSet targets;
    std::vector<std::vector<double>> samples;
    OverlapSystem sys;
};

GluePipeline circle_pipeline(const GlueConfig& cfg) {
    GluePipeline p{make_product_bulk(catalog_manifold("circle"), "interval"), {}, {}, {}, {}};
    int N = static_cast<int>(count_equations(p.bulk.n)) + 1;
    auto grid = default_sample_grid(p.bulk.total, 8, cfg.fiber_band);
    p.cover = build_cover(p.bulk.total, N, grid, cfg.seed);
    p.targets = target_components(p.bulk, p.cover, cfg);
    p.samples = glue_sample_points(p.bulk, p.cover, cfg);
    p.sys = build_system(p.bulk, p.cover, p.targets, p.samples, cfg);
    return p;
}

} // namespace

TEST_SUITE("glue") {

TEST_CASE("equation count formula") {
    CHECK(count_equations(1) == 7);   // empty sum
    CHECK(count_equations(2) == 15);  // 4 + 5 + 3*4/2
    CHECK(count_equations(3) == 31);
    // brute-force subset enumeration oracle: nonempty subsets of n+2 charts
    for (int n = 1; n <= 10; ++n)
        CHECK(count_equations(n) == oracle::count_nonempty_subsets(n + 2));
    CHECK_THROWS_AS(count_equations(0), ManifestError);
}

TEST_CASE("single chart, single point: one equation in many unknowns") {
    ProductBulk bulk = make_product_bulk(catalog_manifold("flat1"), "interval");
    GlueConfig cfg = small_config();
    cfg.coeff_order = 0; // value row only
    cfg.n_override = 2;
    auto grid = default_sample_grid(bulk.total, 4, cfg.fiber_band);
    AtlasCover cover = build_cover(bulk.total, 2, grid, 5);
    TargetSet targets = target_components(bulk, cover, cfg);
    std::vector<std::vector<double>> pts{{0.0, 0.5}};
    OverlapSystem sys = build_system(bulk, cover, targets, pts, cfg);
    CHECK(sys.total_rows() == 1);
    CHECK(sys.total_unknowns() == 2);
    PsiSolution sol = solve_psi(sys, cover, cfg);
    CHECK(sol.residual < 1e-12);
}

TEST_CASE("circle cover sizes: M = 7, N = 8") {
    GlueConfig cfg = small_config();
    GluePipeline p = circle_pipeline(cfg);
    CHECK(p.sys.M == 7);
    CHECK(p.sys.N == 8);
    CHECK(p.sys.total_unknowns() > p.sys.total_rows());
    // sigma levels follow the subset ladder: deepest overlaps first
    for (const auto& blk : p.sys.blocks)
        for (const auto& row : blk.rows) {
            CHECK(row.sigma_level >= 1);
            CHECK(row.sigma_level <= p.bulk.n + 2);
        }
}

TEST_CASE("planted solution is recovered up to residual") {
    GlueConfig cfg = small_config();
    GluePipeline p = circle_pipeline(cfg);
    std::mt19937_64 rng(123);
    std::uniform_real_distribution<double> u(-1.0, 1.0);
    OverlapSystem planted = p.sys;
    for (auto& blk : planted.blocks) {
        Eigen::VectorXd x(blk.A.cols());
        for (int i = 0; i < x.size(); ++i) x[i] = u(rng);
        blk.b = blk.A * x;
    }
    PsiSolution sol = solve_psi(planted, p.cover, cfg);
    CHECK(sol.residual <= 1e-10);
}

TEST_CASE("inconsistent targets are detected") {
    GlueConfig cfg = small_config();
    GluePipeline p = circle_pipeline(cfg);
    OverlapSystem corrupted = p.sys;
    // zero out the psi columns of one row while keeping its rhs: unsatisfiable
    corrupted.blocks[0].A.row(0).setZero();
    corrupted.blocks[0].b[0] = 1.0;
    CHECK_THROWS_AS(solve_psi(corrupted, p.cover, cfg), InconsistentTargets);
}

TEST_CASE("circle x interval glue end to end") {
    GlueConfig cfg = small_config();
    GluePipeline p = circle_pipeline(cfg);
    PsiSolution sol = solve_psi(p.sys, p.cover, cfg);
    CHECK(sol.residual <= 1e-8);
    CHECK(sol.rank > 0);

    GlobalMetricSpec spec{p.bulk, p.cover, p.targets, p.sys, sol, cfg};
    double worst = 0.0;
    int checked = 0;
    for (int s = 0; s < static_cast<int>(p.sys.blocks.size()); ++s) {
        const PointBlock& blk = p.sys.blocks[s];
        if (blk.charts.size() < 2) continue;
        for (int chart : blk.charts) {
            ChartMetric ge = assemble_metric(spec, s, chart);
            RicciField res = einstein_residual(ge, cfg.lambda);
            worst = std::max(worst, residual_norm(res, 0));
            ++checked;
        }
    }
    CHECK(checked > 0);
    CHECK(worst <= 1e-6);

    // certification locality: the assembled residual at overlap samples stays
    // within 10x the worst per-chart extension residual, floored at the
    // solve tolerance scale
    double worst_chart = 0.0;
    for (const EmbeddingResult& ext : p.targets.extensions)
        worst_chart = std::max(worst_chart, ext.residual_norm);
    CHECK(worst <= std::max(10.0 * worst_chart, cfg.solve_tol));

    // exact base-restriction isometry
    for (int s = 0; s < static_cast<int>(p.sys.blocks.size()); ++s) {
        const PointBlock& blk = p.sys.blocks[s];
        for (int chart : blk.charts) {
            ChartMetric restricted = restrict_to_base(spec, s, chart);
            ChartMetric direct = base_metric_in_chart(p.bulk, chart, blk.point, cfg.coeff_order);
            for (int i = 0; i < p.bulk.n; ++i)
                for (int j = i; j < p.bulk.n; ++j)
                    CHECK(max_abs_coeff(jet_sub(restricted.g(i, j), direct.g(i, j))) == 0.0);
        }
    }
}

TEST_CASE("solved psi matches the pointwise division on a single chart") {
    ProductBulk bulk = make_product_bulk(catalog_manifold("flat1"), "interval");
    GlueConfig cfg = small_config();
    cfg.n_override = 2;
    auto grid = default_sample_grid(bulk.total, 4, cfg.fiber_band);
    AtlasCover cover = build_cover(bulk.total, 2, grid, 5);
    TargetSet targets = target_components(bulk, cover, cfg);
    auto samples = glue_sample_points(bulk, cover, cfg);
    OverlapSystem sys = build_system(bulk, cover, targets, samples, cfg);
    PsiSolution sol = solve_psi(sys, cover, cfg);
    // at every sample, sum_a theta psi = phi = 1, i.e. psi plays eps/f
    for (std::size_t s = 0; s < sys.blocks.size(); ++s) {
        const PointBlock& blk = sys.blocks[s];
        double f = class_bell_value(cover, 0, blk.point);
        REQUIRE(f > 0.0);
        double acc = 0.0;
        for (const auto& [key, jet] : sol.per_point[s]) {
            Eigen::MatrixXd L;
            Eigen::VectorXd b;
            member_coords_in_chart(cover, key.first, key.second, blk.charts[0], blk.point, L, b);
            double deriv = L(bulk.n, bulk.n);
            acc += deriv * deriv * jet.constant_term();
        }
        CHECK(acc * f == doctest::Approx(1.0).epsilon(1e-9));
    }
}

TEST_CASE("fiber-fiber targets agree across charts after coordinate transfer") {
    GlueConfig cfg = small_config();
    GluePipeline p = circle_pipeline(cfg);
    // overlap point of charts 0 and 1
    for (const auto& blk : p.sys.blocks) {
        if (blk.charts.size() < 2) continue;
        int j0 = blk.charts[0], j1 = blk.charts[1];
        std::vector<double> xi0 = chart_coords(p.bulk.total, j0, blk.point);
        std::vector<double> xi1 = chart_coords(p.bulk.total, j1, blk.point);
        double phi0 = jet_eval(p.targets.phi[j0], xi0);
        double phi1 = jet_eval(p.targets.phi[j1], xi1);
        // tensor transfer of the fiber-fiber component: factor (dy1/dy0)^2
        double ratio = p.bulk.total.charts[j0].half[p.bulk.n] /
                       p.bulk.total.charts[j1].half[p.bulk.n];
        CHECK(phi0 == doctest::Approx(phi1 * ratio * ratio).epsilon(1e-9));
        break;
    }
}

TEST_CASE("normal gauge keeps the fiber-fiber target constant for nonzero lambda") {
    ProductBulk bulk = make_product_bulk(catalog_manifold("flat2"), "interval");
    GlueConfig cfg = small_config();
    cfg.lambda = -0.25;
    auto grid = default_sample_grid(bulk.total, 4, cfg.fiber_band);
    AtlasCover cover = build_cover(bulk.total, 17, grid, 5);
    TargetSet targets = target_components(bulk, cover, cfg);
    // phi = eps * phi^2 with phi == 1: the constant jet 1
    Jet dev = jet_sub(targets.phi[0],
                      Jet::constant(targets.phi[0].nvars(), targets.phi[0].order(), 1.0));
    CHECK(max_abs_coeff(dev) == 0.0);
}

TEST_CASE("sphere-chart base survives restriction bit-for-bit") {
    ManifoldSpec sphere;
    sphere.name = "sphere-chart";
    sphere.dim = 2;
    sphere.periods = {0.0, 0.0};
    sphere.charts.push_back({{M_PI / 2, 0.0}, {1.0, 1.0}});
    sphere.metric = {{"1", "0"}, {"0", "sin(x1)^2"}};

    ProductBulk bulk = make_product_bulk(sphere, "interval");
    GlueConfig cfg = small_config();
    int N = static_cast<int>(count_equations(2)) + 1;
    cfg.n_override = N;
    auto grid = default_sample_grid(bulk.total, 4, cfg.fiber_band);
    AtlasCover cover = build_cover(bulk.total, N, grid, 5);
    TargetSet targets = target_components(bulk, cover, cfg); // Ricci-flat extension of S^2
    auto samples = glue_sample_points(bulk, cover, cfg);
    OverlapSystem sys = build_system(bulk, cover, targets, samples, cfg);
    PsiSolution sol = solve_psi(sys, cover, cfg);
    CHECK(sol.residual <= 1e-8);

    GlobalMetricSpec spec{bulk, cover, targets, sys, sol, cfg};
    for (int s = 0; s < static_cast<int>(sys.blocks.size()); ++s) {
        ChartMetric restricted = restrict_to_base(spec, s, 0);
        ChartMetric direct = base_metric_in_chart(bulk, 0, sys.blocks[s].point, cfg.coeff_order);
        for (int i = 0; i < 2; ++i)
            for (int j = i; j < 2; ++j)
                CHECK(max_abs_coeff(jet_sub(restricted.g(i, j), direct.g(i, j))) == 0.0);
    }
}

TEST_CASE("degenerate fiber component outside every bell") {
    ProductBulk bulk = make_product_bulk(catalog_manifold("flat1"), "interval");
    GlueConfig cfg = small_config();
    auto grid = default_sample_grid(bulk.total, 4, cfg.fiber_band);
    AtlasCover cover = build_cover(bulk.total, 2, grid, 5);
    PointPsi psi;
    psi[{0, 0}] = Jet::constant(2, 2, 1.0);
    // the box corner lies outside the inscribed ball
    std::vector<double> corner{0.98, 0.99};
    CHECK_THROWS_AS(assemble_metric_at(bulk, cover, 0, corner, psi, 2),
                    DegenerateFiberComponent);
}

TEST_CASE("hand-built spec: flat base with psi = 1") {
    ProductBulk bulk = make_product_bulk(catalog_manifold("flat1"), "interval");
    GlueConfig cfg = small_config();
    auto grid = default_sample_grid(bulk.total, 4, cfg.fiber_band);
    AtlasCover cover = build_cover(bulk.total, 2, grid, 5);
    std::vector<double> p0{0.0, 0.5};
    PointPsi psi;
    // both members of the single class set to the constant 1
    psi[{0, 0}] = Jet::constant(2, 2, 1.0);
    psi[{0, 1}] = Jet::constant(2, 2, 1.0);
    ChartMetric ge = assemble_metric_at(bulk, cover, 0, p0, psi, 2);
    // base block is the pulled-back flat metric; fiber block is f * (sum d^2)
    CHECK(ge.dim == 2);
    CHECK(ge.g(0, 0).constant_term() == doctest::Approx(1.0)); // h^2 * 1 with h = 1
    double f = class_bell_value(cover, 0, p0);
    CHECK(f > 0.0);
    double dsum = 0.0;
    for (int a = 0; a < 2; ++a) {
        Eigen::MatrixXd L;
        Eigen::VectorXd b;
        member_coords_in_chart(cover, 0, a, 0, p0, L, b);
        dsum += L(1, 1) * L(1, 1);
    }
    CHECK(ge.g(1, 1).constant_term() == doctest::Approx(f * dsum).epsilon(1e-12));
}

} // TEST_SUITE
