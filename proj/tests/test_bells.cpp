#include "einbulk/atlas.hpp"
#include "einbulk/bells.hpp"
#include "einbulk/errors.hpp"

#include <doctest.h>

#include <cmath>

using namespace einbulk;

namespace {

std::vector<std::vector<double>> circle_sweep(int n) {
    std::vector<std::vector<double>> pts;
    for (int i = 0; i < n; ++i) pts.push_back({2 * M_PI * i / n});
    return pts;
}

} // namespace

TEST_SUITE("bells") {

TEST_CASE("pointwise values") {
    BellFunction f{"chart", {0.0, 0.0}, 1.0};
    CHECK(bell_eval(f, {0.0, 0.0}) == doctest::Approx(std::exp(-1.0)));
    CHECK(bell_eval(f, {1.0, 0.0}) == 0.0);
    CHECK(bell_eval(f, {2.0, 0.5}) == 0.0);
    // |x|^2 = 0.5 -> exp(1/(0.5-1)) = exp(-2)
    CHECK(bell_eval(f, {std::sqrt(0.5), 0.0}) == doctest::Approx(std::exp(-2.0)));
    // value bounded by the center value
    for (double t : {0.1, 0.3, 0.7, 0.95})
        CHECK(bell_eval(f, {t, 0.0}) <= std::exp(-1.0));
}

TEST_CASE("jet about the center") {
    BellFunction f{"chart", {0.0}, 1.0};
    Jet j = bell_jet(f, {0.0}, 4);
    CHECK(j.coeff({0}) == doctest::Approx(std::exp(-1.0)));
    CHECK(j.coeff({1}) == doctest::Approx(0.0)); // symmetry kills odd terms
    CHECK(j.coeff({3}) == doctest::Approx(0.0));
    // even coefficients against high-precision samples: f(x) ~ sum c_k x^k
    for (double dx : {0.02, 0.05}) {
        double direct = bell_eval(f, {dx});
        double viajet = jet_eval(j, {dx});
        CHECK(std::abs(direct - viajet) < 1e-6 * direct + 1e-12);
    }
}

TEST_CASE("jet near the support boundary still matches samples") {
    BellFunction f{"chart", {0.0}, 1.0};
    double about = 1.0 - 1e-3;
    Jet j = bell_jet(f, {about}, 3);
    CHECK(j.all_finite());
    CHECK(std::abs(j.coeff({1})) > 1e2 * j.coeff({0})); // steep: large coefficients
    // log-derivative scale ~ 2r/(r^2-d^2)^2 ~ 5e5, so steps must stay well
    // inside 1/scale for the K=3 remainder to be small
    for (double dx : {1e-7, 3e-7}) {
        double direct = bell_eval(f, {about + dx});
        double viajet = jet_eval(j, {dx});
        CHECK(std::abs(direct - viajet) < 1e-3 * direct);
    }
}

TEST_CASE("jet agreement improves at the truncation order on shrinking neighborhoods") {
    // |jet eval - formula| <= C |dx|^{K+1}: halving the step must shrink the
    // error by about 2^{K+1}
    BellFunction f{"chart", {0.0}, 1.0};
    int K = 4;
    Jet j = bell_jet(f, {0.4}, K);
    auto err = [&](double dx) {
        return std::abs(jet_eval(j, {dx}) - bell_eval(f, {0.4 + dx}));
    };
    double e1 = err(0.2), e2 = err(0.1), e3 = err(0.05);
    CHECK(e1 / e2 > std::pow(2.0, K));     // observed order >= K
    CHECK(e2 / e3 > std::pow(2.0, K));
    CHECK(e3 < 1e-7);
}

TEST_CASE("expansion outside the support is refused") {
    BellFunction f{"chart", {0.0}, 1.0};
    CHECK_THROWS_AS(bell_jet(f, {1.0}, 3), ExpansionOutsideSupport);
    CHECK_THROWS_AS(bell_jet(f, {1.5}, 3), ExpansionOutsideSupport);
}

TEST_CASE("one-sided difference quotients vanish at the boundary") {
    BellFunction f{"chart", {0.0}, 1.0};
    // k-th order backward difference quotient at x = r, halving steps
    for (int k = 1; k <= 4; ++k) {
        double prev = 1e300;
        for (double h : {1e-2, 5e-3, 2.5e-3}) {
            double acc = 0.0;
            for (int i = 0; i <= k; ++i) {
                double sign = (i % 2 == 0) ? 1.0 : -1.0;
                double binom = 1.0;
                for (int b = 0; b < i; ++b) binom = binom * (k - b) / (b + 1);
                acc += sign * binom * bell_eval(f, {1.0 - i * h});
            }
            double quotient = std::abs(acc / std::pow(h, k));
            CHECK(quotient < prev); // decreasing under step halving
            prev = quotient;
        }
        CHECK(prev < 1e-8);
    }
}

TEST_CASE("circle cover with two charts") {
    ManifoldSpec circle = catalog_manifold("circle");
    auto grid = circle_sweep(16);
    AtlasCover cover = build_cover(circle, 2, grid, 7);
    CHECK(cover.classes.size() == 2);
    CHECK(cover.N == 2);
    // multiplicity <= dim + 1 = 2 held by construction (no throw); histogram sane
    int covered = 0;
    for (int h : cover.multiplicity_histogram) covered += h;
    CHECK(covered == 16);
    CHECK(cover.multiplicity_histogram[1] + cover.multiplicity_histogram[2] == 16);
    // ball radii reflect the variant scales
    for (const auto& cls : cover.classes) {
        CHECK(cls.radius > 0.8);
        CHECK(cls.radius < 1.0);
    }
}

TEST_CASE("torus cover with four staggered product charts") {
    ManifoldSpec torus = catalog_manifold("torus");
    std::vector<std::vector<double>> grid;
    for (int i = 0; i < 8; ++i)
        for (int j = 0; j < 8; ++j)
            grid.push_back({2 * M_PI * i / 8, 2 * M_PI * j / 8});
    AtlasCover cover = build_cover(torus, 3, grid, 11);
    // bound dim + 1 = 3 on the 64-point grid, by direct enumeration
    for (const auto& p : grid) {
        int mult = 0;
        for (int c = 0; c < 4; ++c)
            if (chart_contains(torus, c, p)) ++mult;
        CHECK(mult <= 3);
        CHECK(mult >= 1);
    }
    CHECK(cover.multiplicity_histogram[1] + cover.multiplicity_histogram[2] +
              cover.multiplicity_histogram[3] ==
          64);
}

TEST_CASE("a chart list leaving a gap raises CoverageGap") {
    ManifoldSpec m = catalog_manifold("circle");
    m.charts.pop_back(); // one arc cannot cover the circle
    CHECK_THROWS_AS(build_cover(m, 2, circle_sweep(64), 3), CoverageGap);
}

TEST_CASE("positivity on the circle cover") {
    ManifoldSpec circle = catalog_manifold("circle");
    AtlasCover cover = build_cover(circle, 2, circle_sweep(16), 7);
    auto sweep = circle_sweep(1000);
    PositivityReport rep = positivity_check(cover, cover_bell_family(cover), sweep);
    CHECK(rep.pass);
    CHECK(rep.min_sum > 0.0);

    // a single bell covering half the circle fails with a witness
    std::vector<BellFunction> half{class_bell(cover, 0)};
    PositivityReport bad = positivity_check(cover, half, sweep);
    CHECK_FALSE(bad.pass);
    CHECK(bad.min_sum == 0.0);
    // witness far from chart-0 center
    CHECK(std::abs(wrap_delta(bad.witness[0] - M_PI, 2 * M_PI)) < 2.0);

    // any point strictly inside a ball gets at least that bell's value
    std::vector<double> inside{0.1};
    double val = class_bell_value(cover, 0, inside);
    CHECK(val > 0.0);
    PositivityReport one = positivity_check(cover, cover_bell_family(cover), {inside});
    CHECK(one.min_sum >= val);
}

TEST_CASE("bell jets in chart coordinates match values") {
    ManifoldSpec circle = catalog_manifold("circle");
    AtlasCover cover = build_cover(circle, 2, circle_sweep(16), 7);
    std::vector<double> p{0.3};
    Jet j = class_bell_jet_in_chart(cover, 0, 0, p, 4);
    CHECK(j.constant_term() == doctest::Approx(class_bell_value(cover, 0, p)).epsilon(1e-12));
    // step into the chart and compare against pointwise evaluation
    for (double dz : {0.002, 0.005}) {
        std::vector<double> q{p[0] + dz * circle.charts[0].half[0]};
        double direct = class_bell_value(cover, 0, q);
        double viajet = jet_eval(j, {dz});
        CHECK(std::abs(direct - viajet) < 1e-6);
    }
}

} // TEST_SUITE
