#include "einbulk/errors.hpp"
#include "einbulk/jets.hpp"

#include <doctest.h>

#include <cmath>
#include <random>

using namespace einbulk;

namespace {

Jet random_jet(std::mt19937_64& rng, int nvars, int order, double scale = 1.0) {
    std::uniform_real_distribution<double> u(-scale, scale);
    Jet j(nvars, order);
    for (int i = 0; i < j.layout().size(); ++i) j[i] = u(rng);
    return j;
}

bool approx_jets(const Jet& a, const Jet& b, double tol = 1e-10) {
    if (a.nvars() != b.nvars() || a.order() != b.order()) return false;
    for (int i = 0; i < a.layout().size(); ++i)
        if (std::abs(a[i] - b[i]) > tol) return false;
    return true;
}

} // namespace

TEST_SUITE("jets") {

TEST_CASE("addition examples") {
    // (1 + x) + (1 - x) = 2
    Jet one_plus = jet_add(Jet::constant(1, 3, 1.0), Jet::variable(1, 3, 0));
    Jet one_minus = jet_sub(Jet::constant(1, 3, 1.0), Jet::variable(1, 3, 0));
    Jet sum = jet_add(one_plus, one_minus);
    CHECK(sum.constant_term() == doctest::Approx(2.0));
    CHECK(sum.coeff({1}) == doctest::Approx(0.0));

    // a + 0 = a
    std::mt19937_64 rng(7);
    Jet a = random_jet(rng, 2, 3);
    CHECK(approx_jets(jet_add(a, Jet(2, 3)), a, 0.0));

    // (x + y^2) + (y^2) at K=2 -> x + 2 y^2
    Jet x = Jet::variable(2, 2, 0);
    Jet y = Jet::variable(2, 2, 1);
    Jet y2 = jet_mul(y, y);
    Jet s = jet_add(jet_add(x, y2), y2);
    CHECK(s.coeff({1, 0}) == doctest::Approx(1.0));
    CHECK(s.coeff({0, 2}) == doctest::Approx(2.0));
    CHECK(s.constant_term() == doctest::Approx(0.0));
}

TEST_CASE("multiplication examples") {
    // (1+x)(1-x) at K=2 -> 1 - x^2
    Jet p = jet_add(Jet::constant(1, 2, 1.0), Jet::variable(1, 2, 0));
    Jet m = jet_sub(Jet::constant(1, 2, 1.0), Jet::variable(1, 2, 0));
    Jet prod = jet_mul(p, m);
    CHECK(prod.coeff({0}) == doctest::Approx(1.0));
    CHECK(prod.coeff({1}) == doctest::Approx(0.0));
    CHECK(prod.coeff({2}) == doctest::Approx(-1.0));

    // a * 1 = a
    std::mt19937_64 rng(11);
    Jet a = random_jet(rng, 3, 4);
    CHECK(approx_jets(jet_mul(a, Jet::constant(3, 4, 1.0)), a, 0.0));

    // (x+y)^2 at K=2 -> x^2 + 2xy + y^2
    Jet xy = jet_add(Jet::variable(2, 2, 0), Jet::variable(2, 2, 1));
    Jet sq = jet_mul(xy, xy);
    CHECK(sq.coeff({2, 0}) == doctest::Approx(1.0));
    CHECK(sq.coeff({1, 1}) == doctest::Approx(2.0));
    CHECK(sq.coeff({0, 2}) == doctest::Approx(1.0));

    CHECK_THROWS_AS(jet_mul(Jet(1, 2), Jet(2, 2)), VariableMismatch);
}

TEST_CASE("reciprocal examples") {
    // 1/(1+x) at K=3 -> 1 - x + x^2 - x^3
    Jet a = jet_add(Jet::constant(1, 3, 1.0), Jet::variable(1, 3, 0));
    Jet r = jet_reciprocal(a);
    CHECK(r.coeff({0}) == doctest::Approx(1.0));
    CHECK(r.coeff({1}) == doctest::Approx(-1.0));
    CHECK(r.coeff({2}) == doctest::Approx(1.0));
    CHECK(r.coeff({3}) == doctest::Approx(-1.0));

    // 1/2 constant
    CHECK(jet_reciprocal(Jet::constant(2, 2, 2.0)).constant_term() == doctest::Approx(0.5));

    // 1/(2+x) at K=1: multiply back and check unity to order 1
    Jet b = jet_add(Jet::constant(1, 1, 2.0), Jet::variable(1, 1, 0));
    Jet rb = jet_reciprocal(b);
    Jet unit = jet_mul(b, rb);
    CHECK(unit.coeff({0}) == doctest::Approx(1.0));
    CHECK(unit.coeff({1}) == doctest::Approx(0.0));
    CHECK(rb.coeff({0}) == doctest::Approx(0.5));
    CHECK(rb.coeff({1}) == doctest::Approx(-0.25));

    CHECK_THROWS_AS(jet_reciprocal(Jet::variable(1, 2, 0)), ZeroConstantTerm);
}

TEST_CASE("derivative examples") {
    // d/dx (x^2 y) = 2 x y
    Jet x = Jet::variable(2, 3, 0);
    Jet y = Jet::variable(2, 3, 1);
    Jet f = jet_mul(jet_mul(x, x), y);
    Jet df = jet_diff(f, 0);
    CHECK(df.coeff({1, 1}) == doctest::Approx(2.0));
    CHECK(max_abs_coeff(jet_sub(df, jet_scale(jet_mul(x, y), 2.0))) < 1e-14);

    // derivative of a constant is the zero jet
    Jet c = Jet::constant(2, 3, 5.0);
    CHECK(max_abs_coeff(jet_diff(c, 1)) == 0.0);

    // d/dx exp-series: coefficients k*c_k shifted
    Jet e = jet_exp(Jet::variable(1, 3, 0));
    Jet de = jet_diff(e, 0);
    for (int k = 0; k <= 2; ++k) {
        MultiIndex mi{k};
        CHECK(de.coeff(mi) == doctest::Approx((k + 1) * e.coeff({k + 1})));
    }
}

TEST_CASE("composition examples") {
    // exp series as a univariate outer jet
    Jet exp_outer = jet_exp(Jet::variable(1, 4, 0));

    // exp(0 jet) = 1
    Jet z(2, 3);
    Jet r = jet_compose(exp_outer, z);
    CHECK(r.constant_term() == doctest::Approx(1.0));
    CHECK(max_abs_coeff(jet_sub(r, Jet::constant(2, 3, 1.0))) < 1e-14);

    // exp(x) at K=2 -> 1 + x + x^2/2
    Jet x = Jet::variable(1, 2, 0);
    Jet ex = jet_compose(exp_outer, x);
    CHECK(ex.coeff({0}) == doctest::Approx(1.0));
    CHECK(ex.coeff({1}) == doctest::Approx(1.0));
    CHECK(ex.coeff({2}) == doctest::Approx(0.5));

    // nonzero inner constant term: outer re-expanded about it
    Jet shifted = jet_add(Jet::constant(1, 2, 0.3), Jet::variable(1, 2, 0));
    Jet es = jet_compose(jet_exp(Jet::variable(1, 6, 0)), shifted);
    CHECK(es.coeff({0}) == doctest::Approx(std::exp(0.3)).epsilon(1e-6));
    CHECK(es.coeff({1}) == doctest::Approx(std::exp(0.3)).epsilon(1e-4));
}

TEST_CASE("evaluation examples") {
    Jet p = jet_add(Jet::constant(1, 1, 1.0), Jet::variable(1, 1, 0));
    CHECK(jet_eval(p, {2.0}) == doctest::Approx(3.0));

    std::mt19937_64 rng(3);
    Jet a = random_jet(rng, 3, 3);
    CHECK(jet_eval(a, {0.0, 0.0, 0.0}) == doctest::Approx(a.constant_term()));

    // truncation of 1/(1+x) at x = 0.1 agrees within the |x|^{K+1} remainder
    Jet inv = jet_reciprocal(jet_add(Jet::constant(1, 3, 1.0), Jet::variable(1, 3, 0)));
    double val = jet_eval(inv, {0.1});
    CHECK(std::abs(val - 1.0 / 1.1) < std::pow(0.1, 4));
}

TEST_CASE("ring axioms on random jets") {
    std::mt19937_64 rng(42);
    for (int trial = 0; trial < 50; ++trial) {
        int nvars = 1 + static_cast<int>(rng() % 3);
        int order = 1 + static_cast<int>(rng() % 4);
        Jet a = random_jet(rng, nvars, order);
        Jet b = random_jet(rng, nvars, order);
        Jet c = random_jet(rng, nvars, order);
        CHECK(approx_jets(jet_add(a, b), jet_add(b, a), 0.0));
        CHECK(approx_jets(jet_mul(a, b), jet_mul(b, a), 1e-12));
        CHECK(approx_jets(jet_mul(jet_mul(a, b), c), jet_mul(a, jet_mul(b, c)), 1e-10));
        CHECK(approx_jets(jet_mul(a, jet_add(b, c)),
                          jet_add(jet_mul(a, b), jet_mul(a, c)), 1e-10));
        CHECK(approx_jets(jet_add(jet_add(a, b), c), jet_add(a, jet_add(b, c)), 1e-12));
    }
}

TEST_CASE("reciprocal identity on random jets") {
    std::mt19937_64 rng(43);
    for (int trial = 0; trial < 30; ++trial) {
        int nvars = 1 + static_cast<int>(rng() % 3);
        int order = 1 + static_cast<int>(rng() % 5);
        Jet a = random_jet(rng, nvars, order);
        a[0] = 1.0 + std::abs(a.constant_term()); // keep invertible
        Jet unit = jet_mul(a, jet_reciprocal(a));
        Jet expect = Jet::constant(nvars, order, 1.0);
        CHECK(approx_jets(unit, expect, 1e-10));
    }
}

TEST_CASE("mixed partials commute exactly") {
    std::mt19937_64 rng(44);
    for (int trial = 0; trial < 20; ++trial) {
        Jet a = random_jet(rng, 3, 5);
        Jet dxy = jet_diff(jet_diff(a, 0), 1);
        Jet dyx = jet_diff(jet_diff(a, 1), 0);
        CHECK(approx_jets(dxy, dyx, 0.0));
    }
}

TEST_CASE("evaluation is a ring homomorphism up to the truncation remainder") {
    std::mt19937_64 rng(45);
    for (int trial = 0; trial < 20; ++trial) {
        int order = 2 + static_cast<int>(rng() % 3);
        Jet a = random_jet(rng, 2, order);
        Jet b = random_jet(rng, 2, order);
        std::uniform_real_distribution<double> u(-0.05, 0.05);
        std::vector<double> x{u(rng), u(rng)};
        double lhs = jet_eval(jet_mul(a, b), x);
        double rhs = jet_eval(a, x) * jet_eval(b, x);
        // dropped tail has total degree > order; coefficients are O(1) sums
        double bound = 100.0 * std::pow(0.1, order + 1);
        CHECK(std::abs(lhs - rhs) < bound);
    }
}

TEST_CASE("mixed-order operands truncate to the minimum order") {
    Jet a = jet_exp(Jet::variable(1, 5, 0));
    Jet b = Jet::variable(1, 2, 0);
    CHECK(jet_add(a, b).order() == 2);
    CHECK(jet_mul(a, b).order() == 2);
}

TEST_CASE("structural helpers") {
    std::mt19937_64 rng(46);
    Jet a = random_jet(rng, 2, 4);

    SUBCASE("shift is exact on polynomials") {
        std::vector<double> delta{0.3, -0.2};
        Jet shifted = jet_shift(a, delta);
        std::vector<double> probe{0.05, 0.07};
        std::vector<double> probe_shifted{probe[0] + delta[0], probe[1] + delta[1]};
        CHECK(jet_eval(shifted, probe) == doctest::Approx(jet_eval(a, probe_shifted)).epsilon(1e-12));
    }

    SUBCASE("embed and restrict round-trip") {
        Jet wide = jet_embed(a, 3, {0, 1});
        CHECK(wide.nvars() == 3);
        Jet back = jet_restrict_last(wide);
        CHECK(approx_jets(back, a, 0.0));
    }
}

TEST_CASE("analytic primitives match closed forms") {
    Jet x = Jet::variable(1, 5, 0);
    Jet s = jet_sin(jet_add(Jet::constant(1, 5, 0.7), x));
    Jet c = jet_cos(jet_add(Jet::constant(1, 5, 0.7), x));
    // sin^2 + cos^2 = 1 as jets
    Jet unit = jet_add(jet_mul(s, s), jet_mul(c, c));
    CHECK(max_abs_coeff(jet_sub(unit, Jet::constant(1, 5, 1.0))) < 1e-12);

    Jet q = jet_sqrt(jet_add(Jet::constant(1, 5, 4.0), x));
    CHECK(max_abs_coeff(jet_sub(jet_mul(q, q),
                                jet_add(Jet::constant(1, 5, 4.0), x))) < 1e-12);
    CHECK_THROWS_AS(jet_sqrt(Jet::constant(1, 3, -1.0)), SingularExpansion);
}

} // TEST_SUITE
