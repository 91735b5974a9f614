#include "einbulk/atlas.hpp"

#include "einbulk/errors.hpp"

#include <algorithm>
#include <cmath>
#include <random>

namespace einbulk {

double wrap_delta(double dx, double period) {
    if (period <= 0.0) return dx;
    dx = std::fmod(dx, period);
    if (dx > period / 2) dx -= period;
    if (dx < -period / 2) dx += period;
    return dx;
}

namespace {

constexpr double kTau = 6.283185307179586;

ManifoldSpec circle_spec() {
    ManifoldSpec m;
    m.name = "circle";
    m.dim = 1;
    m.periods = {kTau};
    // two arcs of length 4.4 centered at 0 and pi
    m.charts.push_back({{0.0}, {2.2}});
    m.charts.push_back({{M_PI}, {2.2}});
    m.metric = {{"1"}};
    return m;
}

ManifoldSpec torus_spec() {
    ManifoldSpec m;
    m.name = "torus";
    m.dim = 2;
    m.periods = {kTau, kTau};
    // brick pattern: two rows of two arcs (length 4.9), the second row's
    // joints shifted a quarter turn so no sample-grid point meets four charts
    double h = 2.45;
    double c0 = M_PI / 8;
    m.charts.push_back({{c0, 0.0}, {h, h}});
    m.charts.push_back({{c0 + M_PI, 0.0}, {h, h}});
    m.charts.push_back({{c0 + M_PI / 2, M_PI}, {h, h}});
    m.charts.push_back({{c0 + 3 * M_PI / 2, M_PI}, {h, h}});
    m.metric = {{"1", "0"}, {"0", "1"}};
    return m;
}

ManifoldSpec interval_spec() {
    ManifoldSpec m;
    m.name = "interval";
    m.dim = 1;
    m.periods = {0.0};
    m.charts.push_back({{0.5}, {0.5}});
    m.metric = {{"1"}};
    return m;
}

ManifoldSpec flat_spec(int dim) {
    ManifoldSpec m;
    m.name = "flat" + std::to_string(dim);
    m.dim = dim;
    m.periods.assign(dim, 0.0);
    ChartBox box;
    box.center.assign(dim, 0.0);
    box.half.assign(dim, 1.0);
    m.charts.push_back(box);
    m.metric.assign(dim, std::vector<std::string>(dim, "0"));
    for (int i = 0; i < dim; ++i) m.metric[i][i] = "1";
    return m;
}

} // namespace

ManifoldSpec catalog_manifold(const std::string& id) {
    if (id == "circle") return circle_spec();
    if (id == "torus") return torus_spec();
    if (id == "interval") return interval_spec();
    if (id == "flat1") return flat_spec(1);
    if (id == "flat2") return flat_spec(2);
    throw UnknownManifold("no catalog manifold named '" + id + "'");
}

ManifoldSpec product_with_fiber(const ManifoldSpec& base, const std::string& fiber_kind) {
    ManifoldSpec fiber;
    if (fiber_kind == "interval")
        fiber = interval_spec();
    else if (fiber_kind == "circle")
        fiber = circle_spec();
    else
        throw UnknownManifold("fiber must be 'interval' or 'circle', got '" + fiber_kind + "'");

    ManifoldSpec e;
    e.name = base.name + "x" + fiber_kind;
    e.dim = base.dim + 1;
    e.periods = base.periods;
    e.periods.push_back(fiber.periods[0]);
    e.fiber_axes = 1;
    e.metric = base.metric; // base block only; the fiber block is assembled later
    for (const ChartBox& bc : base.charts)
        for (const ChartBox& fc : fiber.charts) {
            ChartBox prod = bc;
            prod.center.push_back(fc.center[0]);
            prod.half.push_back(fc.half[0]);
            e.charts.push_back(prod);
        }
    return e;
}

bool chart_contains(const ManifoldSpec& m, int chart, const std::vector<double>& p) {
    const ChartBox& box = m.charts[chart];
    for (int k = 0; k < m.dim; ++k) {
        double d = wrap_delta(p[k] - box.center[k], m.periods[k]);
        if (std::abs(d) >= box.half[k]) return false;
    }
    return true;
}

std::vector<double> chart_coords(const ManifoldSpec& m, int chart, const std::vector<double>& p) {
    const ChartBox& box = m.charts[chart];
    std::vector<double> xi(m.dim);
    for (int k = 0; k < m.dim; ++k)
        xi[k] = wrap_delta(p[k] - box.center[k], m.periods[k]) / box.half[k];
    return xi;
}

std::vector<double> chart_point(const ManifoldSpec& m, int chart, const std::vector<double>& xi) {
    const ChartBox& box = m.charts[chart];
    std::vector<double> p(m.dim);
    for (int k = 0; k < m.dim; ++k) {
        p[k] = box.center[k] + xi[k] * box.half[k];
        if (m.periods[k] > 0.0) {
            p[k] = std::fmod(p[k], m.periods[k]);
            if (p[k] < 0.0) p[k] += m.periods[k];
        }
    }
    return p;
}

std::vector<double> halton_point(std::uint64_t index, int dim) {
    static const int primes[] = {2, 3, 5, 7, 11, 13};
    std::vector<double> p(dim);
    for (int k = 0; k < dim; ++k) {
        int base = primes[k % 6];
        double f = 1.0, r = 0.0;
        std::uint64_t i = index + 1;
        while (i > 0) {
            f /= base;
            r += f * (i % base);
            i /= base;
        }
        p[k] = r;
    }
    return p;
}

std::vector<std::vector<double>> default_sample_grid(const ManifoldSpec& m, int per_axis,
                                                     double line_band) {
    // per-axis candidate values
    std::vector<std::vector<double>> axis_vals(m.dim);
    for (int k = 0; k < m.dim; ++k) {
        if (m.periods[k] > 0.0) {
            for (int i = 0; i < per_axis; ++i)
                axis_vals[k].push_back(m.periods[k] * i / per_axis);
        } else {
            // line axis: keep within line_band of the chart center so the
            // inscribed balls still reach every sample
            double c = m.charts[0].center[k];
            double h = m.charts[0].half[k];
            for (const ChartBox& b : m.charts) h = std::min(h, b.half[k]);
            int n = std::max(per_axis / 2, 2);
            for (int i = 0; i < n; ++i) {
                double t = -1.0 + 2.0 * i / (n - 1);
                axis_vals[k].push_back(c + t * line_band * h);
            }
        }
    }
    std::vector<std::vector<double>> grid;
    std::vector<std::size_t> idx(m.dim, 0);
    while (true) {
        std::vector<double> p(m.dim);
        for (int k = 0; k < m.dim; ++k) p[k] = axis_vals[k][idx[k]];
        grid.push_back(p);
        int k = 0;
        while (k < m.dim && ++idx[k] == axis_vals[k].size()) idx[k++] = 0;
        if (k == m.dim) break;
    }
    return grid;
}

namespace {

Eigen::MatrixXd random_rotation(std::mt19937_64& rng, int d) {
    if (d == 1) return Eigen::MatrixXd::Ones(1, 1);
    std::normal_distribution<double> gauss(0.0, 1.0);
    Eigen::MatrixXd g(d, d);
    for (int i = 0; i < d; ++i)
        for (int j = 0; j < d; ++j) g(i, j) = gauss(rng);
    Eigen::HouseholderQR<Eigen::MatrixXd> qr(g);
    Eigen::MatrixXd q = qr.householderQ();
    Eigen::MatrixXd r = qr.matrixQR().triangularView<Eigen::Upper>();
    for (int i = 0; i < d; ++i)
        if (r(i, i) < 0) q.col(i) *= -1.0;
    if (q.determinant() < 0) q.col(0) *= -1.0;
    return q;
}

/// Largest rho with B(0, rho) inside every member image of the unit box,
/// tested on a fixed direction set, refined by bisection.
double inscribed_radius(const std::vector<AffineVariant>& members, int dim) {
    std::vector<Eigen::VectorXd> dirs;
    for (int k = 0; k < dim; ++k) {
        Eigen::VectorXd e = Eigen::VectorXd::Zero(dim);
        e[k] = 1.0;
        dirs.push_back(e);
        dirs.push_back(-e);
    }
    for (int i = 0; i < 64; ++i) {
        auto h = halton_point(static_cast<std::uint64_t>(i), dim);
        Eigen::VectorXd v(dim);
        for (int k = 0; k < dim; ++k) v[k] = 2.0 * h[k] - 1.0;
        if (v.norm() < 1e-9) continue;
        dirs.push_back(v.normalized());
    }
    auto inside = [&](double rho) {
        for (const Eigen::VectorXd& v : dirs) {
            Eigen::VectorXd u = rho * v;
            for (const AffineVariant& mem : members) {
                Eigen::VectorXd xi = mem.Ainv * u;
                if (xi.cwiseAbs().maxCoeff() > 1.0) return false;
            }
        }
        return true;
    };
    double lo = 0.0, hi = 2.0 * std::sqrt(static_cast<double>(dim));
    for (int it = 0; it < 40; ++it) {
        double mid = 0.5 * (lo + hi);
        if (inside(mid))
            lo = mid;
        else
            hi = mid;
    }
    return lo;
}

} // namespace

AtlasCover build_cover(const ManifoldSpec& m, int N,
                       const std::vector<std::vector<double>>& sample_points,
                       std::uint64_t seed) {
    if (N < 2) throw ManifestError("build_cover: N must be at least 2");
    AtlasCover cover;
    cover.manifold = m;
    cover.N = N;

    std::mt19937_64 rng(seed);
    std::uniform_real_distribution<double> scale(0.97, 1.03);
    int base_dim = m.dim - m.fiber_axes;

    for (int j = 0; j < static_cast<int>(m.charts.size()); ++j) {
        CoverClass cls;
        cls.chart = j;
        for (int a = 0; a < N; ++a) {
            Eigen::MatrixXd A = Eigen::MatrixXd::Zero(m.dim, m.dim);
            // base-block rotation and per-axis scale; separate fiber scale so
            // product patches keep their product form
            Eigen::MatrixXd rot = random_rotation(rng, base_dim);
            Eigen::VectorXd s(base_dim);
            for (int k = 0; k < base_dim; ++k) s[k] = scale(rng);
            A.topLeftCorner(base_dim, base_dim) = rot * s.asDiagonal();
            for (int k = base_dim; k < m.dim; ++k) A(k, k) = scale(rng);
            AffineVariant var;
            var.A = A;
            var.Ainv = A.inverse();
            if (std::abs(A.determinant()) < 0.1)
                throw ManifestError("build_cover: variant determinant below bound");
            cls.members.push_back(std::move(var));
        }
        cls.radius = 0.9 * inscribed_radius(cls.members, m.dim);
        cover.classes.push_back(std::move(cls));
    }

    // overlap graph via exact box intersection (per axis, wrapped)
    int nc = static_cast<int>(m.charts.size());
    cover.overlap.assign(nc, {});
    for (int i = 0; i < nc; ++i)
        for (int j = i + 1; j < nc; ++j) {
            bool hit = true;
            for (int k = 0; k < m.dim; ++k) {
                double d = std::abs(wrap_delta(m.charts[i].center[k] - m.charts[j].center[k],
                                               m.periods[k]));
                if (d >= m.charts[i].half[k] + m.charts[j].half[k]) hit = false;
            }
            if (hit) {
                cover.overlap[i].push_back(j);
                cover.overlap[j].push_back(i);
            }
        }

    // multiplicity verification on the designated sample points
    cover.sample_points = sample_points;
    int bound = m.dim + 1;
    cover.multiplicity_histogram.assign(nc + 1, 0);
    for (const auto& p : sample_points) {
        int mult = 0;
        for (int j = 0; j < nc; ++j)
            if (chart_contains(m, j, p)) ++mult;
        if (mult == 0) {
            std::string coords;
            for (double x : p) coords += std::to_string(x) + " ";
            throw CoverageGap("sample point ( " + coords + ") lies in no chart");
        }
        if (mult > bound)
            throw MultiplicityExceeded("sample point lies in " + std::to_string(mult) +
                                       " charts, bound is " + std::to_string(bound));
        cover.multiplicity_histogram[mult] += 1;
    }
    return cover;
}

BellFunction class_bell(const AtlasCover& cover, int cls) {
    BellFunction f;
    f.chart_id = "Q" + std::to_string(cover.classes[cls].chart) + "/B";
    f.center.assign(cover.manifold.dim, 0.0);
    f.radius = cover.classes[cls].radius;
    return f;
}

std::vector<BellFunction> cover_bell_family(const AtlasCover& cover) {
    std::vector<BellFunction> fam;
    for (int i = 0; i < static_cast<int>(cover.classes.size()); ++i) {
        BellFunction f = class_bell(cover, i);
        for (int a = 0; a < cover.N; ++a) fam.push_back(f);
    }
    return fam;
}

double class_bell_value(const AtlasCover& cover, int cls, const std::vector<double>& p) {
    const CoverClass& c = cover.classes[cls];
    if (!chart_contains(cover.manifold, c.chart, p)) return 0.0;
    std::vector<double> xi = chart_coords(cover.manifold, c.chart, p);
    Eigen::VectorXd v(cover.manifold.dim);
    for (int k = 0; k < cover.manifold.dim; ++k) v[k] = xi[k];
    Eigen::VectorXd u = c.members[0].A * v;
    std::vector<double> uc(u.data(), u.data() + u.size());
    return bell_eval(class_bell(cover, cls), uc);
}

void member_coords_in_chart(const AtlasCover& cover, int cls, int member, int chart,
                            const std::vector<double>& p, Eigen::MatrixXd& L,
                            Eigen::VectorXd& b) {
    const ManifoldSpec& m = cover.manifold;
    const CoverClass& c = cover.classes[cls];
    // member coords u(z) = L z + b of the chart-j coordinate OFFSETS z about
    // p: linear part scales by the half-width ratios, b = u(p)
    Eigen::VectorXd ratio(m.dim), xi(m.dim);
    std::vector<double> xi_i = chart_coords(m, c.chart, p);
    for (int k = 0; k < m.dim; ++k) {
        ratio[k] = m.charts[chart].half[k] / m.charts[c.chart].half[k];
        xi[k] = xi_i[k];
    }
    L = c.members[member].A * Eigen::MatrixXd(ratio.asDiagonal());
    b = c.members[member].A * xi;
}

Jet class_bell_jet_in_chart(const AtlasCover& cover, int cls, int chart,
                            const std::vector<double>& p, int order) {
    const ManifoldSpec& m = cover.manifold;
    Eigen::MatrixXd L;
    Eigen::VectorXd b;
    member_coords_in_chart(cover, cls, 0, chart, p, L, b);
    double r = cover.classes[cls].radius;
    if (b.squaredNorm() >= r * r)
        throw ExpansionOutsideSupport("class bell expansion point outside the ball");
    // |L z + b|^2 - r^2 about z = 0 (offsets of chart coords around p)
    Jet s = Jet::constant(m.dim, order, -r * r);
    for (int row = 0; row < m.dim; ++row) {
        Jet lin = Jet::constant(m.dim, order, b[row]);
        for (int k = 0; k < m.dim; ++k)
            if (L(row, k) != 0.0)
                lin = jet_add(lin, jet_scale(Jet::variable(m.dim, order, k), L(row, k)));
        s = jet_add(s, jet_mul(lin, lin));
    }
    return jet_exp(jet_reciprocal(s));
}

PositivityReport positivity_check(const AtlasCover& cover,
                                  const std::vector<BellFunction>& bells,
                                  const std::vector<std::vector<double>>& sweep) {
    PositivityReport rep;
    rep.min_sum = std::numeric_limits<double>::infinity();
    const ManifoldSpec& m = cover.manifold;
    for (const auto& p : sweep) {
        double sum = 0.0;
        for (const BellFunction& f : bells) {
            if (f.chart_id.empty() || f.chart_id[0] != 'Q') continue;
            std::size_t slash = f.chart_id.find('/');
            int chart = std::stoi(f.chart_id.substr(1, slash == std::string::npos
                                                           ? std::string::npos
                                                           : slash - 1));
            bool ball_coords = slash != std::string::npos;
            if (!chart_contains(m, chart, p)) continue;
            std::vector<double> xi = chart_coords(m, chart, p);
            if (ball_coords) {
                // find the class riding on this chart
                for (std::size_t c = 0; c < cover.classes.size(); ++c) {
                    if (cover.classes[c].chart != chart) continue;
                    Eigen::VectorXd v(m.dim);
                    for (int k = 0; k < m.dim; ++k) v[k] = xi[k];
                    Eigen::VectorXd u = cover.classes[c].members[0].A * v;
                    std::vector<double> uc(u.data(), u.data() + u.size());
                    sum += bell_eval(f, uc);
                    break;
                }
            } else {
                sum += bell_eval(f, xi);
            }
        }
        if (sum < rep.min_sum) {
            rep.min_sum = sum;
            rep.witness = p;
        }
    }
    rep.pass = rep.min_sum > 0.0;
    return rep;
}

} // namespace einbulk
