#include "einbulk/jets.hpp"

#include "einbulk/errors.hpp"

#include <algorithm>
#include <cmath>
#include <map>
#include <mutex>
#include <numeric>

namespace einbulk {

int total_degree(const MultiIndex& mi) {
    return std::accumulate(mi.begin(), mi.end(), 0);
}

// ---- JetLayout --------------------------------------------------------------

namespace {

std::uint64_t pack(const MultiIndex& mi) {
    std::uint64_t k = 0;
    for (std::size_t v = 0; v < mi.size(); ++v)
        k |= static_cast<std::uint64_t>(mi[v]) << (8 * v);
    return k;
}

void enumerate_degree(int nvars, int degree, MultiIndex& cur, int var,
                      std::vector<MultiIndex>& out) {
    if (var == nvars - 1) {
        cur[var] = degree;
        out.push_back(cur);
        return;
    }
    for (int e = degree; e >= 0; --e) {
        cur[var] = e;
        enumerate_degree(nvars, degree - e, cur, var + 1, out);
    }
    cur[var] = 0;
}

} // namespace

JetLayout::JetLayout(int nvars, int order) : nvars_(nvars), order_(order) {
    degree_begin_.push_back(0);
    MultiIndex cur(nvars, 0);
    for (int d = 0; d <= order; ++d) {
        std::vector<MultiIndex> block;
        enumerate_degree(nvars, d, cur, 0, block);
        for (const auto& mi : block) {
            keys_.push_back(pack(mi));
            degrees_.push_back(static_cast<std::uint8_t>(d));
            for (int v = 0; v < nvars; ++v) exps_.push_back(static_cast<std::uint8_t>(mi[v]));
        }
        degree_begin_.push_back(static_cast<int>(keys_.size()));
    }
    // open-addressed lookup, power-of-two capacity
    std::size_t cap = 16;
    while (cap < keys_.size() * 2) cap <<= 1;
    lookup_.assign(cap, -1);
    lookup_keys_.assign(cap, ~0ULL);
    for (int i = 0; i < static_cast<int>(keys_.size()); ++i) {
        std::uint64_t k = keys_[i];
        std::size_t h = (k * 0x9E3779B97F4A7C15ULL) & (cap - 1);
        while (lookup_[h] != -1) h = (h + 1) & (cap - 1);
        lookup_[h] = i;
        lookup_keys_[h] = k;
    }
}

int JetLayout::index_of_key(std::uint64_t k) const {
    std::size_t cap = lookup_.size();
    std::size_t h = (k * 0x9E3779B97F4A7C15ULL) & (cap - 1);
    while (lookup_[h] != -1) {
        if (lookup_keys_[h] == k) return lookup_[h];
        h = (h + 1) & (cap - 1);
    }
    return -1;
}

int JetLayout::index_of(const MultiIndex& mi) const {
    if (static_cast<int>(mi.size()) != nvars_) return -1;
    if (total_degree(mi) > order_) return -1;
    return index_of_key(pack(mi));
}

MultiIndex JetLayout::exponents(int i) const {
    MultiIndex mi(nvars_);
    for (int v = 0; v < nvars_; ++v) mi[v] = exponent(i, v);
    return mi;
}

std::shared_ptr<const JetLayout> JetLayout::get(int nvars, int order) {
    if (nvars < 1) throw VariableMismatch("jet needs at least one variable");
    if (order < 0) throw VariableMismatch("jet order must be non-negative");
    static std::mutex mu;
    static std::map<std::pair<int, int>, std::shared_ptr<const JetLayout>> cache;
    std::lock_guard<std::mutex> lock(mu);
    auto& slot = cache[{nvars, order}];
    if (!slot) slot = std::shared_ptr<const JetLayout>(new JetLayout(nvars, order));
    return slot;
}

// ---- Jet --------------------------------------------------------------------

Jet::Jet(int nvars, int order)
    : layout_(JetLayout::get(nvars, order)), c_(layout_->size(), 0.0) {}

Jet Jet::constant(int nvars, int order, double value) {
    Jet j(nvars, order);
    j.c_[0] = value;
    return j;
}

Jet Jet::variable(int nvars, int order, int var, double center) {
    if (var < 0 || var >= nvars) throw VariableMismatch("variable index out of range");
    Jet j(nvars, order);
    j.c_[0] = center;
    if (order >= 1) {
        MultiIndex mi(nvars, 0);
        mi[var] = 1;
        j.c_[j.layout_->index_of(mi)] = 1.0;
    }
    return j;
}

double Jet::coeff(const MultiIndex& mi) const {
    int i = layout_->index_of(mi);
    return i < 0 ? 0.0 : c_[i];
}

void Jet::set_coeff(const MultiIndex& mi, double v) {
    int i = layout_->index_of(mi);
    if (i < 0) throw VariableMismatch("multi-index outside jet layout");
    c_[i] = v;
}

bool Jet::all_finite() const {
    for (double x : c_)
        if (!std::isfinite(x)) return false;
    return true;
}

// ---- ring operations --------------------------------------------------------

namespace {

void require_same_vars(const Jet& a, const Jet& b, const char* op) {
    if (a.nvars() != b.nvars())
        throw VariableMismatch(std::string(op) + ": operand variable counts differ (" +
                               std::to_string(a.nvars()) + " vs " + std::to_string(b.nvars()) + ")");
}

} // namespace

Jet jet_add(const Jet& a, const Jet& b) {
    require_same_vars(a, b, "jet_add");
    int order = std::min(a.order(), b.order());
    Jet r(a.nvars(), order);
    for (int i = 0; i < r.layout().size(); ++i) r[i] = a[i] + b[i];
    return r;
}

Jet jet_sub(const Jet& a, const Jet& b) {
    require_same_vars(a, b, "jet_sub");
    int order = std::min(a.order(), b.order());
    Jet r(a.nvars(), order);
    for (int i = 0; i < r.layout().size(); ++i) r[i] = a[i] - b[i];
    return r;
}

Jet jet_mul(const Jet& a, const Jet& b) {
    require_same_vars(a, b, "jet_mul");
    int order = std::min(a.order(), b.order());
    Jet r(a.nvars(), order);
    const JetLayout& la = a.layout();
    const JetLayout& lb = b.layout();
    const JetLayout& lr = r.layout();
    int a_end = la.degree_end(std::min(order, la.order()));
    for (int i = 0; i < a_end; ++i) {
        double ai = a[i];
        if (ai == 0.0) continue;
        int rem = order - la.degree(i);
        int b_end = lb.degree_end(std::min(rem, lb.order()));
        std::uint64_t ka = la.key(i);
        for (int j = 0; j < b_end; ++j) {
            double bj = b[j];
            if (bj == 0.0) continue;
            r[lr.index_of_key(ka + lb.key(j))] += ai * bj;
        }
    }
    return r;
}

Jet jet_scale(const Jet& a, double s) {
    Jet r = a;
    for (int i = 0; i < r.layout().size(); ++i) r[i] *= s;
    return r;
}

Jet jet_neg(const Jet& a) { return jet_scale(a, -1.0); }

Jet jet_reciprocal(const Jet& a) {
    double a0 = a.constant_term();
    if (std::abs(a0) < kDegenerateTol)
        throw ZeroConstantTerm("jet_reciprocal: constant term " + std::to_string(a0) +
                               " below tolerance");
    const JetLayout& l = a.layout();
    Jet b(a.nvars(), a.order());
    b[0] = 1.0 / a0;
    // degree-by-degree: sum_{u<=t} a[u] b[t-u] = 0 for deg t >= 1
    for (int d = 1; d <= a.order(); ++d) {
        std::vector<double> acc(l.degree_end(d) - l.degree_begin(d), 0.0);
        for (int i = l.degree_begin(1); i < l.degree_end(d); ++i) {
            double ai = a[i];
            if (ai == 0.0) continue;
            int dv = d - l.degree(i);
            for (int j = l.degree_begin(dv); j < l.degree_end(dv); ++j) {
                if (b[j] == 0.0) continue;
                int t = l.index_of_key(l.key(i) + l.key(j));
                acc[t - l.degree_begin(d)] += ai * b[j];
            }
        }
        for (int t = l.degree_begin(d); t < l.degree_end(d); ++t)
            b[t] = -acc[t - l.degree_begin(d)] / a0;
    }
    return b;
}

Jet jet_diff(const Jet& a, int var) {
    if (var < 0 || var >= a.nvars()) throw VariableMismatch("jet_diff: variable out of range");
    int order = std::max(a.order() - 1, 0);
    Jet r(a.nvars(), order);
    const JetLayout& la = a.layout();
    const JetLayout& lr = r.layout();
    for (int i = 0; i < la.size(); ++i) {
        int e = la.exponent(i, var);
        if (e == 0 || a[i] == 0.0) continue;
        if (la.degree(i) - 1 > order) continue;
        std::uint64_t k = la.key(i) - (1ULL << (8 * var));
        r[lr.index_of_key(k)] += e * a[i];
    }
    return r;
}

Jet jet_truncate(const Jet& a, int order) {
    if (order >= a.order()) return a;
    Jet r(a.nvars(), order);
    for (int i = 0; i < r.layout().size(); ++i) r[i] = a[i];
    return r;
}

Jet jet_compose(const Jet& outer, const Jet& inner) {
    if (outer.nvars() != 1) throw VariableMismatch("jet_compose: outer must be univariate");
    int ko = outer.order();
    double c = inner.constant_term();
    // Taylor-shift outer about c: s_k = sum_{m>=k} outer_m C(m,k) c^(m-k)
    std::vector<double> s(ko + 1, 0.0);
    for (int m = 0; m <= ko; ++m) {
        double om = outer[m];
        if (om == 0.0) continue;
        double binom = 1.0, cpw = 1.0;
        // iterate k = m down to 0 so c powers build up
        for (int k = m; k >= 0; --k) {
            s[k] += om * binom * cpw;
            binom = binom * k / (m - k + 1);
            cpw *= c;
        }
    }
    Jet h = inner;
    h[0] = 0.0;
    Jet acc = Jet::constant(inner.nvars(), inner.order(), s[ko]);
    for (int k = ko - 1; k >= 0; --k)
        acc = jet_add(jet_mul(acc, h), Jet::constant(inner.nvars(), inner.order(), s[k]));
    return acc;
}

double jet_eval(const Jet& a, const std::vector<double>& point) {
    if (static_cast<int>(point.size()) != a.nvars())
        throw VariableMismatch("jet_eval: point size mismatch");
    const JetLayout& l = a.layout();
    // powers per variable up to the order
    std::vector<double> pw(static_cast<std::size_t>(a.nvars()) * (a.order() + 1));
    for (int v = 0; v < a.nvars(); ++v) {
        pw[v * (a.order() + 1)] = 1.0;
        for (int e = 1; e <= a.order(); ++e)
            pw[v * (a.order() + 1) + e] = pw[v * (a.order() + 1) + e - 1] * point[v];
    }
    double sum = 0.0;
    for (int i = 0; i < l.size(); ++i) {
        if (a[i] == 0.0) continue;
        double term = a[i];
        for (int v = 0; v < a.nvars(); ++v) term *= pw[v * (a.order() + 1) + l.exponent(i, v)];
        sum += term;
    }
    return sum;
}

Jet jet_substitute(const Jet& a, const std::vector<Jet>& args) {
    if (static_cast<int>(args.size()) != a.nvars())
        throw VariableMismatch("jet_substitute: argument count mismatch");
    for (std::size_t v = 1; v < args.size(); ++v) require_same_vars(args[0], args[v], "jet_substitute");
    int nv = args[0].nvars();
    int order = args[0].order();
    // memoize powers of each argument
    std::vector<std::vector<Jet>> pw(args.size());
    for (std::size_t v = 0; v < args.size(); ++v) pw[v].push_back(Jet::constant(nv, order, 1.0));
    const JetLayout& l = a.layout();
    Jet r(nv, order);
    for (int i = 0; i < l.size(); ++i) {
        if (a[i] == 0.0) continue;
        Jet term = Jet::constant(nv, order, a[i]);
        for (int v = 0; v < a.nvars(); ++v) {
            int e = l.exponent(i, v);
            while (static_cast<int>(pw[v].size()) <= e)
                pw[v].push_back(jet_mul(pw[v].back(), args[v]));
            if (e > 0) term = jet_mul(term, pw[v][e]);
        }
        r = jet_add(r, term);
    }
    return r;
}

Jet jet_shift(const Jet& a, const std::vector<double>& delta) {
    if (static_cast<int>(delta.size()) != a.nvars())
        throw VariableMismatch("jet_shift: delta size mismatch");
    std::vector<Jet> args;
    args.reserve(delta.size());
    for (int v = 0; v < a.nvars(); ++v)
        args.push_back(Jet::variable(a.nvars(), a.order(), v, delta[v]));
    return jet_substitute(a, args);
}

Jet jet_embed(const Jet& a, int nvars, const std::vector<int>& var_map) {
    if (static_cast<int>(var_map.size()) != a.nvars())
        throw VariableMismatch("jet_embed: var_map size mismatch");
    Jet r(nvars, a.order());
    const JetLayout& la = a.layout();
    MultiIndex mi(nvars, 0);
    for (int i = 0; i < la.size(); ++i) {
        if (a[i] == 0.0) continue;
        std::fill(mi.begin(), mi.end(), 0);
        for (int v = 0; v < a.nvars(); ++v) mi[var_map[v]] = la.exponent(i, v);
        r.set_coeff(mi, a[i]);
    }
    return r;
}

Jet jet_restrict_last(const Jet& a) {
    if (a.nvars() < 2) throw VariableMismatch("jet_restrict_last: needs >= 2 variables");
    Jet r(a.nvars() - 1, a.order());
    const JetLayout& la = a.layout();
    MultiIndex mi(a.nvars() - 1, 0);
    for (int i = 0; i < la.size(); ++i) {
        if (a[i] == 0.0) continue;
        if (la.exponent(i, a.nvars() - 1) != 0) continue;
        for (int v = 0; v + 1 < a.nvars(); ++v) mi[v] = la.exponent(i, v);
        r.set_coeff(mi, a[i]);
    }
    return r;
}

double max_abs_coeff(const Jet& a) { return max_abs_coeff_up_to(a, a.order()); }

double max_abs_coeff_up_to(const Jet& a, int degree) {
    double m = 0.0;
    int end = a.layout().degree_end(std::min(degree, a.order()));
    for (int i = 0; i < end; ++i) m = std::max(m, std::abs(a[i]));
    return m;
}

// ---- analytic primitives ----------------------------------------------------

namespace {

/// sum_k d[k] (a - a0)^k by Horner, where d[k] = f^(k)(a0)/k!.
Jet apply_series(const Jet& a, const std::vector<double>& d) {
    Jet h = a;
    h[0] = 0.0;
    Jet acc = Jet::constant(a.nvars(), a.order(), d.back());
    for (int k = static_cast<int>(d.size()) - 2; k >= 0; --k)
        acc = jet_add(jet_mul(acc, h), Jet::constant(a.nvars(), a.order(), d[k]));
    return acc;
}

} // namespace

Jet jet_exp(const Jet& a) {
    double e0 = std::exp(a.constant_term());
    std::vector<double> d(a.order() + 1);
    d[0] = e0;
    for (int k = 1; k <= a.order(); ++k) d[k] = d[k - 1] / k;
    return apply_series(a, d);
}

Jet jet_sin(const Jet& a) {
    double u0 = a.constant_term();
    std::vector<double> d(a.order() + 1);
    double fact = 1.0;
    for (int k = 0; k <= a.order(); ++k) {
        if (k > 0) fact *= k;
        switch (k % 4) {
            case 0: d[k] = std::sin(u0) / fact; break;
            case 1: d[k] = std::cos(u0) / fact; break;
            case 2: d[k] = -std::sin(u0) / fact; break;
            default: d[k] = -std::cos(u0) / fact; break;
        }
    }
    return apply_series(a, d);
}

Jet jet_cos(const Jet& a) {
    double u0 = a.constant_term();
    std::vector<double> d(a.order() + 1);
    double fact = 1.0;
    for (int k = 0; k <= a.order(); ++k) {
        if (k > 0) fact *= k;
        switch (k % 4) {
            case 0: d[k] = std::cos(u0) / fact; break;
            case 1: d[k] = -std::sin(u0) / fact; break;
            case 2: d[k] = -std::cos(u0) / fact; break;
            default: d[k] = std::sin(u0) / fact; break;
        }
    }
    return apply_series(a, d);
}

Jet jet_sqrt(const Jet& a) {
    double u0 = a.constant_term();
    if (!(u0 > kDegenerateTol))
        throw SingularExpansion("jet_sqrt: constant term " + std::to_string(u0) +
                                " not strictly positive");
    // d[k] = binom(1/2, k) u0^(1/2 - k)
    std::vector<double> d(a.order() + 1);
    d[0] = std::sqrt(u0);
    double binom = 1.0;
    for (int k = 1; k <= a.order(); ++k) {
        binom *= (0.5 - (k - 1)) / k;
        d[k] = binom * d[0] / std::pow(u0, k);
    }
    return apply_series(a, d);
}

Jet jet_pow_int(const Jet& a, long long k) {
    if (k < 0) return jet_pow_int(jet_reciprocal(a), -k);
    Jet acc = Jet::constant(a.nvars(), a.order(), 1.0);
    Jet base = a;
    while (k > 0) {
        if (k & 1) acc = jet_mul(acc, base);
        k >>= 1;
        if (k > 0) base = jet_mul(base, base);
    }
    return acc;
}

} // namespace einbulk
