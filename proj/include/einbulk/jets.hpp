#pragma once

#include <cstdint>
#include <memory>
#include <vector>

namespace einbulk {

/// Exponent tuple, one entry per variable.  Total degree is the entry sum.
using MultiIndex = std::vector<int>;

int total_degree(const MultiIndex& mi);

/// Shared index table for all jets with a given (nvars, order): the graded
/// list of multi-indices of total degree <= order and the reverse lookup.
/// Exponents pack into one uint64 (8 bits each), so the key of a product of
/// monomials is the sum of keys.
class JetLayout {
public:
    static std::shared_ptr<const JetLayout> get(int nvars, int order);

    int nvars() const { return nvars_; }
    int order() const { return order_; }
    int size() const { return static_cast<int>(keys_.size()); }

    int degree(int i) const { return degrees_[i]; }
    /// First table index of the given total degree.
    int degree_begin(int d) const { return degree_begin_[d]; }
    int degree_end(int d) const { return degree_begin_[d + 1]; }

    MultiIndex exponents(int i) const;
    int exponent(int i, int var) const { return exps_[static_cast<std::size_t>(i) * nvars_ + var]; }

    std::uint64_t key(int i) const { return keys_[i]; }
    int index_of_key(std::uint64_t k) const; // -1 if absent
    int index_of(const MultiIndex& mi) const;

private:
    JetLayout(int nvars, int order);

    int nvars_;
    int order_;
    std::vector<std::uint64_t> keys_;
    std::vector<int> lookup_;     // open-addressed key -> index
    std::vector<std::uint64_t> lookup_keys_;
    std::vector<std::uint8_t> degrees_;
    std::vector<int> degree_begin_;
    std::vector<std::uint8_t> exps_;
};

/// Truncated multivariate Taylor expansion about a chart point: coefficients
/// for every multi-index of total degree <= order, dense in graded order.
/// Values are immutable once built by an operation; all operations are pure.
class Jet {
public:
    Jet() = default;
    Jet(int nvars, int order); // zero jet

    static Jet constant(int nvars, int order, double value);
    /// center + offset in the given variable: the expansion of the coordinate
    /// function about `center`.
    static Jet variable(int nvars, int order, int var, double center = 0.0);

    int nvars() const { return layout_ ? layout_->nvars() : 0; }
    int order() const { return layout_ ? layout_->order() : 0; }
    const JetLayout& layout() const { return *layout_; }
    bool valid() const { return layout_ != nullptr; }

    double coeff(const MultiIndex& mi) const;
    void set_coeff(const MultiIndex& mi, double v);
    double operator[](int i) const { return c_[i]; }
    double& operator[](int i) { return c_[i]; }
    const std::vector<double>& coeffs() const { return c_; }

    double constant_term() const { return c_.empty() ? 0.0 : c_[0]; }
    bool all_finite() const;

private:
    std::shared_ptr<const JetLayout> layout_;
    std::vector<double> c_;
};

// ---- ring operations ------------------------------------------------------

/// Coefficient-wise sum truncated to min(a.order, b.order).
Jet jet_add(const Jet& a, const Jet& b);
Jet jet_sub(const Jet& a, const Jet& b);
/// Cauchy product truncated to min(a.order, b.order).
Jet jet_mul(const Jet& a, const Jet& b);
Jet jet_scale(const Jet& a, double s);
Jet jet_neg(const Jet& a);

inline Jet operator+(const Jet& a, const Jet& b) { return jet_add(a, b); }
inline Jet operator-(const Jet& a, const Jet& b) { return jet_sub(a, b); }
inline Jet operator*(const Jet& a, const Jet& b) { return jet_mul(a, b); }
inline Jet operator*(const Jet& a, double s) { return jet_scale(a, s); }
inline Jet operator*(double s, const Jet& a) { return jet_scale(a, s); }
inline Jet operator-(const Jet& a) { return jet_neg(a); }

/// Multiplicative inverse to truncation order; throws ZeroConstantTerm when
/// the constant term is below the degeneracy tolerance.
Jet jet_reciprocal(const Jet& a);

/// Formal partial derivative; result order = max(order - 1, 0).
Jet jet_diff(const Jet& a, int var);

/// Taylor composition outer(inner) truncated to inner.order.  outer must be
/// univariate; a nonzero inner constant term re-expands outer about it first.
Jet jet_compose(const Jet& outer, const Jet& inner);

/// Polynomial evaluation of the truncation.
double jet_eval(const Jet& a, const std::vector<double>& point);

// ---- structural helpers ---------------------------------------------------

Jet jet_truncate(const Jet& a, int order);
/// Evaluate the polynomial over jet-valued arguments (ring homomorphism).
Jet jet_substitute(const Jet& a, const std::vector<Jet>& args);
/// Re-center the truncation about point + delta (exact polynomial shift).
Jet jet_shift(const Jet& a, const std::vector<double>& delta);
/// Widen the variable space: variable v of `a` becomes var_map[v].
Jet jet_embed(const Jet& a, int nvars, const std::vector<int>& var_map);
/// Drop the last variable by setting it to zero.
Jet jet_restrict_last(const Jet& a);

double max_abs_coeff(const Jet& a);
double max_abs_coeff_up_to(const Jet& a, int degree);

// ---- analytic primitives (expansion about the constant term) ---------------

Jet jet_exp(const Jet& a);
Jet jet_sin(const Jet& a);
Jet jet_cos(const Jet& a);
Jet jet_sqrt(const Jet& a); // SingularExpansion unless constant term > 0
Jet jet_pow_int(const Jet& a, long long k);

/// |constant term| below this signals a degenerate reciprocal/metric.
inline constexpr double kDegenerateTol = 1e-12;

} // namespace einbulk
