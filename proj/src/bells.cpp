#include "einbulk/bells.hpp"

#include "einbulk/errors.hpp"

#include <cmath>

namespace einbulk {

double bell_eval(const BellFunction& f, const std::vector<double>& p) {
    if (p.size() != f.center.size())
        throw VariableMismatch("bell_eval: point dimension mismatch");
    double d2 = 0.0;
    for (std::size_t k = 0; k < p.size(); ++k) {
        double d = p[k] - f.center[k];
        d2 += d * d;
    }
    double r2 = f.radius * f.radius;
    if (d2 >= r2) return 0.0;
    return std::exp(1.0 / (d2 - r2));
}

Jet bell_jet(const BellFunction& f, const std::vector<double>& about, int order) {
    if (about.size() != f.center.size())
        throw VariableMismatch("bell_jet: point dimension mismatch");
    int nv = static_cast<int>(about.size());
    double d2 = 0.0;
    for (int k = 0; k < nv; ++k) {
        double d = about[k] - f.center[k];
        d2 += d * d;
    }
    if (d2 >= f.radius * f.radius)
        throw ExpansionOutsideSupport("bell_jet: expansion point is not interior to the support");
    // |x - c|^2 - r^2 as an exact degree-2 jet about `about`
    Jet s = Jet::constant(nv, order, -f.radius * f.radius);
    for (int k = 0; k < nv; ++k) {
        Jet dk = Jet::variable(nv, order, k, about[k] - f.center[k]);
        s = jet_add(s, jet_mul(dk, dk));
    }
    return jet_exp(jet_reciprocal(s));
}

} // namespace einbulk
