#pragma once

#include <string>
#include <vector>

namespace einbulk {

/// Finitely generated group descriptor for the homotopy splitting.
struct GroupExpr {
    enum class Kind { Trivial, FreeAbelian, Cyclic, DirectSum, Named };
    Kind kind = Kind::Trivial;
    long long rank = 0;           // FreeAbelian
    long long modulus = 0;        // Cyclic
    std::string token;            // Named (nonabelian, kept symbolic)
    std::vector<GroupExpr> parts; // DirectSum

    static GroupExpr trivial();
    static GroupExpr free_abelian(long long rank);
    static GroupExpr cyclic(long long k);
    static GroupExpr named(std::string token);
    static GroupExpr direct_sum(std::vector<GroupExpr> parts);
};

/// Unique normal form: sums flattened, trivial factors removed, free ranks
/// merged, factors ordered (free part, cyclic ascending, named tokens).
GroupExpr normalize(const GroupExpr& g);
bool group_equal(const GroupExpr& a, const GroupExpr& b);
std::string to_string(const GroupExpr& g);

/// Catalog manifolds with pi_m tables for m = 1..4: R1..R4, S1, S2, S3, T2
/// (aliases circle = S1, torus = T2, interval/flat1 = R1, flat2 = R2), plus
/// products joined with 'x', e.g. "S2xS1".
int homotopy_max_level();
std::vector<std::string> homotopy_catalog();
GroupExpr homotopy_group(const std::string& id, int m);

/// pi_m(M x F) = pi_m(M) (+) pi_m(F), normalized (the direct product at
/// m = 1, which coincides with the sum on this abelian catalog).
GroupExpr split_product(const std::string& m_id, const std::string& f_id, int m);

} // namespace einbulk
