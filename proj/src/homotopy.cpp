#include "einbulk/homotopy.hpp"

#include "einbulk/errors.hpp"

#include <algorithm>
#include <map>

namespace einbulk {

GroupExpr GroupExpr::trivial() { return {}; }

GroupExpr GroupExpr::free_abelian(long long rank) {
    GroupExpr g;
    g.kind = Kind::FreeAbelian;
    g.rank = rank;
    return g;
}

GroupExpr GroupExpr::cyclic(long long k) {
    GroupExpr g;
    g.kind = Kind::Cyclic;
    g.modulus = k;
    return g;
}

GroupExpr GroupExpr::named(std::string token) {
    GroupExpr g;
    g.kind = Kind::Named;
    g.token = std::move(token);
    return g;
}

GroupExpr GroupExpr::direct_sum(std::vector<GroupExpr> parts) {
    GroupExpr g;
    g.kind = Kind::DirectSum;
    g.parts = std::move(parts);
    return g;
}

namespace {

void collect(const GroupExpr& g, long long& free_rank, std::vector<long long>& cyclics,
             std::vector<std::string>& named) {
    switch (g.kind) {
        case GroupExpr::Kind::Trivial: return;
        case GroupExpr::Kind::FreeAbelian:
            free_rank += g.rank;
            return;
        case GroupExpr::Kind::Cyclic:
            if (g.modulus > 1) cyclics.push_back(g.modulus);
            return;
        case GroupExpr::Kind::Named:
            named.push_back(g.token);
            return;
        case GroupExpr::Kind::DirectSum:
            for (const GroupExpr& part : g.parts) collect(part, free_rank, cyclics, named);
            return;
    }
}

} // namespace

GroupExpr normalize(const GroupExpr& g) {
    long long free_rank = 0;
    std::vector<long long> cyclics;
    std::vector<std::string> named;
    collect(g, free_rank, cyclics, named);
    std::sort(cyclics.begin(), cyclics.end());
    std::sort(named.begin(), named.end());

    std::vector<GroupExpr> parts;
    if (free_rank > 0) parts.push_back(GroupExpr::free_abelian(free_rank));
    for (long long k : cyclics) parts.push_back(GroupExpr::cyclic(k));
    for (const std::string& t : named) parts.push_back(GroupExpr::named(t));
    if (parts.empty()) return GroupExpr::trivial();
    if (parts.size() == 1) return parts[0];
    return GroupExpr::direct_sum(std::move(parts));
}

bool group_equal(const GroupExpr& a, const GroupExpr& b) {
    return to_string(normalize(a)) == to_string(normalize(b));
}

std::string to_string(const GroupExpr& g) {
    switch (g.kind) {
        case GroupExpr::Kind::Trivial: return "0";
        case GroupExpr::Kind::FreeAbelian:
            return g.rank == 1 ? "Z" : "Z^" + std::to_string(g.rank);
        case GroupExpr::Kind::Cyclic: return "Z/" + std::to_string(g.modulus);
        case GroupExpr::Kind::Named: return g.token;
        case GroupExpr::Kind::DirectSum: {
            std::string s;
            for (std::size_t i = 0; i < g.parts.size(); ++i) {
                if (i) s += " + ";
                s += to_string(g.parts[i]);
            }
            return s.empty() ? "0" : s;
        }
    }
    return "0";
}

namespace {

constexpr int kMaxLevel = 4;

// pi_m tables for m = 1..4, from the standard references
const std::map<std::string, std::vector<const char*>>& base_tables() {
    static const std::map<std::string, std::vector<const char*>> tables = {
        {"R1", {"0", "0", "0", "0"}},
        {"R2", {"0", "0", "0", "0"}},
        {"R3", {"0", "0", "0", "0"}},
        {"R4", {"0", "0", "0", "0"}},
        {"S1", {"Z", "0", "0", "0"}},
        {"S2", {"0", "Z", "Z", "Z/2"}},
        {"S3", {"0", "0", "Z", "Z/2"}},
        {"T2", {"Z^2", "0", "0", "0"}},
    };
    return tables;
}

std::string canonical_id(const std::string& id) {
    static const std::map<std::string, std::string> aliases = {
        {"circle", "S1"}, {"torus", "T2"}, {"interval", "R1"}, {"flat1", "R1"},
        {"flat2", "R2"}, {"R", "R1"},
    };
    auto it = aliases.find(id);
    return it == aliases.end() ? id : it->second;
}

GroupExpr parse_group(const std::string& s) {
    if (s == "0") return GroupExpr::trivial();
    if (s == "Z") return GroupExpr::free_abelian(1);
    if (s.rfind("Z^", 0) == 0) return GroupExpr::free_abelian(std::stoll(s.substr(2)));
    if (s.rfind("Z/", 0) == 0) return GroupExpr::cyclic(std::stoll(s.substr(2)));
    return GroupExpr::named(s);
}

} // namespace

int homotopy_max_level() { return kMaxLevel; }

std::vector<std::string> homotopy_catalog() {
    std::vector<std::string> ids;
    for (const auto& [id, table] : base_tables()) ids.push_back(id);
    return ids;
}

GroupExpr homotopy_group(const std::string& id, int m) {
    if (m < 1 || m > kMaxLevel)
        throw LevelOutOfRange("homotopy level " + std::to_string(m) + " outside 1.." +
                              std::to_string(kMaxLevel));
    std::string cid = canonical_id(id);
    std::size_t x = cid.find('x');
    if (x != std::string::npos) {
        // product id: split factor by factor
        GroupExpr left = homotopy_group(cid.substr(0, x), m);
        GroupExpr right = homotopy_group(cid.substr(x + 1), m);
        return normalize(GroupExpr::direct_sum({left, right}));
    }
    auto it = base_tables().find(cid);
    if (it == base_tables().end())
        throw UnknownManifold("no homotopy table for '" + id + "'");
    return parse_group(it->second[m - 1]);
}

GroupExpr split_product(const std::string& m_id, const std::string& f_id, int m) {
    GroupExpr gm = homotopy_group(m_id, m);
    GroupExpr gf = homotopy_group(f_id, m);
    return normalize(GroupExpr::direct_sum({gm, gf}));
}

} // namespace einbulk
