#include "fkt/finspace.hpp"

#include <algorithm>
#include <map>
#include <set>

#include "fkt/zexact.hpp"

namespace fkt {

FiniteSpace::FiniteSpace(std::string name, std::vector<std::string> points, std::vector<Mask> opens)
    : name_(std::move(name)), points_(std::move(points)) {
    if (points_.size() > 30) throw ParseError("space: at most 30 points supported");
    std::set<std::string> uniq(points_.begin(), points_.end());
    if (uniq.size() != points_.size()) throw ParseError("space: duplicate point labels");
    std::set<Mask> fam(opens.begin(), opens.end());
    for (Mask o : fam)
        if (!subset_of(o, full())) throw ParseError("space: open set outside the point set");
    if (!fam.count(0)) throw ParseError("space: the empty set must be open");
    if (!fam.count(full())) throw ParseError("space: the whole space must be open");
    for (Mask a : fam)
        for (Mask b : fam) {
            if (!fam.count(a | b)) throw ParseError("space: opens not closed under union");
            if (!fam.count(a & b)) throw ParseError("space: opens not closed under intersection");
        }
    opens_.assign(fam.begin(), fam.end());
    std::sort(opens_.begin(), opens_.end(), [](Mask a, Mask b) {
        return popcount(a) != popcount(b) ? popcount(a) < popcount(b) : a < b;
    });
    for (std::size_t x = 0; x < points_.size() && t0_; ++x)
        for (std::size_t y = x + 1; y < points_.size(); ++y)
            if (specializes(int(x), int(y)) && specializes(int(y), int(x))) {
                t0_ = false;
                break;
            }
}

FiniteSpace FiniteSpace::from_lists(std::string name, std::vector<std::string> points,
                                    const std::vector<std::vector<std::string>>& opens) {
    std::vector<Mask> ms;
    for (const auto& o : opens) {
        Mask m = 0;
        for (const auto& p : o) {
            auto it = std::find(points.begin(), points.end(), p);
            if (it == points.end()) throw ParseError("space: unknown point '" + p + "' in open set");
            m |= Mask(1) << (it - points.begin());
        }
        ms.push_back(m);
    }
    return FiniteSpace(std::move(name), std::move(points), ms);
}

bool FiniteSpace::is_open(Mask s) const { return std::find(opens_.begin(), opens_.end(), s) != opens_.end(); }

bool FiniteSpace::rel_open(Mask s, Mask y) const {
    if (!subset_of(s, y)) return false;
    return std::any_of(opens_.begin(), opens_.end(), [&](Mask o) { return (o & y) == s; });
}

Mask FiniteSpace::smallest_open(Mask s) const {
    Mask r = full();
    for (Mask o : opens_)
        if (subset_of(s, o)) r &= o;
    return r;
}

Mask FiniteSpace::closure(Mask s) const {
    Mask r = full();
    for (Mask o : opens_) {
        Mask c = full() & ~o;
        if (subset_of(s, c)) r &= c;
    }
    return r;
}

bool FiniteSpace::locally_closed(Mask s) const {
    Mask u = smallest_open(s);
    return is_open(u & ~s);
}

bool FiniteSpace::specializes(int x, int y) const {
    Mask bx = Mask(1) << x, by = Mask(1) << y;
    for (Mask o : opens_)
        if ((o & bx) && !(o & by)) return false;
    return true;
}

std::vector<Mask> FiniteSpace::components(Mask y) const {
    // relatively clopen subsets of y; a component is the intersection of those containing a point
    std::vector<Mask> rel;
    for (Mask o : opens_) rel.push_back(o & y);
    std::sort(rel.begin(), rel.end());
    rel.erase(std::unique(rel.begin(), rel.end()), rel.end());
    std::vector<Mask> clopen;
    for (Mask s : rel)
        if (std::binary_search(rel.begin(), rel.end(), Mask(y & ~s))) clopen.push_back(s);
    std::vector<Mask> comps;
    Mask seen = 0;
    for (std::size_t x = 0; x < points_.size(); ++x) {
        Mask bx = Mask(1) << x;
        if (!(y & bx) || (seen & bx)) continue;
        Mask c = y;
        for (Mask s : clopen)
            if (s & bx) c &= s;
        comps.push_back(c);
        seen |= c;
    }
    return comps;
}

std::string FiniteSpace::label(Mask s) const {
    if (s == 0) return "0";
    std::vector<std::string> ps = point_list(s);
    std::sort(ps.begin(), ps.end());
    std::string out;
    for (const auto& p : ps) out += p;
    return out;
}

std::vector<std::string> FiniteSpace::point_list(Mask s) const {
    std::vector<std::string> ps;
    for (std::size_t i = 0; i < points_.size(); ++i)
        if (s & (Mask(1) << i)) ps.push_back(points_[i]);
    return ps;
}

Mask FiniteSpace::point_mask(const std::string& p) const {
    auto it = std::find(points_.begin(), points_.end(), p);
    if (it == points_.end()) throw ParseError("unknown point '" + p + "'");
    return Mask(1) << (it - points_.begin());
}

Mask FiniteSpace::parse(const std::string& lbl) const {
    if (lbl == "0" || lbl.empty()) return 0;
    // labels are concatenations of point names; greedy match on the longest name
    Mask m = 0;
    std::size_t pos = 0;
    while (pos < lbl.size()) {
        std::size_t best = 0;
        int which = -1;
        for (std::size_t i = 0; i < points_.size(); ++i) {
            const auto& p = points_[i];
            if (p.size() > best && lbl.compare(pos, p.size(), p) == 0) {
                best = p.size();
                which = int(i);
            }
        }
        if (which < 0) throw ParseError("cannot read subset label '" + lbl + "'");
        m |= Mask(1) << which;
        pos += best;
    }
    return m;
}

std::vector<LCSubset> FiniteSpace::lc_subsets(bool connected_only) const {
    std::map<Mask, LCSubset> found;
    for (Mask u : opens_)
        for (Mask v : opens_) {
            if (!subset_of(v, u)) continue;
            Mask y = u & ~v;
            if (connected_only && !connected(y)) continue;
            if (found.count(y)) continue;
            Mask su = smallest_open(y);
            found[y] = LCSubset{y, su, Mask(su & ~y)};
        }
    std::vector<LCSubset> out;
    for (auto& [m, s] : found) out.push_back(s);
    std::sort(out.begin(), out.end(), [this](const LCSubset& a, const LCSubset& b) {
        if (popcount(a.value) != popcount(b.value)) return popcount(a.value) < popcount(b.value);
        return label(a.value) < label(b.value);
    });
    return out;
}

std::vector<std::pair<Mask, Mask>> FiniteSpace::open_pairs(Mask y) const {
    std::set<Mask> us;
    for (Mask o : opens_) us.insert(o & y);
    std::vector<std::pair<Mask, Mask>> out;
    for (Mask u : us) out.emplace_back(u, Mask(y & ~u));
    return out;
}

bool FiniteSpace::is_accordion_union() const {
    if (!t0_) throw ComputationError("accordion check needs a T0 space");
    int n = int(points_.size());
    // covering relations of the specialization order
    std::vector<std::vector<int>> adj(n);
    for (int x = 0; x < n; ++x)
        for (int y = 0; y < n; ++y) {
            if (x == y || !specializes(x, y)) continue;
            bool cover = true;
            for (int z = 0; z < n && cover; ++z)
                if (z != x && z != y && specializes(x, z) && specializes(z, y)) cover = false;
            if (cover) {
                adj[x].push_back(y);
                adj[y].push_back(x);
            }
        }
    for (Mask c : components(full())) {
        int verts = popcount(c), edges = 0;
        for (int x = 0; x < n; ++x) {
            if (!(c & (Mask(1) << x))) continue;
            if (adj[x].size() > 2) return false;
            edges += int(adj[x].size());
        }
        if (edges / 2 != verts - 1) return false;
    }
    return true;
}

FiniteSpace z_space(int m) {
    if (m < 1 || m > 20) throw ParseError("Z_m needs 1 <= m <= 20");
    std::vector<std::string> pts;
    for (int i = 1; i <= m + 1; ++i) pts.push_back(std::to_string(i));
    Mask top = Mask(1) << m;
    std::vector<Mask> opens{0};
    for (Mask s = 0; s < (Mask(1) << m); ++s) opens.push_back(s | top);
    return FiniteSpace("Z" + std::to_string(m), pts, opens);
}

FiniteSpace s_space() {
    return FiniteSpace::from_lists("S", {"1", "2", "3", "4"},
                                   {{}, {"4"}, {"2", "4"}, {"3", "4"}, {"2", "3", "4"}, {"1", "2", "3", "4"}});
}

FiniteSpace pseudocircle() {
    return FiniteSpace::from_lists(
        "C2", {"1", "2", "3", "4"},
        {{}, {"3"}, {"4"}, {"3", "4"}, {"1", "3", "4"}, {"2", "3", "4"}, {"1", "2", "3", "4"}});
}

FiniteSpace one_point() { return FiniteSpace::from_lists("pt", {"1"}, {{}, {"1"}}); }

bool is_builtin_space(const std::string& name) {
    return name == "Z1" || name == "Z2" || name == "Z3" || name == "Z4" || name == "S" || name == "C2" ||
           name == "pt";
}

FiniteSpace builtin_space(const std::string& name) {
    if (name.size() == 2 && name[0] == 'Z' && name[1] >= '1' && name[1] <= '4') return z_space(name[1] - '0');
    if (name == "S") return s_space();
    if (name == "C2") return pseudocircle();
    if (name == "pt") return one_point();
    throw ParseError("unknown builtin space '" + name + "'");
}

}
