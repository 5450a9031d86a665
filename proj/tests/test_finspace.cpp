#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <algorithm>
#include <set>

#include "fkt/finspace.hpp"
#include "fkt/zexact.hpp"

using namespace fkt;

namespace {

std::set<std::string> labels(const FiniteSpace& X, bool connected) {
    std::set<std::string> out;
    for (const auto& s : X.lc_subsets(connected)) out.insert(X.label(s.value));
    return out;
}

// Y = U \ V for opens V in U, and connected in the induced topology
std::set<Mask> brute_lc(const FiniteSpace& X, bool connected) {
    std::set<Mask> out;
    for (Mask u : X.opens())
        for (Mask v : X.opens()) {
            if (!subset_of(v, u)) continue;
            Mask y = u & ~v;
            if (y == 0 && connected) continue;
            if (!connected) {
                out.insert(y);
                continue;
            }
            bool split = false;
            for (Mask a = (y - 1) & y; a && !split; a = (a - 1) & y) {
                bool a_open = false, b_open = false;
                for (Mask o : X.opens()) {
                    a_open = a_open || (o & y) == a;
                    b_open = b_open || (o & y) == (y & ~a);
                }
                split = a_open && b_open;
            }
            if (!split) out.insert(y);
        }
    return out;
}

std::vector<std::vector<Mask>> all_topologies(int n) {
    // every finite topology is the set of down-closed sets of a preorder; enumerate relations
    std::vector<std::vector<Mask>> out;
    std::set<std::vector<Mask>> seen;
    int pairs = n * (n - 1);
    for (long rel = 0; rel < (1L << pairs); ++rel) {
        bool le[5][5] = {};
        int bit = 0;
        for (int a = 0; a < n; ++a)
            for (int b = 0; b < n; ++b) {
                if (a == b) {
                    le[a][b] = true;
                    continue;
                }
                le[a][b] = (rel >> bit++) & 1;
            }
        bool trans = true, anti = true;
        for (int a = 0; a < n; ++a)
            for (int b = 0; b < n; ++b) {
                if (a != b && le[a][b] && le[b][a]) anti = false;
                for (int c = 0; c < n; ++c)
                    if (le[a][b] && le[b][c] && !le[a][c]) trans = false;
            }
        if (!trans || !anti) continue;
        std::vector<Mask> opens;
        for (Mask s = 0; s < (Mask(1) << n); ++s) {
            bool ok = true;
            for (int a = 0; a < n && ok; ++a)
                for (int b = 0; b < n && ok; ++b)
                    if ((s >> a & 1) && le[a][b] && !(s >> b & 1)) ok = false;
            if (ok) opens.push_back(s);
        }
        if (seen.insert(opens).second) out.push_back(opens);
    }
    return out;
}

// Hasse diagram of the specialization order is a disjoint union of paths
bool brute_accordion(const FiniteSpace& X) {
    int n = int(X.size());
    auto lt = [&](int a, int b) { return a != b && X.specializes(a, b); };
    std::vector<std::set<int>> adj(static_cast<std::size_t>(n));
    int edges = 0;
    for (int a = 0; a < n; ++a)
        for (int b = 0; b < n; ++b) {
            if (!lt(a, b)) continue;
            bool cover = true;
            for (int c = 0; c < n; ++c)
                if (lt(a, c) && lt(c, b)) cover = false;
            if (cover) {
                adj[a].insert(b);
                adj[b].insert(a);
                ++edges;
            }
        }
    for (const auto& s : adj)
        if (s.size() > 2) return false;
    // a forest with max degree 2 is a union of paths: edges = n - components
    std::vector<int> comp(static_cast<std::size_t>(n), -1);
    int comps = 0;
    for (int s = 0; s < n; ++s) {
        if (comp[s] >= 0) continue;
        std::vector<int> st{s};
        comp[s] = comps;
        while (!st.empty()) {
            int v = st.back();
            st.pop_back();
            for (int w : adj[v])
                if (comp[w] < 0) {
                    comp[w] = comps;
                    st.push_back(w);
                }
        }
        ++comps;
    }
    return edges == n - comps;
}

}

TEST_CASE("builtin spaces") {
    auto z3 = z_space(3);
    CHECK(z3.size() == 4);
    CHECK(z3.opens().size() == 9);
    for (Mask o : z3.opens()) CHECK((o == 0 || (o & z3.point_mask("4"))));
    auto s = s_space();
    std::set<std::string> so;
    for (Mask o : s.opens()) so.insert(s.label(o));
    CHECK(so == std::set<std::string>{"0", "4", "24", "34", "234", "1234"});
    auto pt = one_point();
    CHECK(pt.opens().size() == 2);
    CHECK(z3.is_t0());
    CHECK_THROWS_AS(FiniteSpace::from_lists("bad", {"1", "2"}, {{}, {"1"}, {"2"}}), ParseError);
    auto nt0 = FiniteSpace::from_lists("lump", {"1", "2"}, {{}, {"1", "2"}});
    CHECK_FALSE(nt0.is_t0());
}

TEST_CASE("connected locally closed subsets") {
    CHECK(labels(pseudocircle(), true) == std::set<std::string>{"3", "4", "134", "234", "1234", "13", "14", "23",
                                                                  "24", "124", "123", "1", "2"});
    CHECK(labels(z_space(3), true) ==
          std::set<std::string>{"1", "2", "3", "4", "14", "24", "34", "124", "134", "234", "1234"});
    CHECK(labels(s_space(), true) ==
          std::set<std::string>{"4", "24", "34", "234", "1234", "123", "12", "13", "1", "2", "3"});
    CHECK(z_space(4).lc_subsets(true).size() == 20);
}

TEST_CASE("lc subsets agree with the open-pair definition on all small spaces") {
    for (int n = 1; n <= 4; ++n) {
        std::vector<std::string> pts;
        for (int i = 1; i <= n; ++i) pts.push_back(std::to_string(i));
        for (const auto& opens : all_topologies(n)) {
            FiniteSpace X("t", pts, opens);
            for (bool conn : {false, true}) {
                std::set<Mask> got;
                for (const auto& s : X.lc_subsets(conn)) {
                    got.insert(s.value);
                    CHECK(X.is_open(s.open));
                    CHECK(X.is_open(s.removed));
                    CHECK(subset_of(s.removed, s.open));
                    CHECK((s.open & ~s.removed) == s.value);
                }
                CHECK(got == brute_lc(X, conn));
            }
            auto all = X.lc_subsets(false);
            for (const auto& s : X.lc_subsets(true))
                CHECK(std::any_of(all.begin(), all.end(), [&](const LCSubset& t) { return t.value == s.value; }));
            CHECK(X.is_accordion_union() == brute_accordion(X));
        }
    }
}

TEST_CASE("accordion spaces on five points") {
    std::vector<std::string> pts{"1", "2", "3", "4", "5"};
    int tested = 0;
    for (const auto& opens : all_topologies(5)) {
        if (++tested % 7) continue;
        FiniteSpace X("t", pts, opens);
        CHECK(X.is_accordion_union() == brute_accordion(X));
    }
}

TEST_CASE("accordion examples") {
    CHECK(z_space(2).is_accordion_union());
    CHECK_FALSE(z_space(3).is_accordion_union());
    CHECK_FALSE(pseudocircle().is_accordion_union());
}

TEST_CASE("open pairs") {
    auto z3 = z_space(3);
    for (const auto& [u, w] : z3.open_pairs(z3.parse("4"))) CHECK((u == 0 || w == 0));
    std::set<std::string> us;
    for (const auto& [u, w] : z3.open_pairs(z3.full())) {
        us.insert(z3.label(u));
        CHECK((u | w) == z3.full());
        CHECK((u & w) == 0);
    }
    for (const char* s : {"4", "14", "24", "34", "124", "134", "234"}) CHECK(us.count(s));
    auto s = s_space();
    std::set<std::string> su;
    for (const auto& [u, w] : s.open_pairs(s.parse("234"))) su.insert(s.label(u));
    for (const char* x : {"4", "24", "34"}) CHECK(su.count(x));
}

TEST_CASE("labels round trip") {
    auto c = pseudocircle();
    for (const auto& s : c.lc_subsets(false)) CHECK(c.parse(c.label(s.value)) == s.value);
}
