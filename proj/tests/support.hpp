#pragma once
#include <random>
#include <string>
#include <vector>

#include "fkt/graphk.hpp"
#include "fkt/ntmod.hpp"

namespace fkt::testing {

inline IntMatrix random_matrix(std::mt19937& rng, std::size_t r, std::size_t c, int lo, int hi) {
    std::uniform_int_distribution<int> d(lo, hi);
    IntMatrix m(r, c);
    for (std::size_t i = 0; i < r; ++i)
        for (std::size_t j = 0; j < c; ++j) m(i, j) = d(rng);
    return m;
}

inline BlockGraph ck_z3_graph() {
    IntMatrix A(8, 8);
    auto put = [&](int bi, int bj, std::vector<std::vector<long>> b) { A.set_block(2 * bi, 2 * bj, IntMatrix::from_rows(b)); };
    put(0, 0, {{3, 2}, {2, 3}});
    for (int j = 1; j < 4; ++j) {
        put(j, 0, {{1, 1}, {1, 1}});
        put(j, j, {{3, 2}, {1, 2}});
    }
    return BlockGraph("Z3", builtin_space("Z3"), {{"4", 2}, {"1", 2}, {"2", 2}, {"3", 2}}, A);
}

inline BlockGraph ck_s_graph() {
    IntMatrix A = IntMatrix::from_rows(
        {{3, 0, 0, 0, 0}, {2, 3, 0, 0, 0}, {2, 0, 3, 0, 0}, {2, 1, 1, 2, 1}, {0, 0, 0, 1, 2}});
    return BlockGraph("S", builtin_space("S"), {{"4", 1}, {"3", 1}, {"2", 1}, {"1", 2}}, A);
}

// 1-3 vertices per block, entries 0..3 wherever the ideal structure allows an edge
inline BlockGraph random_graph(const std::string& space, std::mt19937& rng, int max_vertices = 3, int max_entry = 3) {
    FiniteSpace X = builtin_space(space);
    std::vector<GraphBlock> blocks;
    std::vector<int> pt;
    std::uniform_int_distribution<int> nv(1, max_vertices), ent(0, max_entry);
    for (std::size_t p = 0; p < X.size(); ++p) {
        int n = nv(rng);
        blocks.push_back({X.points()[p], n});
        pt.insert(pt.end(), std::size_t(n), int(p));
    }
    IntMatrix A(pt.size(), pt.size());
    for (std::size_t v = 0; v < pt.size(); ++v)
        for (std::size_t w = 0; w < pt.size(); ++w)
            if (X.specializes(pt[v], pt[w])) A(v, w) = ent(rng);
    return BlockGraph(space, X, blocks, A);
}

// cokernel of a random degree-preserving map between small sums of free left modules
inline GradedModule random_module(std::shared_ptr<const Category> cat, std::mt19937& rng, int max_summands = 3) {
    const auto& T = cat->table;
    std::uniform_int_distribution<int> obj(0, int(cat->size()) - 1), bit(0, 1), coef(-2, 2),
        cnt(1, max_summands);
    FreeMap f;
    int ns = cnt(rng), nt = cnt(rng);
    for (int k = 0; k < ns; ++k) f.source.push_back({obj(rng), bit(rng)});
    for (int k = 0; k < nt; ++k) f.target.push_back({obj(rng), bit(rng)});
    f.entry.assign(f.target.size(), std::vector<Coeffs>(f.source.size()));
    for (std::size_t i = 0; i < f.target.size(); ++i)
        for (std::size_t j = 0; j < f.source.size(); ++j) {
            const auto& ids = T.hom(f.target[i].obj, f.source[j].obj);
            Coeffs c(ids.size());
            int want = f.target[i].shift ^ f.source[j].shift;
            for (std::size_t p = 0; p < ids.size(); ++p)
                if (T.elem(ids[p]).parity == want && bit(rng)) c[p] = coef(rng);
            f.entry[i][j] = c;
        }
    return coker_module(cat, f);
}

inline const std::vector<std::string>& z4_rows() {
    static const std::vector<std::string> r{"125", "135", "145", "235", "245", "345"};
    return r;
}
inline const std::vector<std::string>& z4_cols() {
    static const std::vector<std::string> c{"1235", "1245", "1345", "2345"};
    return c;
}
inline const std::vector<std::vector<int>>& z4_signs() {
    static const std::vector<std::vector<int>> s{{1, -1, 0, 0}, {-1, 0, 1, 0}, {0, 1, -1, 0},
                                                 {1, 0, 0, -1}, {0, -1, 0, 1}, {0, 0, 1, -1}};
    return s;
}

inline Coeffs scaled(Coeffs c, long k) {
    for (auto& x : c) x *= k;
    return c;
}

// beta: sum P_{ijk5} -> sum P_{jk5} with the reference sign matrix
inline FreeMap z4_beta(const Category& cat) {
    FreeMap f;
    for (const auto& c : z4_cols()) f.source.push_back({cat.object(c), 0});
    for (const auto& r : z4_rows()) f.target.push_back({cat.object(r), 0});
    f.entry.assign(6, std::vector<Coeffs>(4));
    for (std::size_t i = 0; i < 6; ++i)
        for (std::size_t j = 0; j < 4; ++j)
            if (int s = z4_signs()[i][j]) f.entry[i][j] = scaled(cat.word({"i_" + z4_rows()[i] + "_" + z4_cols()[j]}), s);
    return f;
}

// alpha: P_12345 -> sum P_{ijk5}, all entries i
inline FreeMap z4_alpha(const Category& cat) {
    FreeMap f;
    f.source.push_back({cat.object("12345"), 0});
    for (const auto& c : z4_cols()) f.target.push_back({cat.object(c), 0});
    f.entry.assign(4, std::vector<Coeffs>(1));
    for (std::size_t i = 0; i < 4; ++i) f.entry[i][0] = cat.word({"i_" + z4_cols()[i] + "_12345"});
    return f;
}

inline Coeffs id_coeffs(const Category& cat, int y, long k) {
    Coeffs c(cat.table.rank(y, y));
    c[std::size_t(cat.table.pos(cat.table.identity(y)))] = k;
    return c;
}

// 0 -> P5 -> P5+P4 -> P4+P3 -> P3 for M tensor Z/k; chain[0] is the lowest map
inline std::vector<FreeMap> z4_mk_resolution(const Category& cat, long k) {
    FreeMap a = z4_alpha(cat), b = z4_beta(cat);
    int top = cat.object("12345");
    auto sum = [](std::vector<Summand> x, const std::vector<Summand>& y) {
        x.insert(x.end(), y.begin(), y.end());
        return x;
    };
    auto diag_id = [&](const std::vector<Summand>& s) {
        std::vector<std::vector<Coeffs>> e(s.size(), std::vector<Coeffs>(s.size()));
        for (std::size_t i = 0; i < s.size(); ++i) e[i][i] = id_coeffs(cat, s[i].obj, k);
        return e;
    };
    std::vector<Summand> P5{{top, 0}}, P4 = a.target, P3 = b.target;
    // (beta k): P4 + P3 -> P3
    FreeMap d1;
    d1.source = sum(P4, P3);
    d1.target = P3;
    d1.entry.assign(6, std::vector<Coeffs>(10));
    auto kid3 = diag_id(P3);
    for (std::size_t i = 0; i < 6; ++i) {
        for (std::size_t j = 0; j < 4; ++j) d1.entry[i][j] = b.entry[i][j];
        for (std::size_t j = 0; j < 6; ++j) d1.entry[i][4 + j] = kid3[i][j];
    }
    // ((alpha -k); (0 beta)): P5 + P4 -> P4 + P3
    FreeMap d2;
    d2.source = sum(P5, P4);
    d2.target = sum(P4, P3);
    d2.entry.assign(10, std::vector<Coeffs>(5));
    auto kid4 = diag_id(P4);
    for (std::size_t i = 0; i < 4; ++i) {
        d2.entry[i][0] = a.entry[i][0];
        for (std::size_t j = 0; j < 4; ++j)
            if (!kid4[i][j].empty()) d2.entry[i][1 + j] = scaled(kid4[i][j], -1);
    }
    for (std::size_t i = 0; i < 6; ++i)
        for (std::size_t j = 0; j < 4; ++j) d2.entry[4 + i][1 + j] = b.entry[i][j];
    // (k; alpha): P5 -> P5 + P4
    FreeMap d3;
    d3.source = P5;
    d3.target = sum(P5, P4);
    d3.entry.assign(5, std::vector<Coeffs>(1));
    d3.entry[0][0] = id_coeffs(cat, top, k);
    for (std::size_t i = 0; i < 4; ++i) d3.entry[1 + i][0] = a.entry[i][0];
    return {d1, d2, d3};
}

inline bool tor_equal(const TorReport& a, const TorReport& b) {
    return a.per_object == b.per_object && a.aggregate == b.aggregate;
}

// associativity, units and parity over every composable triple of basis elements
inline bool table_axioms_hold(const HomTable& T) {
    std::size_t n = T.num_objects();
    for (std::size_t y = 0; y < n; ++y) {
        int id = T.identity(int(y));
        if (T.elem(id).parity != 0) return false;
        for (std::size_t z = 0; z < n; ++z)
            for (int a : T.hom(int(y), int(z))) {
                Coeffs ua = T.unit(a);
                if (T.compose(int(y), int(y), int(z), T.unit(id), ua) != ua) return false;
                if (T.compose(int(y), int(z), int(z), ua, T.unit(T.identity(int(z)))) != ua) return false;
            }
    }
    for (std::size_t y = 0; y < n; ++y)
        for (std::size_t z = 0; z < n; ++z)
            for (int a : T.hom(int(y), int(z)))
                for (std::size_t w = 0; w < n; ++w)
                    for (int b : T.hom(int(z), int(w))) {
                        Coeffs ab = T.compose(int(y), int(z), int(w), T.unit(a), T.unit(b));
                        for (std::size_t p = 0; p < ab.size(); ++p)
                            if (ab[p] != 0 && T.elem(T.hom(int(y), int(w))[p]).parity != (T.elem(a).parity ^ T.elem(b).parity))
                                return false;
                        for (std::size_t v = 0; v < n; ++v)
                            for (int c : T.hom(int(w), int(v))) {
                                Coeffs bc = T.compose(int(z), int(w), int(v), T.unit(b), T.unit(c));
                                if (T.compose(int(y), int(w), int(v), ab, T.unit(c)) !=
                                    T.compose(int(y), int(z), int(v), T.unit(a), bc))
                                    return false;
                            }
                    }
    return true;
}

}
