#include "fkt/graphk.hpp"

#include <algorithm>
#include <functional>
#include <numeric>
#include <utility>

namespace fkt {

BlockGraph::BlockGraph(std::string name, FiniteSpace X, std::vector<GraphBlock> bl, IntMatrix A)
    : space_name(std::move(name)), space(std::move(X)), blocks(std::move(bl)), adjacency(std::move(A)) {
    if (blocks.size() != space.size()) throw ParseError("graph needs exactly one block per point");
    Mask seen = 0;
    std::size_t n = 0;
    for (const auto& b : blocks) {
        Mask p = space.point_mask(b.point);
        if (seen & p) throw ParseError("point '" + b.point + "' carries two blocks");
        seen |= p;
        if (b.vertices < 0) throw ParseError("negative vertex count");
        for (int k = 0; k < b.vertices; ++k) vertex_point_.push_back(p);
        n += std::size_t(b.vertices);
    }
    if (adjacency.rows() != n || adjacency.cols() != n)
        throw ParseError("adjacency must be " + std::to_string(n) + "x" + std::to_string(n));
    for (std::size_t i = 0; i < n; ++i)
        for (std::size_t j = 0; j < n; ++j)
            if (sgn(adjacency(i, j)) < 0) throw ParseError("adjacency entries must be nonnegative");
}

std::vector<std::size_t> BlockGraph::vertices(Mask y) const {
    std::vector<std::size_t> out;
    for (std::size_t v = 0; v < vertex_point_.size(); ++v)
        if (vertex_point_[v] & y) out.push_back(v);
    return out;
}

IntMatrix BlockGraph::bprime(const std::vector<std::size_t>& r, const std::vector<std::size_t>& c) const {
    IntMatrix out(r.size(), c.size());
    for (std::size_t i = 0; i < r.size(); ++i)
        for (std::size_t j = 0; j < c.size(); ++j) out(i, j) = adjacency(c[j], r[i]) - (r[i] == c[j] ? 1 : 0);
    return out;
}

namespace {

int point_index(Mask p) { return __builtin_ctz(p); }

// simple cycles through each vertex, counted with edge multiplicity
std::vector<Int> cycle_counts(const IntMatrix& A) {
    std::size_t n = A.rows();
    std::vector<Int> count(n, 0);
    std::vector<std::size_t> path;
    std::vector<bool> on(n, false);
    std::function<void(std::size_t, std::size_t, const Int&)> dfs = [&](std::size_t s, std::size_t v, const Int& w) {
        for (std::size_t u = s; u < n; ++u) {
            if (sgn(A(v, u)) == 0) continue;
            Int ww = w * A(v, u);
            if (u == s) {
                for (std::size_t p : path) count[p] += ww;
            } else if (!on[u]) {
                on[u] = true;
                path.push_back(u);
                dfs(s, u, ww);
                path.pop_back();
                on[u] = false;
            }
        }
    };
    for (std::size_t s = 0; s < n; ++s) {
        path = {s};
        on[s] = true;
        dfs(s, s, Int(1));
        on[s] = false;
    }
    return count;
}

IntMatrix inclusion(const std::vector<std::size_t>& small, const std::vector<std::size_t>& big) {
    IntMatrix E(big.size(), small.size());
    for (std::size_t j = 0; j < small.size(); ++j) {
        auto it = std::find(big.begin(), big.end(), small[j]);
        if (it == big.end()) throw ComputationError("vertex set is not contained in the target");
        E(std::size_t(it - big.begin()), j) = 1;
    }
    return E;
}

IntMatrix restrict_k1(const SubquotientK& to, const IntMatrix& image) {
    auto c = solve(to.k1, image);
    if (!c) throw ComputationError("kernel map does not land in the kernel of " + std::to_string(to.y));
    return *c;
}

}

GraphReport graph_checks(const BlockGraph& G, std::size_t vertex_limit) {
    GraphReport rep;
    std::size_t n = G.num_vertices();
    const auto& A = G.adjacency;
    for (std::size_t v = 0; v < n; ++v)
        for (std::size_t w = 0; w < n; ++w)
            if (sgn(A(v, w)) != 0 && !G.space.specializes(point_index(G.point_of(v)), point_index(G.point_of(w))))
                rep.triangular = false;
    for (std::size_t v = 0; v < n; ++v) {
        bool out = false, in = false;
        for (std::size_t w = 0; w < n; ++w) {
            out = out || sgn(A(v, w)) != 0;
            in = in || sgn(A(w, v)) != 0;
        }
        if (!out) rep.sinks.push_back(v);
        if (!in) rep.sources.push_back(v);
    }
    rep.has_sinks = !rep.sinks.empty();
    rep.has_sources = !rep.sources.empty();
    if (n > vertex_limit)
        throw ComputationError("condition (K) check limited to " + std::to_string(vertex_limit) + " vertices");
    auto cnt = cycle_counts(A);
    for (std::size_t v = 0; v < n; ++v)
        if (cnt[v] == 1) rep.too_few_cycles.push_back(v);
    rep.condition_k = rep.too_few_cycles.empty();
    return rep;
}

SubquotientK k_groups(const BlockGraph& G, Mask y) {
    if (!G.space.locally_closed(y)) throw HypothesisError("'" + G.space.label(y) + "' is not locally closed");
    SubquotientK K;
    K.y = y;
    K.vertices = G.vertices(y);
    for (std::size_t v : K.vertices)
        for (std::size_t w : K.vertices)
            if (sgn(G.adjacency(v, w)) != 0 &&
                !G.space.specializes(point_index(G.point_of(v)), point_index(G.point_of(w))))
                throw HypothesisError("edges violate the ideal structure on " + G.space.label(y));
    K.bprime = G.bprime(K.vertices, K.vertices);
    K.k0 = Presentation(K.vertices.size(), K.bprime);
    K.k1 = kernel(K.bprime);
    return K;
}

GradedModule fk_module(const BlockGraph& G) {
    auto cat = builtin_category(G.space_name);
    if (!cat->space) throw HypothesisError("category of '" + G.space_name + "' has no underlying space");
    GradedModule M;
    M.cat = cat;
    M.variance = Variance::left;
    std::vector<SubquotientK> K;
    for (Mask y : cat->masks) {
        K.push_back(k_groups(G, y));
        GradedGroup g;
        g.even = K.back().k0;
        g.odd = Presentation(K.back().k1_rank());
        M.entries.push_back(g);
    }
    for (const auto& a : cat->pres.quiver.arrows) {
        const auto& s = K[a.src];
        const auto& t = K[a.dst];
        GradedHom h;
        h.degree = a.parity;
        switch (a.kind) {
        case ArrowKind::incl: {
            IntMatrix E = inclusion(s.vertices, t.vertices);
            h.part[0] = E;
            h.part[1] = restrict_k1(t, E * s.k1);
            break;
        }
        case ArrowKind::restr: {
            IntMatrix P = inclusion(t.vertices, s.vertices).transpose();
            h.part[0] = P;
            h.part[1] = restrict_k1(t, P * s.k1);
            break;
        }
        case ArrowKind::bdry: {
            // K1(W) -> K0(U) through the coupling block; K0(W) -> K1(U) vanishes
            h.part[0] = IntMatrix(t.k1_rank(), s.vertices.size());
            h.part[1] = G.bprime(t.vertices, s.vertices) * s.k1;
            break;
        }
        }
        M.actions.push_back(std::move(h));
    }
    return M;
}

namespace {

struct Term {
    std::string obj;
    int shift = 0;
};
struct Entry {
    std::size_t row, col;  // target, source
    std::string arrow;
    int sign;
};

// graded complex of module values built from arrow actions, in parity q
struct PieceComplex {
    IntMatrix f, g;
    Presentation A, B, C;
};

Presentation term_group(const GradedModule& M, const std::vector<Term>& ts, int q, std::vector<std::size_t>& offs) {
    const auto& cat = *M.cat;
    Presentation P;
    offs.clear();
    for (const auto& t : ts) {
        offs.push_back(P.gens);
        P = direct_sum(P, M.entries[cat.object(t.obj)].part(q ^ t.shift));
    }
    return P;
}

IntMatrix assemble(const GradedModule& M, const std::vector<Term>& src, const std::vector<Term>& tgt,
                   const std::vector<Entry>& es, int q) {
    const auto& cat = *M.cat;
    std::vector<std::size_t> so, to;
    auto S = term_group(M, src, q, so);
    auto T = term_group(M, tgt, q, to);
    IntMatrix out(T.gens, S.gens);
    for (const auto& e : es) {
        int ai = cat.pres.quiver.arrow(e.arrow);
        const auto& a = cat.pres.quiver.arrows[ai];
        int sq = q ^ src[e.col].shift;
        if ((src[e.col].shift ^ a.parity) != tgt[e.row].shift)
            throw ComputationError("parity mismatch on " + e.arrow);
        out.add_block(to[e.row], so[e.col], M.actions[ai].part[sq].scaled(e.sign));
    }
    return out;
}

PieceComplex piece_complex(const GradedModule& M, const std::vector<Term>& c2, const std::vector<Term>& c1,
                           const std::vector<Term>& c0, const std::vector<Entry>& f, const std::vector<Entry>& g,
                           int q) {
    PieceComplex P;
    std::vector<std::size_t> offs;
    P.A = term_group(M, c2, q, offs);
    P.B = term_group(M, c1, q, offs);
    P.C = term_group(M, c0, q, offs);
    P.f = assemble(M, c2, c1, f, q);
    P.g = assemble(M, c1, c0, g, q);
    if (!is_zero_map(P.g * P.f, P.C)) throw ComputationError("shortcut complex does not square to zero");
    return P;
}

std::vector<std::vector<Int>> columns(const IntMatrix& m) {
    std::vector<std::vector<Int>> out;
    for (std::size_t j = 0; j < m.cols(); ++j) out.push_back(m.col(j));
    return out;
}

FastPath z3_fast(const BlockGraph& G, const GradedModule& M) {
    std::vector<Term> c2{{"14", 0}, {"24", 0}, {"34", 0}}, c1{{"124", 0}, {"134", 0}, {"234", 0}}, c0{{"1234", 0}};
    std::vector<Entry> f{{0, 0, "i_14_124", 1},  {0, 1, "i_24_124", -1}, {1, 0, "i_14_134", -1},
                         {1, 2, "i_34_134", 1},  {2, 1, "i_24_234", 1},  {2, 2, "i_34_234", -1}};
    std::vector<Entry> g{{0, 0, "i_124_1234", 1}, {0, 1, "i_134_1234", 1}, {0, 2, "i_234_1234", 1}};
    FastPath out;
    out.kind = "Z3";
    for (int q = 0; q < 2; ++q) {
        auto P = piece_complex(M, c2, c1, c0, f, g, q);
        out.tor1[q] = subquotient_homology(P.f, P.B, P.g, P.C).group;
        if (q == 1) out.complex_groups = {normal_form(P.A), normal_form(P.B), normal_form(P.C)};
    }
    // the same odd part on vertex coordinates: (ker f meet im phi0) / phi0(ker f)
    const auto& X = G.space;
    std::vector<Mask> two, three;
    for (const char* s : {"14", "24", "34"}) two.push_back(X.parse(s));
    for (const char* s : {"124", "134", "234"}) three.push_back(X.parse(s));
    std::vector<std::size_t> o2, o3;
    std::size_t n2 = 0, n3 = 0;
    for (Mask m : two) o2.push_back(std::exchange(n2, n2 + G.vertices(m).size()));
    for (Mask m : three) o3.push_back(std::exchange(n3, n3 + G.vertices(m).size()));
    IntMatrix phi0(n2, n2), F(n3, n2);
    for (std::size_t j = 0; j < 3; ++j) {
        auto v = G.vertices(two[j]);
        phi0.set_block(o2[j], o2[j], G.bprime(v, v));
    }
    for (const auto& e : f) {
        auto v = G.vertices(two[e.col]);
        F.add_block(o3[e.row], o2[e.col], inclusion(v, G.vertices(three[e.row])).scaled(e.sign));
    }
    IntMatrix kf = kernel(F);
    IntMatrix joint = kernel(IntMatrix::hcat(kf, -phi0));
    IntMatrix lat = lattice_basis(kf * joint.block(0, 0, kf.cols(), joint.cols()));
    IntMatrix sub = lattice_basis(phi0 * kf);
    out.witness_lattice = columns(lat);
    out.witness_sublattice = columns(sub);
    return out;
}

FastPath s_fast(const GradedModule& M) {
    std::vector<Term> c2{{"12", 1}, {"4", 0}, {"13", 1}}, c1{{"34", 0}, {"1", 1}, {"24", 0}}, c0{{"234", 0}};
    std::vector<Entry> f{{0, 0, "d_12_34", 1}, {1, 0, "r_12_1", -1}, {0, 1, "i_4_34", -1},
                         {2, 1, "i_4_24", 1},  {1, 2, "r_13_1", 1},  {2, 2, "d_13_24", -1}};
    std::vector<Entry> g{{0, 0, "i_34_234", 1}, {0, 1, "d_1_234", 1}, {0, 2, "i_24_234", 1}};
    FastPath out;
    out.kind = "S";
    for (int q = 0; q < 2; ++q) {
        auto P = piece_complex(M, c2, c1, c0, f, g, q);
        auto H = subquotient_homology(P.f, P.B, P.g, P.C);
        out.tor1[q] = H.group;
        if (q == 0) {
            out.complex_groups = {normal_form(P.A), normal_form(P.B), normal_form(P.C)};
            if (P.B.gens == 5 && H.group.rank + H.group.torsion.size() == 1) {
                auto c = H.class_of({0, 1, 1, 0, 1});
                bool gen = false;
                if (c && c->size() == 1) {
                    Int d = H.group.rank ? Int(0) : H.group.torsion[0], x = (*c)[0], gg;
                    mpz_gcd(gg.get_mpz_t(), x.get_mpz_t(), d.get_mpz_t());
                    gen = gg == 1;
                }
                out.witness_generates = gen;
            }
        }
    }
    return out;
}

}

std::optional<FastPath> fast_path(const BlockGraph& G) {
    if (G.space_name != "Z3" && G.space_name != "S") return std::nullopt;
    auto M = fk_module(G);
    if (G.space_name == "Z3") return z3_fast(G, M);
    return s_fast(M);
}

CkTor tor_ck(const BlockGraph& G, int max_degree, TorOptions opt) {
    auto M = fk_module(G);
    std::vector<int> ds(std::size_t(max_degree + 1));
    std::iota(ds.begin(), ds.end(), 0);
    CkTor out;
    out.tor = tor(M, ds, opt);
    if (G.space_name == "Z3") out.fast = z3_fast(G, M);
    else if (G.space_name == "S") out.fast = s_fast(M);
    return out;
}

}
