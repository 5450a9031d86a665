#include "fkt/ntmod.hpp"

#include <omp.h>

#include <algorithm>
#include <exception>
#include <mutex>

namespace fkt {

namespace {

IntMatrix ident(std::size_t n) { return IntMatrix::identity(n); }

GradedHom identity_hom(const GradedGroup& g) {
    GradedHom h;
    h.degree = 0;
    h.part[0] = ident(g.even.gens);
    h.part[1] = ident(g.odd.gens);
    return h;
}

void add_into(GradedHom& acc, const GradedHom& h, const Int& c) {
    for (int q = 0; q < 2; ++q) acc.part[q] += h.part[q].scaled(c);
}

bool all_zero(const Coeffs& c) {
    return std::all_of(c.begin(), c.end(), [](const Int& x) { return x == 0; });
}

// positions of hom(y, z) split by degree after a parity shift
struct DegreeIndex {
    std::array<std::vector<int>, 2> pos;  // degree -> positions
    std::vector<int> index;               // position -> index inside its degree
    std::vector<int> degree;
};

DegreeIndex degree_index(const HomTable& T, int y, int z, int shift) {
    DegreeIndex d;
    const auto& ids = T.hom(y, z);
    d.index.resize(ids.size());
    d.degree.resize(ids.size());
    for (std::size_t i = 0; i < ids.size(); ++i) {
        int q = T.elem(ids[i]).parity ^ shift;
        d.degree[i] = q;
        d.index[i] = int(d.pos[q].size());
        d.pos[q].push_back(int(i));
    }
    return d;
}

const GradedGroup& src_of(const GradedModule& M, const Arrow& a) {
    return M.variance == Variance::left ? M.entries[a.src] : M.entries[a.dst];
}
const GradedGroup& dst_of(const GradedModule& M, const Arrow& a) {
    return M.variance == Variance::left ? M.entries[a.dst] : M.entries[a.src];
}

GradedHom path_action(const GradedModule& M, int y, const Path& p) {
    const auto& A = M.cat->pres.quiver.arrows;
    if (M.variance == Variance::left) {
        GradedHom h = identity_hom(M.entries[y]);
        for (int a : p) h = compose(h, M.actions[a]);
        return h;
    }
    int z = p.empty() ? y : A[p.back()].dst;
    GradedHom h = identity_hom(M.entries[z]);
    for (auto it = p.rbegin(); it != p.rend(); ++it) h = compose(h, M.actions[*it]);
    return h;
}

Coeffs arrow_coeffs(const HomTable& T, const Arrow& a, int idx) { return T.eval_path(a.src, Path{idx}); }

int coeff_parity(const HomTable& T, int y, int z, const Coeffs& c) {
    int par = -1;
    const auto& ids = T.hom(y, z);
    for (std::size_t i = 0; i < c.size(); ++i) {
        if (c[i] == 0) continue;
        int p = T.elem(ids[i]).parity;
        if (par >= 0 && p != par) throw ComputationError("transformation mixes parities");
        par = p;
    }
    return par;
}

}

ModuleEval::ModuleEval(const GradedModule& M) : M_(&M) {
    const HomTable& T = M.cat->table;
    basis_.reserve(T.num_elems());
    for (std::size_t id = 0; id < T.num_elems(); ++id) {
        const auto& e = T.elem(int(id));
        basis_.push_back(path_action(M, e.src, e.word));
    }
}

GradedHom ModuleEval::apply(int y, int z, const Coeffs& c) const {
    const HomTable& T = M_->cat->table;
    const auto& ids = T.hom(y, z);
    int deg = std::max(0, coeff_parity(T, y, z, c));
    const GradedGroup& s = M_->variance == Variance::left ? M_->entries[y] : M_->entries[z];
    const GradedGroup& d = M_->variance == Variance::left ? M_->entries[z] : M_->entries[y];
    GradedHom h = zero_hom(s, d, deg);
    for (std::size_t i = 0; i < c.size() && i < ids.size(); ++i)
        if (c[i] != 0) add_into(h, basis_[ids[i]], c[i]);
    return h;
}

GradedHom ModuleEval::apply(int y, const PathSum& s) const {
    const HomTable& T = M_->cat->table;
    if (s.empty()) throw ComputationError("cannot infer the target of an empty sum");
    const auto& p = s.begin()->first;
    int z = p.empty() ? y : M_->cat->pres.quiver.arrows[p.back()].dst;
    return apply(y, z, T.eval(y, s));
}

ValidationReport validate(const GradedModule& M) {
    ValidationReport r;
    const auto& Q = M.cat->pres.quiver;
    if (M.entries.size() != Q.objects.size()) {
        r.ok = false;
        r.problems.push_back("module has " + std::to_string(M.entries.size()) + " entries, category has " +
                             std::to_string(Q.objects.size()) + " objects");
        return r;
    }
    if (M.actions.size() != Q.arrows.size()) {
        r.ok = false;
        r.problems.push_back("module has " + std::to_string(M.actions.size()) + " actions, category has " +
                             std::to_string(Q.arrows.size()) + " generators");
        return r;
    }
    bool shapes = true;
    for (std::size_t a = 0; a < Q.arrows.size(); ++a) {
        const auto& ar = Q.arrows[a];
        const auto& h = M.actions[a];
        const auto& s = src_of(M, ar);
        const auto& d = dst_of(M, ar);
        if (h.degree != ar.parity) {
            r.problems.push_back("action of " + ar.name + " has the wrong degree");
            shapes = false;
            continue;
        }
        bool dims = true;
        for (int q = 0; q < 2; ++q)
            if (h.part[q].rows() != d.part(q ^ h.degree).gens || h.part[q].cols() != s.part(q).gens) dims = false;
        if (!dims) {
            r.problems.push_back("action of " + ar.name + " has the wrong shape");
            shapes = false;
            continue;
        }
        if (!well_defined(h, s, d)) r.problems.push_back("action of " + ar.name + " does not respect relations");
    }
    if (shapes) {
        const auto& rels = M.cat->pres.relations;
        for (std::size_t k = 0; k < rels.size(); ++k) {
            const auto& terms = rels[k].terms;
            if (terms.empty()) continue;
            const Path& p0 = terms.begin()->first;
            int y = Q.arrows[p0.front()].src, z = Q.arrows[p0.back()].dst;
            const auto& s = M.variance == Variance::left ? M.entries[y] : M.entries[z];
            const auto& d = M.variance == Variance::left ? M.entries[z] : M.entries[y];
            int deg = 0;
            for (int a : p0) deg ^= Q.arrows[a].parity;
            GradedHom acc = zero_hom(s, d, deg);
            for (const auto& [p, c] : terms) add_into(acc, path_action(M, y, p), c);
            if (!is_zero_map(acc, d)) {
                std::string w;
                for (const auto& [p, c] : terms) {
                    w += (c < 0 ? " - " : (w.empty() ? "" : " + "));
                    Int ac = abs(c);
                    if (ac != 1) w += ac.get_str() + "*";
                    for (std::size_t i = 0; i < p.size(); ++i) w += (i ? "." : "") + Q.arrows[p[i]].name;
                }
                r.problems.push_back("relation " + std::to_string(k) + " (" + w + ") acts nontrivially from " +
                                     Q.objects[y]);
            }
        }
    }
    r.ok = r.problems.empty();
    return r;
}

namespace {

// block graded map between direct sums
GradedHom assemble(const std::vector<GradedGroup>& rows, const std::vector<GradedGroup>& cols, int degree,
                   const std::vector<std::vector<std::optional<GradedHom>>>& blocks) {
    GradedHom h;
    h.degree = degree;
    for (int q = 0; q < 2; ++q) {
        std::size_t nr = 0, nc = 0;
        for (const auto& g : rows) nr += g.part(q ^ degree).gens;
        for (const auto& g : cols) nc += g.part(q).gens;
        IntMatrix m(nr, nc);
        std::size_t r0 = 0;
        for (std::size_t i = 0; i < rows.size(); ++i) {
            std::size_t c0 = 0;
            for (std::size_t j = 0; j < cols.size(); ++j) {
                if (blocks[i][j]) m.set_block(r0, c0, blocks[i][j]->part[q]);
                c0 += cols[j].part(q).gens;
            }
            r0 += rows[i].part(q ^ degree).gens;
        }
        h.part[q] = m;
    }
    return h;
}

bool exact_at(const IntMatrix& f, const Presentation& B, const IntMatrix& g, const Presentation& C) {
    try {
        return subquotient_homology(f, B, g, C).group.trivial();
    } catch (const ComputationError&) {
        return false;
    }
}

}

ExactReport check_exact(const GradedModule& M) {
    const Category& cat = *M.cat;
    if (!cat.composites || !cat.space) throw HypothesisError("category has no canonical composites; exactness undefined");
    const auto& X = *cat.space;
    const auto& C = *cat.composites;
    const HomTable& T = cat.table;
    ModuleEval E(M);
    ExactReport rep;
    auto kmap = [&](Mask a, Mask d, Mask e) {
        auto k = C.kappa(a, d, e);
        if (!k) throw ComputationError("missing canonical map " + X.label(a) + " -> " + X.label(d));
        return E.apply(cat.object(a), cat.object(d), T.eval(cat.object(a), *k));
    };
    for (auto [Y, U] : C.extensions()) {
        Mask W = Y & ~U;
        auto us = X.components(U), ws = X.components(W);
        std::vector<GradedGroup> gu, gw;
        for (Mask u : us) gu.push_back(M.entries[cat.object(u)]);
        for (Mask w : ws) gw.push_back(M.entries[cat.object(w)]);
        std::vector<GradedGroup> gy{M.entries[cat.object(Y)]};
        bool left = M.variance == Variance::left;
        // i: U -> Y, r: Y -> W, d: W -> U (as transformations)
        std::vector<std::vector<std::optional<GradedHom>>> bi, br, bd;
        if (left) {
            bi.assign(1, std::vector<std::optional<GradedHom>>(us.size()));
            for (std::size_t a = 0; a < us.size(); ++a) bi[0][a] = kmap(us[a], Y, us[a]);
            br.assign(ws.size(), std::vector<std::optional<GradedHom>>(1));
            for (std::size_t c = 0; c < ws.size(); ++c) br[c][0] = kmap(Y, ws[c], ws[c]);
            bd.assign(us.size(), std::vector<std::optional<GradedHom>>(ws.size()));
        } else {
            bi.assign(us.size(), std::vector<std::optional<GradedHom>>(1));
            for (std::size_t a = 0; a < us.size(); ++a) bi[a][0] = kmap(us[a], Y, us[a]);
            br.assign(1, std::vector<std::optional<GradedHom>>(ws.size()));
            for (std::size_t c = 0; c < ws.size(); ++c) br[0][c] = kmap(Y, ws[c], ws[c]);
            bd.assign(ws.size(), std::vector<std::optional<GradedHom>>(us.size()));
        }
        for (std::size_t a = 0; a < us.size(); ++a)
            for (std::size_t c = 0; c < ws.size(); ++c) {
                auto d = C.delta(us[a], ws[c]);
                if (!d) throw ComputationError("missing connecting map");
                if (d->empty()) continue;
                GradedHom h = E.apply(cat.object(ws[c]), cat.object(us[a]), T.eval(cat.object(ws[c]), *d));
                if (left)
                    bd[a][c] = h;
                else
                    bd[c][a] = h;
            }
        // cyclic sequence G0 -m0-> G1 -m1-> G2 -m2-> G0[1]
        std::vector<GradedGroup> G0, G1, G2;
        GradedHom m0, m1, m2;
        if (left) {
            G0 = gu, G1 = gy, G2 = gw;
            m0 = assemble(gy, gu, 0, bi);
            m1 = assemble(gw, gy, 0, br);
            m2 = assemble(gu, gw, 1, bd);
        } else {
            G0 = gw, G1 = gy, G2 = gu;
            m0 = assemble(gy, gw, 0, br);
            m1 = assemble(gu, gy, 0, bi);
            m2 = assemble(gw, gu, 1, bd);
        }
        GradedGroup S0 = direct_sum(G0), S1 = direct_sum(G1), S2 = direct_sum(G2);
        ++rep.checked;
        const char* nm[3] = {left ? "U" : "Y\\U", "Y", left ? "Y\\U" : "U"};
        for (int q = 0; q < 2 && rep.exact; ++q) {
            std::string where = "Y=" + X.label(Y) + " U=" + X.label(U) + ": ";
            if (!exact_at(m0.part[q], S1.part(q), m1.part[q], S2.part(q)))
                rep.first_failure = where + "not exact at " + nm[1] + " degree " + std::to_string(q);
            else if (!exact_at(m1.part[q], S2.part(q), m2.part[q], S0.part(q ^ 1)))
                rep.first_failure = where + "not exact at " + nm[2] + " degree " + std::to_string(q);
            else if (!exact_at(m2.part[q], S0.part(q ^ 1), m0.part[q ^ 1], S1.part(q ^ 1)))
                rep.first_failure = where + "not exact at " + nm[0] + " degree " + std::to_string(q ^ 1);
            if (rep.first_failure) rep.exact = false;
        }
        if (!rep.exact) break;
    }
    return rep;
}

std::vector<std::array<AbGroupNF, 2>> m_ss(const GradedModule& M) {
    const auto& Q = M.cat->pres.quiver;
    std::vector<std::array<AbGroupNF, 2>> out;
    for (std::size_t y = 0; y < Q.objects.size(); ++y) {
        std::array<AbGroupNF, 2> g;
        for (int q = 0; q < 2; ++q) {
            const Presentation& P = M.entries[y].part(q);
            IntMatrix rels = P.rels;
            for (std::size_t a = 0; a < Q.arrows.size(); ++a) {
                const auto& ar = Q.arrows[a];
                int lands = M.variance == Variance::left ? ar.dst : ar.src;
                if (lands != int(y)) continue;
                rels = IntMatrix::hcat(rels, M.actions[a].part[q ^ M.actions[a].degree]);
            }
            g[q] = normal_form(Presentation(P.gens, rels));
        }
        out.push_back(g);
    }
    return out;
}

GradedModule free_module(std::shared_ptr<const Category> cat, int y, Variance side, int shift) {
    const HomTable& T = cat->table;
    const auto& Q = cat->pres.quiver;
    std::size_t n = Q.objects.size();
    GradedModule M;
    M.cat = cat;
    M.variance = side;
    std::vector<DegreeIndex> di;
    for (std::size_t z = 0; z < n; ++z) {
        DegreeIndex d = side == Variance::left ? degree_index(T, y, int(z), shift) : degree_index(T, int(z), y, shift);
        M.entries.push_back(GradedGroup{Presentation(d.pos[0].size()), Presentation(d.pos[1].size())});
        di.push_back(std::move(d));
    }
    for (std::size_t a = 0; a < Q.arrows.size(); ++a) {
        const auto& ar = Q.arrows[a];
        GradedHom h = zero_hom(src_of(M, ar), dst_of(M, ar), ar.parity);
        if (side == Variance::left) {
            const auto& ids = T.hom(y, ar.src);
            for (std::size_t i = 0; i < ids.size(); ++i) {
                int q = di[ar.src].degree[i];
                for (const auto& [j, v] : T.after_arrow(ids[i], int(a)))
                    h.part[q](di[ar.dst].index[j], di[ar.src].index[i]) += v;
            }
        } else {
            Coeffs x = arrow_coeffs(T, ar, int(a));
            const auto& ids = T.hom(ar.dst, y);
            for (std::size_t i = 0; i < ids.size(); ++i) {
                int q = di[ar.dst].degree[i];
                Coeffs img = T.compose(ar.src, ar.dst, y, x, T.unit(ids[i]));
                for (std::size_t j = 0; j < img.size(); ++j)
                    if (img[j] != 0) h.part[q](di[ar.src].index[j], di[ar.dst].index[i]) += img[j];
            }
        }
        M.actions.push_back(h);
    }
    return M;
}

GradedModule shifted(const GradedModule& M) {
    GradedModule S = M;
    for (auto& e : S.entries) e = shift(e);
    for (auto& h : S.actions) std::swap(h.part[0], h.part[1]);
    return S;
}

GradedModule direct_sum(const GradedModule& a, const GradedModule& b) {
    if (a.cat != b.cat || a.variance != b.variance) throw ComputationError("direct sum of modules over different categories");
    GradedModule s = a;
    for (std::size_t y = 0; y < s.entries.size(); ++y)
        for (int q = 0; q < 2; ++q) s.entries[y].part(q) = direct_sum(a.entries[y].part(q), b.entries[y].part(q));
    for (std::size_t k = 0; k < s.actions.size(); ++k)
        for (int q = 0; q < 2; ++q) s.actions[k].part[q] = IntMatrix::diag_sum(a.actions[k].part[q], b.actions[k].part[q]);
    return s;
}

GradedModule negate_odd(const GradedModule& M) {
    GradedModule N = M;
    for (auto& h : N.actions)
        if (h.degree == 1)
            for (auto& p : h.part) p = -p;
    return N;
}

GradedModule coker_module(std::shared_ptr<const Category> cat, const FreeMap& f) {
    const HomTable& T = cat->table;
    const auto& Q = cat->pres.quiver;
    std::size_t n = Q.objects.size();
    if (f.entry.size() != f.target.size()) throw ParseError("presentation matrix: wrong number of rows");
    for (std::size_t i = 0; i < f.target.size(); ++i) {
        if (f.entry[i].size() != f.source.size()) throw ParseError("presentation matrix: wrong number of columns");
        for (std::size_t j = 0; j < f.source.size(); ++j) {
            const Coeffs& c = f.entry[i][j];
            if (c.empty()) continue;
            if (c.size() != T.rank(f.target[i].obj, f.source[j].obj))
                throw ParseError("presentation matrix: entry (" + std::to_string(i) + "," + std::to_string(j) +
                                 ") has the wrong length");
            int p = coeff_parity(T, f.target[i].obj, f.source[j].obj, c);
            if (p >= 0 && (p ^ f.target[i].shift) != f.source[j].shift)
                throw ParseError("presentation matrix: entry (" + std::to_string(i) + "," + std::to_string(j) +
                                 ") does not preserve degree");
        }
    }
    GradedModule M;
    M.cat = cat;
    M.variance = Variance::left;
    // target generators at (z, q): (summand i, position)
    std::vector<std::array<std::vector<std::pair<std::size_t, int>>, 2>> gens(n);
    std::vector<std::vector<std::map<int, int>>> where(n, std::vector<std::map<int, int>>(f.target.size()));
    for (std::size_t z = 0; z < n; ++z)
        for (std::size_t i = 0; i < f.target.size(); ++i) {
            const auto& ids = T.hom(f.target[i].obj, int(z));
            for (std::size_t p = 0; p < ids.size(); ++p) {
                int q = T.elem(ids[p]).parity ^ f.target[i].shift;
                where[z][i][int(p)] = int(gens[z][q].size());
                gens[z][q].emplace_back(i, int(p));
            }
        }
    for (std::size_t z = 0; z < n; ++z) {
        GradedGroup g;
        for (int q = 0; q < 2; ++q) {
            std::vector<std::vector<Int>> cols;
            for (std::size_t j = 0; j < f.source.size(); ++j) {
                const auto& ids = T.hom(f.source[j].obj, int(z));
                for (std::size_t p = 0; p < ids.size(); ++p) {
                    if ((T.elem(ids[p]).parity ^ f.source[j].shift) != q) continue;
                    std::vector<Int> col(gens[z][q].size());
                    for (std::size_t i = 0; i < f.target.size(); ++i) {
                        const Coeffs& phi = f.entry[i][j];
                        if (phi.empty() || all_zero(phi)) continue;
                        Coeffs img = T.compose(f.target[i].obj, f.source[j].obj, int(z), phi, T.unit(ids[p]));
                        for (std::size_t k = 0; k < img.size(); ++k)
                            if (img[k] != 0) col[where[z][i].at(int(k))] += img[k];
                    }
                    cols.push_back(col);
                }
            }
            IntMatrix R(gens[z][q].size(), cols.size());
            for (std::size_t c = 0; c < cols.size(); ++c)
                for (std::size_t r = 0; r < cols[c].size(); ++r) R(r, c) = cols[c][r];
            g.part(q) = Presentation(gens[z][q].size(), R);
        }
        M.entries.push_back(g);
    }
    for (std::size_t a = 0; a < Q.arrows.size(); ++a) {
        const auto& ar = Q.arrows[a];
        GradedHom h = zero_hom(M.entries[ar.src], M.entries[ar.dst], ar.parity);
        for (int q = 0; q < 2; ++q)
            for (std::size_t g = 0; g < gens[ar.src][q].size(); ++g) {
                auto [i, p] = gens[ar.src][q][g];
                int id = T.hom(f.target[i].obj, ar.src)[p];
                for (const auto& [k, v] : T.after_arrow(id, int(a))) h.part[q](where[ar.dst][i].at(k), g) += v;
            }
        M.actions.push_back(h);
    }
    return M;
}

GradedModule tensor_mod_k(const GradedModule& M, const Int& k) {
    if (k < 2) throw ComputationError("tensor_mod_k needs k >= 2");
    GradedModule N = M;
    for (auto& e : N.entries)
        for (int q = 0; q < 2; ++q) {
            auto& P = e.part(q);
            P = Presentation(P.gens, IntMatrix::hcat(P.rels, IntMatrix::identity(P.gens).scaled(k)));
        }
    return N;
}

bool FreeResolution::extend_to(int n) {
    if (depth() >= n || finite) return true;
    if (!period || !period_start) return false;
    int p = *period;
    while (depth() < n) {
        int m = depth() + 1;
        if (m - p < *period_start + 1) return false;
        std::vector<Summand> lev = levels[m - p];
        for (auto& s : lev) s.shift ^= 1;
        if (int(levels.size()) <= m) levels.push_back(lev);
        FreeMap d = diffs[m - p - 1];
        d.source = levels[m];
        d.target = levels[m - 1];
        diffs.push_back(d);
    }
    return true;
}

std::array<Homology, 2> tensor_homology(const ModuleEval& E, const FreeResolution& R, int n) {
    const GradedModule& M = E.module();
    if (M.variance != Variance::left) throw ComputationError("tensor product needs a left module");
    if (n + 1 > R.depth() && !R.finite)
        throw ComputationError("resolution too short for degree " + std::to_string(n));
    auto level = [&](int k) -> std::vector<Summand> {
        return k >= 0 && k < int(R.levels.size()) ? R.levels[k] : std::vector<Summand>{};
    };
    auto groups = [&](const std::vector<Summand>& lev) {
        std::vector<GradedGroup> g;
        for (const auto& s : lev) g.push_back(s.shift ? shift(M.entries[s.obj]) : M.entries[s.obj]);
        return g;
    };
    // tensored d_k as a degree-0 map of shifted groups
    auto tensored = [&](int k) {
        auto src = level(k), tgt = level(k - 1);
        auto gs = groups(src), gt = groups(tgt);
        std::vector<std::vector<std::optional<GradedHom>>> blocks(tgt.size(),
                                                                  std::vector<std::optional<GradedHom>>(src.size()));
        if (k >= 1 && k <= R.depth()) {
            const FreeMap& d = R.diffs[k - 1];
            for (std::size_t b = 0; b < tgt.size(); ++b)
                for (std::size_t a = 0; a < src.size(); ++a) {
                    const Coeffs& phi = d.entry[b][a];
                    if (phi.empty() || all_zero(phi)) continue;
                    GradedHom h = E.apply(src[a].obj, tgt[b].obj, phi);
                    // re-index the parts for the shifts of source and target
                    GradedHom s;
                    s.degree = 0;
                    for (int q = 0; q < 2; ++q) s.part[q] = h.part[q ^ src[a].shift];
                    blocks[b][a] = s;
                }
        }
        return assemble(gt, gs, 0, blocks);
    };
    GradedHom f = tensored(n + 1), g = tensored(n);
    GradedGroup mid = direct_sum(groups(level(n)));
    GradedGroup low = direct_sum(groups(level(n - 1 >= 0 ? n - 1 : 0)));
    if (n == 0) low = GradedGroup{Presentation(0), Presentation(0)};
    if (n == 0)
        for (int q = 0; q < 2; ++q) g.part[q] = IntMatrix(0, mid.part(q).gens);
    return {subquotient_homology(f.part[0], mid.part(0), g.part[0], low.part(0)),
            subquotient_homology(f.part[1], mid.part(1), g.part[1], low.part(1))};
}

ResolutionCheck check_resolution(const Category& cat, const FreeResolution& R) {
    ResolutionCheck rc;
    const HomTable& T = cat.table;
    for (int n = 1; n <= R.depth(); ++n) {
        const FreeMap& d = R.diffs[n - 1];
        for (std::size_t b = 0; b < d.target.size(); ++b)
            for (std::size_t a = 0; a < d.source.size(); ++a) {
                const Coeffs& phi = d.entry[b][a];
                if (phi.empty()) continue;
                int p = coeff_parity(T, d.source[a].obj, d.target[b].obj, phi);
                if (p >= 0 && (p ^ d.target[b].shift) != d.source[a].shift) {
                    rc.squares_zero = rc.exact = false;
                    rc.detail = "d_" + std::to_string(n) + " does not preserve degree";
                    return rc;
                }
            }
    }
    for (int n = 1; n < R.depth(); ++n) {
        const FreeMap& lo = R.diffs[n - 1];
        const FreeMap& hi = R.diffs[n];
        for (std::size_t i = 0; i < lo.target.size(); ++i)
            for (std::size_t k = 0; k < hi.source.size(); ++k) {
                int zi = lo.target[i].obj, zk = hi.source[k].obj;
                Coeffs acc(T.rank(zk, zi));
                for (std::size_t j = 0; j < lo.source.size(); ++j) {
                    const Coeffs& x = hi.entry[j][k];
                    const Coeffs& y = lo.entry[i][j];
                    if (x.empty() || y.empty()) continue;
                    Coeffs c = T.compose(zk, lo.source[j].obj, zi, x, y);
                    for (std::size_t t = 0; t < c.size(); ++t) acc[t] += c[t];
                }
                if (!all_zero(acc)) {
                    rc.squares_zero = false;
                    rc.detail = "d_" + std::to_string(n) + " after d_" + std::to_string(n + 1) + " is nonzero";
                    rc.exact = false;
                    return rc;
                }
            }
    }
    // exactness: evaluate at every object via the free left modules
    auto self = std::shared_ptr<const Category>(std::shared_ptr<const Category>{}, &cat);
    for (std::size_t w = 0; w < cat.size(); ++w) {
        GradedModule P = free_module(self, int(w), Variance::left);
        ModuleEval E(P);
        for (int n = 0; n < R.depth(); ++n) {
            auto h = tensor_homology(E, R, n);
            bool ok;
            if (n == 0) {
                AbGroupNF want = int(w) == R.target ? AbGroupNF{1, {}} : AbGroupNF{};
                ok = h[0].group == want && h[1].group.trivial();
            } else {
                ok = h[0].group.trivial() && h[1].group.trivial();
            }
            if (!ok) {
                rc.exact = false;
                rc.detail = "homology at level " + std::to_string(n) + " evaluated at " + cat.label(int(w));
                return rc;
            }
        }
    }
    return rc;
}

FreeResolution resolve_simple(const Category& cat, int y, int depth) {
    if (depth < 1) throw ComputationError("resolve_simple: depth must be at least 1");
    const HomTable& T = cat.table;
    const auto& Q = cat.pres.quiver;
    int n = int(cat.size());
    FreeResolution R;
    R.target = y;
    R.levels.push_back({Summand{y, 0}});
    // coordinates of a level evaluated at w in degree q: (summand, position)
    auto coords = [&](const std::vector<Summand>& lev, int w, int q) {
        std::vector<std::pair<int, int>> c;
        for (std::size_t a = 0; a < lev.size(); ++a) {
            const auto& ids = T.hom(w, lev[a].obj);
            for (std::size_t p = 0; p < ids.size(); ++p)
                if ((T.elem(ids[p]).parity ^ lev[a].shift) == q) c.emplace_back(int(a), int(p));
        }
        return c;
    };
    auto lookup = [](const std::vector<std::pair<int, int>>& c) {
        std::map<std::pair<int, int>, std::size_t> m;
        for (std::size_t i = 0; i < c.size(); ++i) m[c[i]] = i;
        return m;
    };
    std::vector<Coeffs> arrow_el;
    for (std::size_t a = 0; a < Q.arrows.size(); ++a) arrow_el.push_back(arrow_coeffs(T, Q.arrows[a], int(a)));

    // kernel lattice of the previous differential (or of the augmentation)
    std::vector<std::array<IntMatrix, 2>> K(n);
    for (int w = 0; w < n; ++w)
        for (int q = 0; q < 2; ++q) {
            auto c = coords(R.levels[0], w, q);
            std::vector<std::size_t> keep;
            for (std::size_t i = 0; i < c.size(); ++i)
                if (!(w == y && q == 0 && T.hom(w, y)[c[i].second] == T.identity(y))) keep.push_back(i);
            K[w][q] = IntMatrix::identity(c.size()).select_cols(keep);
        }
    for (int lvl = 1; lvl <= depth; ++lvl) {
        const std::vector<Summand> prev = R.levels[lvl - 1];
        std::vector<Summand> next;
        std::vector<std::vector<Int>> cols;  // in coords(prev, w, q)
        std::vector<std::pair<int, int>> at;
        for (int w = 0; w < n; ++w)
            for (int q = 0; q < 2; ++q) {
                const IntMatrix& Kb = K[w][q];
                if (Kb.cols() == 0) continue;
                auto cw = coords(prev, w, q);
                auto lw = lookup(cw);
                std::vector<std::vector<Int>> dec;
                for (std::size_t x = 0; x < Q.arrows.size(); ++x) {
                    const auto& ar = Q.arrows[x];
                    if (ar.src != w) continue;
                    int q2 = q ^ ar.parity;
                    const IntMatrix& K2 = K[ar.dst][q2];
                    auto c2 = coords(prev, ar.dst, q2);
                    for (std::size_t j = 0; j < K2.cols(); ++j) {
                        std::vector<Int> v(cw.size());
                        for (std::size_t r = 0; r < c2.size(); ++r) {
                            if (K2(r, j) == 0) continue;
                            auto [a, p] = c2[r];
                            int za = prev[a].obj;
                            Coeffs img = T.compose(w, ar.dst, za, arrow_el[x], T.unit(T.hom(ar.dst, za)[p]));
                            for (std::size_t t = 0; t < img.size(); ++t)
                                if (img[t] != 0) v[lw.at({a, int(t)})] += K2(r, j) * img[t];
                        }
                        dec.push_back(v);
                    }
                }
                IntMatrix D(cw.size(), dec.size());
                for (std::size_t j = 0; j < dec.size(); ++j)
                    for (std::size_t r = 0; r < cw.size(); ++r) D(r, j) = dec[j][r];
                auto X = solve(Kb, D);
                if (!X) throw ComputationError("decomposable part is not inside the kernel");
                SmithForm sf = smith(*X);
                for (std::size_t i = 0; i < Kb.cols(); ++i) {
                    if (i < sf.rank && sf.S(i, i) == 1) continue;
                    cols.push_back(mat_vec(Kb, sf.Uinv.col(i)));
                    at.emplace_back(w, q);
                    next.push_back(Summand{w, q});
                }
            }
        if (next.empty()) {
            R.finite = true;
            break;
        }
        FreeMap d;
        d.source = next;
        d.target = prev;
        d.entry.assign(prev.size(), std::vector<Coeffs>(next.size()));
        for (std::size_t g = 0; g < next.size(); ++g) {
            auto [w, q] = at[g];
            auto cw = coords(prev, w, q);
            for (std::size_t b = 0; b < prev.size(); ++b) d.entry[b][g] = Coeffs(T.rank(w, prev[b].obj));
            for (std::size_t r = 0; r < cw.size(); ++r)
                if (cols[g][r] != 0) d.entry[cw[r].first][g][cw[r].second] = cols[g][r];
        }
        R.levels.push_back(next);
        R.diffs.push_back(d);
        if (lvl == depth) break;
        // kernel of the new differential at every object
        for (int w = 0; w < n; ++w)
            for (int q = 0; q < 2; ++q) {
                auto cs = coords(next, w, q), ct = coords(prev, w, q);
                auto lt = lookup(ct);
                IntMatrix A(ct.size(), cs.size());
                for (std::size_t j = 0; j < cs.size(); ++j) {
                    auto [a, p] = cs[j];
                    Coeffs psi = T.unit(T.hom(w, next[a].obj)[p]);
                    for (std::size_t b = 0; b < prev.size(); ++b) {
                        const Coeffs& phi = d.entry[b][a];
                        if (all_zero(phi)) continue;
                        Coeffs img = T.compose(w, next[a].obj, prev[b].obj, psi, phi);
                        for (std::size_t t = 0; t < img.size(); ++t)
                            if (img[t] != 0) A(lt.at({int(b), int(t)}), j) += img[t];
                    }
                }
                K[w][q] = kernel(A);
            }
    }
    return R;
}

namespace {

struct Catalog {
    const Category& c;
    Coeffs w(const std::vector<std::string>& names) const { return c.word(names); }
    // chain of inclusions adding the missing points in increasing order
    std::vector<std::string> incl(const std::string& from, const std::string& to) const {
        const auto& X = *c.space;
        Mask a = X.parse(from), b = X.parse(to);
        std::vector<std::string> out;
        while (a != b) {
            Mask bit = (b & ~a) & (~(b & ~a) + 1);
            out.push_back(arrow_name(ArrowKind::incl, X.label(a), X.label(a | bit)));
            a |= bit;
        }
        return out;
    }
    Coeffs chain(std::vector<std::vector<std::string>> parts) const {
        std::vector<std::string> all;
        for (auto& p : parts) all.insert(all.end(), p.begin(), p.end());
        return w(all);
    }
    int obj(const std::string& l) const { return c.object(l); }
};

Coeffs neg(Coeffs c) {
    for (auto& x : c) x = -x;
    return c;
}

FreeMap make_map(const std::vector<Summand>& src, const std::vector<Summand>& tgt) {
    FreeMap m;
    m.source = src;
    m.target = tgt;
    m.entry.assign(tgt.size(), std::vector<Coeffs>(src.size()));
    return m;
}

FreeResolution z3_resolution(const Category& cat, const std::string& lbl) {
    Catalog K{cat};
    auto S = [&](const std::string& l, int s = 0) { return Summand{K.obj(l), s}; };
    auto name = [&](ArrowKind k, const std::string& a, const std::string& b) {
        return std::vector<std::string>{arrow_name(k, a, b)};
    };
    const std::vector<std::string> js{"1", "2", "3"};
    FreeResolution R;
    R.target = K.obj(lbl);
    R.period = 3;
    R.period_start = 0;
    auto push = [&](std::vector<Summand> lev) { R.levels.push_back(lev); };
    auto diff = [&]() -> FreeMap& {
        std::size_t n = R.levels.size() - 1;
        R.diffs.push_back(make_map(R.levels[n], R.levels[n - 1]));
        return R.diffs.back();
    };
    Mask m = cat.space->parse(lbl);
    int sz = popcount(m);
    bool has4 = m & 8;
    if (lbl == "4") {
        push({S("4")});
        push({S("1", 1), S("2", 1), S("3", 1)});
        auto& d1 = diff();
        for (int j = 0; j < 3; ++j) d1.entry[0][j] = K.w(name(ArrowKind::bdry, js[j], "4"));
        push({S("1234", 1)});
        auto& d2 = diff();
        for (int j = 0; j < 3; ++j) d2.entry[j][0] = K.w(name(ArrowKind::restr, "1234", js[j]));
        push({S("4", 1)});
        auto& d3 = diff();
        d3.entry[0][0] = K.chain({K.incl("4", "1234")});
    } else if (sz == 1) {
        const std::string j = lbl;
        std::string rest;
        for (const auto& x : js)
            if (x != j) rest += x;
        std::string kl4 = rest + "4";
        std::string k4 = rest.substr(0, 1) + "4";
        push({S(j)});
        push({S("1234")});
        diff().entry[0][0] = K.w(name(ArrowKind::restr, "1234", j));
        push({S(kl4)});
        diff().entry[0][0] = K.chain({K.incl(kl4, "1234")});
        push({S(j, 1)});
        diff().entry[0][0] = K.chain({name(ArrowKind::bdry, j, "4"), K.incl("4", kl4)});
    } else if (sz == 2 && has4) {
        const std::string j = lbl.substr(0, 1);
        push({S(lbl)});
        push({S("4")});
        diff().entry[0][0] = K.chain({K.incl("4", lbl)});
        push({S(j, 1)});
        diff().entry[0][0] = K.w(name(ArrowKind::bdry, j, "4"));
        push({S(lbl, 1)});
        diff().entry[0][0] = K.chain({K.incl(lbl, "1234"), name(ArrowKind::restr, "1234", j)});
    } else if (sz == 3) {
        const std::string j = lbl.substr(0, 1), k = lbl.substr(1, 1);
        push({S(lbl)});
        push({S(j + "4"), S(k + "4")});
        auto& d1 = diff();
        d1.entry[0][0] = K.chain({K.incl(j + "4", lbl)});
        d1.entry[0][1] = K.chain({K.incl(k + "4", lbl)});
        push({S("4")});
        auto& d2 = diff();
        d2.entry[0][0] = K.chain({K.incl("4", j + "4")});
        d2.entry[1][0] = neg(K.chain({K.incl("4", k + "4")}));
        push({S(lbl, 1)});
        diff().entry[0][0] =
            K.chain({K.incl(lbl, "1234"), name(ArrowKind::restr, "1234", j), name(ArrowKind::bdry, j, "4")});
    } else if (lbl == "1234") {
        R.period_start = 1;
        const std::vector<std::string> l1{"124", "134", "234"}, l2{"14", "24", "34"};
        push({S("1234")});
        push({S("124"), S("134"), S("234")});
        auto& d1 = diff();
        for (int a = 0; a < 3; ++a) d1.entry[0][a] = K.chain({K.incl(l1[a], "1234")});
        push({S("14"), S("24"), S("34")});
        auto& d2 = diff();
        const int sign[3][3] = {{1, -1, 0}, {-1, 0, 1}, {0, 1, -1}};
        for (int r = 0; r < 3; ++r)
            for (int c = 0; c < 3; ++c) {
                if (!sign[r][c]) continue;
                Coeffs e = K.chain({K.incl(l2[c], l1[r])});
                d2.entry[r][c] = sign[r][c] > 0 ? e : neg(e);
            }
        push({S("4"), S("1234", 1)});
        auto& d3 = diff();
        for (int r = 0; r < 3; ++r) d3.entry[r][0] = K.chain({K.incl("4", l2[r])});
        d3.entry[0][1] =
            K.chain({name(ArrowKind::restr, "1234", "3"), name(ArrowKind::bdry, "3", "4"), K.incl("4", "14")});
        push({S("124", 1), S("134", 1), S("234", 1)});
        auto& d4 = diff();
        d4.entry[0][2] = K.chain({K.incl("234", "1234"), name(ArrowKind::restr, "1234", "2"),
                                  name(ArrowKind::bdry, "2", "4")});
        for (int a = 0; a < 3; ++a) d4.entry[1][a] = K.chain({K.incl(l1[a], "1234")});
    } else {
        throw ComputationError("no catalogued resolution for " + lbl);
    }
    return R;
}

}

bool has_builtin_resolution(const std::string& space, const std::string& object) {
    if (space == "Z3" || space == "C2") {
        auto cat = builtin_category(space);
        for (const auto& o : cat->pres.quiver.objects)
            if (o == object) return true;
        return false;
    }
    return space == "Z4" && object == "12345";
}

FreeResolution builtin_resolution(const std::string& space, const std::string& object) {
    if (!has_builtin_resolution(space, object))
        throw ComputationError("no catalogued resolution for S_" + object + " over " + space);
    auto cat = builtin_category(space);
    if (space == "Z3") return z3_resolution(*cat, object);
    // shapes only are known here; differentials come from the syzygy engine
    FreeResolution R = resolve_simple(*cat, cat->object(object), 6);
    R.reconstructed = true;
    return R;
}

std::shared_ptr<const FreeResolution> simple_resolution(const Category& cat, int y, int depth, Engine engine) {
    static std::mutex mu;
    static std::map<std::tuple<const Category*, int, int>, std::shared_ptr<const FreeResolution>> cache;
    bool catalogued = engine == Engine::builtin && is_builtin_space(cat.name) &&
                      has_builtin_resolution(cat.name, cat.label(y)) && builtin_category(cat.name).get() == &cat;
    std::lock_guard<std::mutex> lock(mu);
    auto& slot = cache[std::make_tuple(&cat, y, catalogued ? 0 : 1)];
    if (slot && (slot->depth() >= depth || slot->finite)) return slot;
    FreeResolution R;
    if (slot && slot->period) {
        R = *slot;
    } else if (catalogued && cat.name == "Z3") {
        R = z3_resolution(cat, cat.label(y));
    } else {
        R = resolve_simple(cat, y, std::max(depth, 6));
        R.reconstructed = catalogued;
    }
    R.extend_to(depth);
    slot = std::make_shared<const FreeResolution>(std::move(R));
    return slot;
}

namespace {

using PerDegree = std::map<int, std::array<AbGroupNF, 2>>;

PerDegree tor_at(const ModuleEval& E, const FreeResolution& R, const std::vector<int>& degrees) {
    PerDegree out;
    for (int n : degrees) {
        if (n > R.depth() && R.finite) {
            out[n] = {AbGroupNF{}, AbGroupNF{}};
            continue;
        }
        auto h = tensor_homology(E, R, n);
        out[n] = {h[0].group, h[1].group};
    }
    return out;
}

TorReport run_tor(const GradedModule& M, const std::vector<int>& degrees, Engine engine, bool parallel) {
    if (M.variance != Variance::left) throw ComputationError("Tor needs a left module");
    if (degrees.empty()) return {};
    const Category& cat = *M.cat;
    int top = *std::max_element(degrees.begin(), degrees.end());
    if (*std::min_element(degrees.begin(), degrees.end()) < 0) throw ComputationError("negative Tor degree");
    int n = int(cat.size());
    ModuleEval E(M);
    std::vector<std::shared_ptr<const FreeResolution>> res(n);
    for (int y = 0; y < n; ++y) res[y] = simple_resolution(cat, y, top + 1, engine);
    std::vector<PerDegree> parts(n);
    std::exception_ptr err;
#pragma omp parallel for schedule(dynamic) if (parallel)
    for (int y = 0; y < n; ++y) {
        try {
            parts[y] = tor_at(E, *res[y], degrees);
        } catch (...) {
#pragma omp critical
            if (!err) err = std::current_exception();
        }
    }
    if (err) std::rethrow_exception(err);
    TorReport rep;
    for (int d : degrees) rep.aggregate[d] = {AbGroupNF{}, AbGroupNF{}};
    for (int y = 0; y < n; ++y) {
        rep.per_object[cat.label(y)] = parts[y];
        for (auto& [d, g] : parts[y])
            for (int q = 0; q < 2; ++q) rep.aggregate[d][q] = direct_sum(rep.aggregate[d][q], g[q]);
    }
    return rep;
}

std::pair<bool, bool> verified_hypotheses(const Category& cat) {
    static std::mutex mu;
    static std::map<const Category*, std::pair<bool, bool>> cache;
    std::lock_guard<std::mutex> lock(mu);
    auto it = cache.find(&cat);
    if (it != cache.end()) return it->second;
    RingIdealData d = ideal_checks(cat.table, cat.pres.quiver);
    return cache[&cat] = {d.nilpotent, d.semidirect};
}

}

TorReport tor(const GradedModule& M, const std::vector<int>& degrees, TorOptions opt) {
    return run_tor(M, degrees, opt.engine, opt.parallel);
}

TorReport tor_serial(const GradedModule& M, const std::vector<int>& degrees, Engine engine) {
    return run_tor(M, degrees, engine, false);
}

PdResult projective_dimension(const GradedModule& M, int max_n, TorOptions opt) {
    auto [nil, semi] = verified_hypotheses(*M.cat);
    if (!nil) throw HypothesisError("the ideal of non-identity transformations is not nilpotent");
    if (!semi) throw HypothesisError("the category does not split as nilpotent ideal plus identities");
    std::vector<int> degs;
    for (int n = 0; n <= max_n + 1; ++n) degs.push_back(n);
    PdResult r;
    r.tor = tor(M, degs, opt);
    for (int n = 0; n <= max_n; ++n) {
        const auto& a = r.tor.aggregate.at(n);
        const auto& b = r.tor.aggregate.at(n + 1);
        if (a[0].free() && a[1].free() && b[0].trivial() && b[1].trivial()) {
            r.pd = n;
            break;
        }
    }
    return r;
}

std::size_t rational_tor(const GradedModule& M, int n, TorOptions opt) {
    auto rep = tor(M, {n}, opt);
    const auto& g = rep.aggregate.at(n);
    return g[0].rank + g[1].rank;
}

std::optional<int> rational_projective_dimension(const GradedModule& M, int max_n, TorOptions opt) {
    std::vector<int> degs;
    for (int n = 1; n <= max_n + 1; ++n) degs.push_back(n);
    auto rep = tor(M, degs, opt);
    for (int n = 0; n <= max_n; ++n) {
        const auto& g = rep.aggregate.at(n + 1);
        if (g[0].rank + g[1].rank == 0) return n;
    }
    return std::nullopt;
}

IntMatrix evaluate_left(const Category& cat, const FreeMap& f, int z, int q) {
    const HomTable& T = cat.table;
    auto coords = [&](const std::vector<Summand>& lev) {
        std::vector<std::pair<int, int>> c;
        for (std::size_t a = 0; a < lev.size(); ++a) {
            const auto& ids = T.hom(lev[a].obj, z);
            for (std::size_t p = 0; p < ids.size(); ++p)
                if ((T.elem(ids[p]).parity ^ lev[a].shift) == q) c.emplace_back(int(a), int(p));
        }
        return c;
    };
    auto cs = coords(f.source), ct = coords(f.target);
    std::map<std::pair<int, int>, std::size_t> lt;
    for (std::size_t i = 0; i < ct.size(); ++i) lt[ct[i]] = i;
    IntMatrix A(ct.size(), cs.size());
    for (std::size_t j = 0; j < cs.size(); ++j) {
        auto [a, p] = cs[j];
        Coeffs psi = T.unit(T.hom(f.source[a].obj, z)[p]);
        for (std::size_t b = 0; b < f.target.size(); ++b) {
            const Coeffs& phi = f.entry[b][a];
            if (phi.empty() || all_zero(phi)) continue;
            Coeffs img = T.compose(f.target[b].obj, f.source[a].obj, z, phi, psi);
            for (std::size_t t = 0; t < img.size(); ++t)
                if (img[t] != 0) {
                    auto it = lt.find({int(b), int(t)});
                    if (it == lt.end()) throw ComputationError("map of free modules does not preserve degree");
                    A(it->second, j) += img[t];
                }
        }
    }
    return A;
}

FreeComplexCheck check_free_left_complex(const Category& cat, const std::vector<FreeMap>& chain) {
    FreeComplexCheck r;
    for (std::size_t z = 0; z < cat.size(); ++z)
        for (int q = 0; q < 2; ++q) {
            std::vector<IntMatrix> m;
            for (const auto& f : chain) m.push_back(evaluate_left(cat, f, int(z), q));
            for (std::size_t i = 0; i + 1 < m.size(); ++i) {
                if (!(m[i] * m[i + 1]).is_zero()) {
                    r.squares_zero = r.exact = false;
                    continue;
                }
                Presentation mid(m[i].cols()), low(m[i].rows());
                if (!subquotient_homology(m[i + 1], mid, m[i], low).group.trivial()) r.exact = false;
            }
            if (!m.empty() && rank(m.back()) != m.back().cols()) r.injective = false;
        }
    return r;
}

}
