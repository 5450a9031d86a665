#include "fkt/ntcat.hpp"

#include <algorithm>
#include <deque>
#include <functional>
#include <mutex>
#include <set>
#include <tuple>

namespace fkt {

int GradedQuiver::object(const std::string& label) const {
    auto it = std::find(objects.begin(), objects.end(), label);
    if (it == objects.end()) throw ParseError("unknown object '" + label + "'");
    return int(it - objects.begin());
}

int GradedQuiver::arrow(const std::string& name) const {
    for (std::size_t i = 0; i < arrows.size(); ++i)
        if (arrows[i].name == name) return int(i);
    throw ParseError("unknown arrow '" + name + "'");
}

void add_to(PathSum& acc, const PathSum& x, const Int& c) {
    for (const auto& [p, v] : x) {
        Int& slot = acc[p];
        slot += c * v;
        if (slot == 0) acc.erase(p);
    }
}

PathSum then(const PathSum& x, const PathSum& y) {
    PathSum r;
    for (const auto& [p, v] : x)
        for (const auto& [q, w] : y) {
            Path pq = p;
            pq.insert(pq.end(), q.begin(), q.end());
            Int& slot = r[pq];
            slot += v * w;
            if (slot == 0) r.erase(pq);
        }
    return r;
}

PathSum single(const Path& p) { return PathSum{{p, Int(1)}}; }

void CatPresentation::check() const {
    const auto& A = quiver.arrows;
    for (const auto& a : A)
        if (a.src < 0 || a.dst < 0 || a.src >= int(quiver.objects.size()) || a.dst >= int(quiver.objects.size()))
            throw ParseError("arrow '" + a.name + "' has an unknown endpoint");
    std::set<std::string> names;
    for (const auto& a : A)
        if (!names.insert(a.name).second) throw ParseError("duplicate arrow name '" + a.name + "'");
    for (const auto& r : relations) {
        int src = -1, dst = -1, par = -1;
        for (const auto& [p, c] : r.terms) {
            if (p.empty()) throw ParseError("relation term with an empty path");
            for (std::size_t k = 0; k + 1 < p.size(); ++k)
                if (A[p[k]].dst != A[p[k + 1]].src) throw ParseError("relation term is not a composable path");
            int s = A[p.front()].src, d = A[p.back()].dst, q = 0;
            for (int a : p) q ^= A[a].parity;
            if (src < 0) {
                src = s;
                dst = d;
                par = q;
            } else if (s != src || d != dst || q != par) {
                throw ParseError("inconsistent relation: terms are not parallel or differ in parity");
            }
        }
    }
}

bool CatPresentation::homogeneous() const {
    for (const auto& r : relations) {
        std::set<std::size_t> lens;
        for (const auto& [p, c] : r.terms) lens.insert(p.size());
        if (lens.size() > 1) return false;
    }
    return true;
}

struct HomTable::Builder {
    HomTable t;
    std::vector<std::map<int, Sparse>> after;  // global ids until finish()

    explicit Builder(const GradedQuiver& Q) {
        t.arrows_ = Q.arrows;
        t.hom_.assign(Q.objects.size(), std::vector<std::vector<int>>(Q.objects.size()));
        t.ident_.assign(Q.objects.size(), -1);
    }
    int add(int src, int dst, int parity, int level, Path word) {
        int id = int(t.elems_.size());
        t.elems_.push_back(BasisElem{src, dst, parity, level, std::move(word)});
        t.pos_.push_back(int(t.hom_[src][dst].size()));
        t.hom_[src][dst].push_back(id);
        after.emplace_back();
        if (level == 0 && src == dst && t.elems_.back().word.empty()) t.ident_[src] = id;
        t.max_level_ = std::max(t.max_level_, level);
        return id;
    }
    HomTable finish() {
        t.after_.resize(t.elems_.size());
        for (std::size_t id = 0; id < t.elems_.size(); ++id)
            for (auto& [a, sp] : after[id]) {
                Sparse s;
                for (auto& [g, v] : sp) s.emplace_back(t.pos_[g], v);
                std::sort(s.begin(), s.end());
                t.after_[id][a] = s;
            }
        t.finish();
        return std::move(t);
    }
};

const Sparse& HomTable::after_arrow(int id, int arrow) const {
    static const Sparse empty;
    auto it = after_[id].find(arrow);
    return it == after_[id].end() ? empty : it->second;
}

Coeffs HomTable::unit(int id) const {
    Coeffs c(hom_[elems_[id].src][elems_[id].dst].size());
    c[pos_[id]] = 1;
    return c;
}

Coeffs HomTable::eval_path(int y, const Path& p) const {
    Coeffs cur = unit(ident_[y]);
    int at = y;
    for (int a : p) {
        if (arrows_[a].src != at) throw ComputationError("path is not composable");
        int nz = arrows_[a].dst;
        Coeffs nxt(hom_[y][nz].size());
        const auto& ids = hom_[y][at];
        for (std::size_t i = 0; i < ids.size(); ++i) {
            if (cur[i] == 0) continue;
            for (const auto& [j, v] : after_arrow(ids[i], a)) nxt[j] += cur[i] * v;
        }
        cur = std::move(nxt);
        at = nz;
    }
    return cur;
}

Coeffs HomTable::eval(int y, const PathSum& s) const {
    Coeffs acc;
    int dst = -1;
    for (const auto& [p, c] : s) {
        int d = p.empty() ? y : arrows_[p.back()].dst;
        if (dst < 0) {
            dst = d;
            acc.assign(hom_[y][d].size(), Int(0));
        } else if (d != dst) {
            throw ComputationError("path sum is not parallel");
        }
        Coeffs v = eval_path(y, p);
        for (std::size_t i = 0; i < v.size(); ++i) acc[i] += c * v[i];
    }
    return acc;
}

void HomTable::finish() {
    comp_.assign(elems_.size(), {});
    for (std::size_t a = 0; a < elems_.size(); ++a) {
        int y = elems_[a].src, z = elems_[a].dst;
        for (std::size_t w = 0; w < hom_.size(); ++w)
            for (int b : hom_[z][w]) {
                // push a along the word of b
                Coeffs cur = unit(int(a));
                int at = z;
                for (int arr : elems_[b].word) {
                    int nz = arrows_[arr].dst;
                    Coeffs nxt(hom_[y][nz].size());
                    const auto& ids = hom_[y][at];
                    for (std::size_t i = 0; i < ids.size(); ++i) {
                        if (cur[i] == 0) continue;
                        for (const auto& [j, v] : after_arrow(ids[i], arr)) nxt[j] += cur[i] * v;
                    }
                    cur = std::move(nxt);
                    at = nz;
                }
                Sparse s;
                for (std::size_t i = 0; i < cur.size(); ++i)
                    if (cur[i] != 0) s.emplace_back(int(i), cur[i]);
                comp_[a][b] = std::move(s);
            }
    }
}

const Sparse& HomTable::compose_basis(int a, int b) const {
    auto it = comp_[a].find(b);
    if (it == comp_[a].end()) throw ComputationError("composition of non-composable basis elements");
    return it->second;
}

Coeffs HomTable::compose(int y, int z, int w, const Coeffs& a, const Coeffs& b) const {
    Coeffs r(hom_[y][w].size());
    const auto& ia = hom_[y][z];
    const auto& ib = hom_[z][w];
    for (std::size_t i = 0; i < ia.size(); ++i) {
        if (a[i] == 0) continue;
        for (std::size_t j = 0; j < ib.size(); ++j) {
            if (b[j] == 0) continue;
            for (const auto& [k, v] : compose_basis(ia[i], ib[j])) r[k] += a[i] * b[j] * v;
        }
    }
    return r;
}

namespace {

// incremental reduced row echelon form over Q
struct Rref {
    std::size_t ncols = 0;
    std::vector<std::vector<mpq_class>> rows;
    std::vector<std::size_t> piv;

    explicit Rref(std::size_t n) : ncols(n) {}

    // returns true if the row was independent
    bool insert(std::vector<mpq_class> r) {
        for (std::size_t k = 0; k < rows.size(); ++k) {
            const mpq_class f = r[piv[k]];
            if (f == 0) continue;
            for (std::size_t j = 0; j < ncols; ++j)
                if (rows[k][j] != 0) r[j] -= f * rows[k][j];
        }
        std::size_t p = 0;
        while (p < ncols && r[p] == 0) ++p;
        if (p == ncols) return false;
        mpq_class pv = r[p];
        for (auto& x : r) x /= pv;
        for (auto& row : rows) {
            const mpq_class f = row[p];
            if (f == 0) continue;
            for (std::size_t j = 0; j < ncols; ++j)
                if (r[j] != 0) row[j] -= f * r[j];
        }
        rows.push_back(std::move(r));
        piv.push_back(p);
        return true;
    }
    bool is_pivot(std::size_t c) const { return std::find(piv.begin(), piv.end(), c) != piv.end(); }
    const std::vector<mpq_class>& row_for(std::size_t c) const {
        for (std::size_t k = 0; k < piv.size(); ++k)
            if (piv[k] == c) return rows[k];
        throw ComputationError("no pivot row");
    }
};

Int integral(const mpq_class& q) {
    if (q.get_den() != 1)
        throw ComputationError("relation span is not saturated in path coordinates; Hom group may have torsion");
    return q.get_num();
}

struct Rel {
    int src, dst;
    std::size_t len;
    std::vector<std::pair<Path, Int>> terms;
};

std::vector<Rel> group_relations(const CatPresentation& P) {
    std::vector<Rel> out;
    for (const auto& r : P.relations) {
        if (r.terms.empty()) continue;
        const Path& p0 = r.terms.begin()->first;
        Rel x{P.quiver.arrows[p0.front()].src, P.quiver.arrows[p0.back()].dst, p0.size(), {}};
        for (const auto& [p, c] : r.terms) {
            x.terms.emplace_back(p, c);
            x.len = std::max(x.len, p.size());
        }
        out.push_back(std::move(x));
    }
    return out;
}

std::vector<std::vector<int>> out_arrows(const GradedQuiver& Q) {
    std::vector<std::vector<int>> out(Q.objects.size());
    for (std::size_t a = 0; a < Q.arrows.size(); ++a) out[Q.arrows[a].src].push_back(int(a));
    return out;
}

}

HomTable hom_closure(const CatPresentation& P, int max_len) {
    if (max_len < 1) throw ComputationError("hom_closure: max_len must be at least 1");
    P.check();
    if (!P.homogeneous()) throw ComputationError("relations are not length-homogeneous");
    const auto& Q = P.quiver;
    auto out = out_arrows(Q);
    auto rels = group_relations(P);
    HomTable::Builder b(Q);
    for (int y = 0; y < int(Q.objects.size()); ++y) {
        std::vector<std::vector<int>> lev{{b.add(y, y, 0, 0, {})}};
        for (std::size_t l = 0;; ++l) {
            std::map<int, std::vector<std::pair<int, int>>> gens;
            for (int e : lev[l])
                for (int a : out[b.t.elem(e).dst]) gens[Q.arrows[a].dst].emplace_back(e, a);
            std::map<int, std::map<std::pair<int, int>, std::size_t>> gidx;
            for (auto& [z, gl] : gens)
                for (std::size_t i = 0; i < gl.size(); ++i) gidx[z][gl[i]] = i;
            std::map<int, std::vector<std::vector<mpq_class>>> rows;
            for (const auto& r : rels) {
                if (r.len > l + 1 || !gens.count(r.dst)) continue;
                std::size_t base = l + 1 - r.len;
                for (int x : lev[base]) {
                    if (b.t.elem(x).dst != r.src) continue;
                    std::vector<mpq_class> vec(gens[r.dst].size());
                    bool nz = false;
                    for (const auto& [p, cf] : r.terms) {
                        std::map<int, Int> cur{{x, Int(1)}};
                        for (std::size_t k = 0; k + 1 < p.size(); ++k) {
                            std::map<int, Int> nxt;
                            for (auto& [e, v] : cur)
                                for (auto& [g, w] : b.after[e][p[k]]) nxt[g] += v * w;
                            cur.clear();
                            for (auto& [g, v] : nxt)
                                if (v != 0) cur[g] = v;
                        }
                        for (auto& [e, v] : cur) {
                            vec[gidx[r.dst].at({e, p.back()})] += mpq_class(cf * v);
                            nz = true;
                        }
                    }
                    if (nz) rows[r.dst].push_back(std::move(vec));
                }
            }
            std::vector<int> next;
            for (auto& [z, gl] : gens) {
                Rref rr(gl.size());
                for (auto& row : rows[z]) rr.insert(row);
                std::map<std::size_t, int> fresh;
                for (std::size_t j = 0; j < gl.size(); ++j) {
                    if (rr.is_pivot(j)) continue;
                    auto [e, a] = gl[j];
                    const auto& el = b.t.elem(e);
                    Path w = el.word;
                    w.push_back(a);
                    int id = b.add(y, z, el.parity ^ Q.arrows[a].parity, int(l) + 1, w);
                    fresh[j] = id;
                    next.push_back(id);
                }
                for (std::size_t j = 0; j < gl.size(); ++j) {
                    auto [e, a] = gl[j];
                    Sparse s;
                    if (fresh.count(j)) {
                        s.emplace_back(fresh[j], Int(1));
                    } else {
                        const auto& row = rr.row_for(j);
                        for (auto& [f, id] : fresh)
                            if (row[f] != 0) s.emplace_back(id, integral(-row[f]));
                    }
                    b.after[e][a] = s;
                }
            }
            if (next.empty()) break;
            if (int(l) + 1 > max_len) throw ComputationError("hom_closure did not stabilize; raise max_len");
            lev.push_back(next);
        }
    }
    return b.finish();
}

namespace {

struct TruncBlock {
    std::vector<Path> paths;
    std::map<Path, std::size_t> index;
};

struct TruncResult {
    std::vector<std::vector<TruncBlock>> blocks;  // [y][z]
    std::vector<std::vector<Rref>> rr;
    std::size_t total = 0;
    std::vector<std::size_t> ranks;
};

// exact: never drop long terms, only stop deriving past the horizon
TruncResult truncated_quotient(const CatPresentation& P, std::size_t L, bool exact = false) {
    const auto& Q = P.quiver;
    std::size_t n = Q.objects.size();
    auto out = out_arrows(Q);
    auto rels = group_relations(P);
    TruncResult R;
    R.blocks.assign(n, std::vector<TruncBlock>(n));
    R.rr.resize(n);
    for (std::size_t y = 0; y < n; ++y) {
        // all paths of length <= L from y
        std::vector<std::pair<Path, int>> all{{Path{}, int(y)}};
        for (std::size_t i = 0; i < all.size(); ++i) {
            if (all[i].first.size() == L) continue;
            for (int a : out[all[i].second]) {
                Path p = all[i].first;
                p.push_back(a);
                all.emplace_back(p, Q.arrows[a].dst);
            }
        }
        for (auto& [p, z] : all) R.blocks[y][z].paths.push_back(p);
        for (std::size_t z = 0; z < n; ++z) {
            auto& bl = R.blocks[y][z];
            std::sort(bl.paths.begin(), bl.paths.end(), [](const Path& a, const Path& b) {
                return a.size() != b.size() ? a.size() > b.size() : a < b;
            });
            for (std::size_t i = 0; i < bl.paths.size(); ++i) bl.index[bl.paths[i]] = i;
            R.rr[y].emplace_back(bl.paths.size());
        }
        std::deque<std::pair<int, std::vector<mpq_class>>> work;
        auto push = [&](int z, std::vector<mpq_class> v) {
            std::vector<mpq_class> copy = v;
            if (R.rr[y][z].insert(std::move(copy))) work.emplace_back(z, std::move(v));
        };
        for (auto& [p, u] : all)
            for (const auto& r : rels) {
                if (r.src != u || p.size() + r.len > L) continue;
                auto& bl = R.blocks[y][r.dst];
                std::vector<mpq_class> v(bl.paths.size());
                bool nz = false;
                for (const auto& [t, c] : r.terms) {
                    Path pt = p;
                    pt.insert(pt.end(), t.begin(), t.end());
                    if (pt.size() > L) continue;
                    v[bl.index.at(pt)] += mpq_class(c);
                    nz = true;
                }
                if (nz) push(r.dst, std::move(v));
            }
        // right ideal closure under appending arrows
        while (!work.empty()) {
            auto [z, v] = std::move(work.front());
            work.pop_front();
            const auto& src = R.blocks[y][z];
            for (int a : out[z]) {
                int nz = Q.arrows[a].dst;
                auto& bl = R.blocks[y][nz];
                std::vector<mpq_class> w(bl.paths.size());
                bool any = false;
                bool over = false;
                for (std::size_t i = 0; i < v.size(); ++i) {
                    if (v[i] == 0) continue;
                    if (src.paths[i].size() + 1 > L) {
                        over = true;
                        continue;
                    }
                    Path p = src.paths[i];
                    p.push_back(a);
                    w[bl.index.at(p)] += v[i];
                    any = true;
                }
                if (any && !(exact && over)) push(nz, std::move(w));
            }
        }
        for (std::size_t z = 0; z < n; ++z) {
            std::size_t r = R.blocks[y][z].paths.size() - R.rr[y][z].rows.size();
            R.ranks.push_back(r);
            R.total += r;
        }
    }
    return R;
}

}

HomTable hom_closure_truncated(const CatPresentation& P, int max_len) {
    if (max_len < 1) throw ComputationError("hom_closure: max_len must be at least 1");
    P.check();
    const auto& Q = P.quiver;
    std::size_t n = Q.objects.size();
    std::vector<std::size_t> prev;
    for (int L = 1; L <= max_len; ++L) {
        TruncResult R = truncated_quotient(P, std::size_t(L));
        bool stable = R.ranks == prev;
        prev = R.ranks;
        if (!stable) continue;
        TruncResult S = truncated_quotient(P, std::size_t(L) + 1);
        if (S.ranks != R.ranks) continue;
        if (!P.homogeneous() && truncated_quotient(P, std::size_t(L) + 2, true).ranks != R.ranks)
            throw HypothesisError("relations do not bound path length; non-identity arrows are not nilpotent");
        HomTable::Builder b(Q);
        // basis: non-pivot paths, identity first
        std::vector<std::vector<std::map<std::size_t, int>>> ids(n, std::vector<std::map<std::size_t, int>>(n));
        for (std::size_t y = 0; y < n; ++y) {
            auto& id_blk = S.blocks[y][y];
            std::size_t ic = id_blk.index.at(Path{});
            if (S.rr[y][y].is_pivot(ic)) throw ComputationError("identity is killed by the relations");
            ids[y][y][ic] = b.add(int(y), int(y), 0, 0, {});
            for (std::size_t z = 0; z < n; ++z) {
                auto& bl = S.blocks[y][z];
                for (std::size_t c = bl.paths.size(); c-- > 0;) {
                    if (S.rr[y][z].is_pivot(c) || ids[y][z].count(c)) continue;
                    int par = 0;
                    for (int a : bl.paths[c]) par ^= Q.arrows[a].parity;
                    ids[y][z][c] = b.add(int(y), int(z), par, int(bl.paths[c].size()), bl.paths[c]);
                }
            }
        }
        auto out = out_arrows(Q);
        for (std::size_t y = 0; y < n; ++y)
            for (std::size_t z = 0; z < n; ++z)
                for (auto& [c, id] : ids[y][z])
                    for (int a : out[z]) {
                        int nz = Q.arrows[a].dst;
                        Path p = S.blocks[y][z].paths[c];
                        p.push_back(a);
                        Sparse s;
                        auto& bl = S.blocks[y][nz];
                        auto it = bl.index.find(p);
                        if (it != bl.index.end()) {
                            std::size_t col = it->second;
                            if (!S.rr[y][nz].is_pivot(col)) {
                                s.emplace_back(ids[y][nz].at(col), Int(1));
                            } else {
                                const auto& row = S.rr[y][nz].row_for(col);
                                for (auto& [f, fid] : ids[y][nz])
                                    if (row[f] != 0) s.emplace_back(fid, integral(-row[f]));
                            }
                        }
                        b.after[id][a] = s;
                    }
        return b.finish();
    }
    throw ComputationError("hom_closure did not stabilize; raise max_len");
}

RingIdealData ideal_checks(const HomTable& T, const GradedQuiver& Q) {
    std::size_t n = T.num_objects();
    RingIdealData d;
    for (std::size_t y = 0; y < n; ++y) d.ss_basis.push_back(T.identity(int(y)));
    using Lat = std::vector<std::vector<IntMatrix>>;
    auto empty_lat = [&]() {
        Lat L(n, std::vector<IntMatrix>(n));
        for (std::size_t y = 0; y < n; ++y)
            for (std::size_t z = 0; z < n; ++z) L[y][z] = IntMatrix(T.rank(int(y), int(z)), 0);
        return L;
    };
    std::vector<Coeffs> arrow_el;
    for (std::size_t a = 0; a < Q.arrows.size(); ++a)
        arrow_el.push_back(T.eval_path(Q.arrows[a].src, Path{int(a)}));
    // closes a family of generators under post-composition (and pre-composition if two_sided)
    auto close = [&](std::vector<std::tuple<int, int, Coeffs>> seeds, bool two_sided) {
        Lat L = empty_lat();
        std::deque<std::tuple<int, int, Coeffs>> work;
        auto add = [&](int y, int z, const Coeffs& v) {
            if (std::all_of(v.begin(), v.end(), [](const Int& x) { return x == 0; })) return;
            if (in_span(L[y][z], v)) return;
            L[y][z] = lattice_basis(IntMatrix::hcat(L[y][z], IntMatrix::column(v)));
            work.emplace_back(y, z, v);
        };
        for (auto& [y, z, v] : seeds) add(y, z, v);
        while (!work.empty()) {
            auto [y, z, v] = work.front();
            work.pop_front();
            for (std::size_t a = 0; a < Q.arrows.size(); ++a) {
                const auto& ar = Q.arrows[a];
                if (ar.src == z) add(y, ar.dst, T.compose(y, z, ar.dst, v, arrow_el[a]));
                if (two_sided && ar.dst == y) add(ar.src, z, T.compose(ar.src, y, z, arrow_el[a], v));
            }
        }
        return L;
    };
    std::vector<std::tuple<int, int, Coeffs>> seeds;
    for (std::size_t a = 0; a < Q.arrows.size(); ++a)
        seeds.emplace_back(Q.arrows[a].src, Q.arrows[a].dst, arrow_el[a]);
    Lat J = close(seeds, true);
    for (std::size_t y = 0; y < n; ++y)
        for (std::size_t z = 0; z < n; ++z) d.nil_rank += J[y][z].cols();

    d.semidirect = true;
    for (std::size_t y = 0; y < n && d.semidirect; ++y)
        for (std::size_t z = 0; z < n; ++z) {
            IntMatrix g = J[y][z];
            std::size_t expect = T.rank(int(y), int(z));
            if (y == z) {
                g = IntMatrix::hcat(g, IntMatrix::column(T.unit(T.identity(int(y)))));
                if (J[y][z].cols() + 1 != expect) d.semidirect = false;
            } else if (g.cols() != expect) {
                d.semidirect = false;
            }
            if (!normal_form(Presentation(expect, g)).trivial()) d.semidirect = false;
            if (!d.semidirect) break;
        }

    // powers J^k = right closure of J^(k-1) composed with arrows
    Lat P = J;
    std::size_t bound = T.total_rank() + 2;
    for (std::size_t k = 1; k <= bound; ++k) {
        bool zero = true;
        for (std::size_t y = 0; y < n && zero; ++y)
            for (std::size_t z = 0; z < n; ++z)
                if (P[y][z].cols() > 0) {
                    zero = false;
                    break;
                }
        if (zero) {
            d.nilpotent = true;
            d.nilpotency_index = int(k);
            break;
        }
        std::vector<std::tuple<int, int, Coeffs>> next;
        for (std::size_t y = 0; y < n; ++y)
            for (std::size_t z = 0; z < n; ++z)
                for (std::size_t c = 0; c < P[y][z].cols(); ++c) {
                    Coeffs v = P[y][z].col(c);
                    for (std::size_t a = 0; a < Q.arrows.size(); ++a)
                        if (Q.arrows[a].src == int(z))
                            next.emplace_back(int(y), Q.arrows[a].dst,
                                              T.compose(int(y), int(z), Q.arrows[a].dst, v, arrow_el[a]));
                }
        P = close(next, false);
    }
    return d;
}

namespace {

struct Atom {
    bool bd;
    Mask a, b, c;  // kappa: source, target, support; boundary: U, W
    bool operator==(const Atom& o) const { return bd == o.bd && a == o.a && b == o.b && c == o.c; }
};
using Term = std::pair<int, std::vector<Atom>>;
using SymRel = std::vector<Term>;

}

Composites::Composites(const FiniteSpace& X, const GradedQuiver& Q, const std::vector<Mask>& objects) : X_(&X) {
    for (std::size_t i = 0; i < objects.size(); ++i) obj_[objects[i]] = int(i);
    std::vector<std::vector<int>> out(objects.size());
    for (std::size_t a = 0; a < Q.arrows.size(); ++a) out[Q.arrows[a].src].push_back(int(a));

    for (Mask y : objects)
        for (Mask o : X.opens()) {
            Mask u = y & o;
            if (u && u != y && std::find(exts_.begin(), exts_.end(), std::make_pair(y, u)) == exts_.end())
                exts_.emplace_back(y, u);
        }

    auto bfs = [&](Mask A, Mask D, Mask E) -> std::optional<Path> {
        using St = std::pair<int, Mask>;
        std::map<St, std::pair<St, int>> prev;
        St start{obj_.at(A), A};
        prev[start] = {start, -1};
        std::deque<St> q{start};
        while (!q.empty()) {
            St s = q.front();
            q.pop_front();
            if (objects[s.first] == D && s.second == E) {
                Path p;
                while (prev[s].second >= 0) {
                    p.push_back(prev[s].second);
                    s = prev[s].first;
                }
                std::reverse(p.begin(), p.end());
                return p;
            }
            for (int a : out[s.first]) {
                const auto& ar = Q.arrows[a];
                if (ar.kind == ArrowKind::bdry) continue;
                Mask t = objects[ar.dst];
                if (!subset_of(E, t)) continue;
                Mask f2 = ar.kind == ArrowKind::incl ? s.second : (s.second & t);
                if (!subset_of(E, f2)) continue;
                St ns{ar.dst, f2};
                if (!prev.count(ns)) {
                    prev[ns] = {s, a};
                    q.push_back(ns);
                }
            }
        }
        return std::nullopt;
    };

    std::vector<std::tuple<Mask, Mask, Mask>> katoms;
    for (Mask A : objects)
        for (Mask D : objects) {
            Mask I = A & D;
            for (Mask E = I; E; E = (E - 1) & I) {
                if (!X.connected(E) || !X.rel_closed(E, A) || !X.rel_open(E, D)) continue;
                katoms.emplace_back(A, D, E);
                if (A == D && D == E) {
                    kappa_[{A, D, E}] = single(Path{});
                } else if (auto p = bfs(A, D, E)) {
                    kappa_[{A, D, E}] = single(*p);
                }
            }
        }
    for (std::size_t a = 0; a < Q.arrows.size(); ++a)
        if (Q.arrows[a].kind == ArrowKind::bdry)
            delta_[{objects[Q.arrows[a].dst], objects[Q.arrows[a].src]}] = single(Path{int(a)});

    auto comps = [&](Mask m) { return m ? X.components(m) : std::vector<Mask>{}; };
    auto kterms = [&](Mask A, Mask D, Mask sup) {
        std::vector<Atom> r;
        for (Mask c : comps(sup)) r.push_back(Atom{false, A, D, c});
        return r;
    };
    auto has_d = [&](Mask u, Mask w) { return X.connected(u | w); };

    std::vector<SymRel> ext;
    for (auto [Y1, U1] : exts_) {
        Mask W1 = Y1 & ~U1;
        for (auto [Y2, U2] : exts_) {
            Mask W2 = Y2 & ~U2;
            Mask F = Y1 & Y2;
            if (!F || !X.rel_closed(F, Y1) || !X.rel_open(F, Y2)) continue;
            if (!subset_of(U1 & Y2, U2)) continue;
            for (Mask Ub : comps(U2))
                for (Mask Wc : comps(W1)) {
                    SymRel terms;
                    for (Mask Wd : comps(W2)) {
                        if (!has_d(Ub, Wd)) continue;
                        for (const Atom& kt : kterms(Wc, Wd, Wc & Wd))
                            terms.push_back({1, {kt, Atom{true, Ub, Wd, 0}}});
                    }
                    for (Mask Ua : comps(U1)) {
                        if (!has_d(Ua, Wc)) continue;
                        for (const Atom& kt : kterms(Ua, Ub, Ua & Ub))
                            terms.push_back({-1, {Atom{true, Ua, Wc, 0}, kt}});
                    }
                    if (!terms.empty()) ext.push_back(terms);
                }
        }
    }
    for (auto [Y, U] : exts_) {
        Mask W = Y & ~U;
        for (Mask Wc : comps(W)) {
            SymRel terms;
            for (Mask Ua : comps(U))
                if (has_d(Ua, Wc)) terms.push_back({1, {Atom{true, Ua, Wc, 0}, Atom{false, Ua, Y, Ua}}});
            if (!terms.empty()) ext.push_back(terms);
        }
        for (Mask Ua : comps(U)) {
            SymRel terms;
            for (Mask Wc : comps(W))
                if (has_d(Ua, Wc)) terms.push_back({1, {Atom{false, Y, Wc, Wc}, Atom{true, Ua, Wc, 0}}});
            if (!terms.empty()) ext.push_back(terms);
        }
    }

    auto value = [&](const Atom& a) -> std::optional<PathSum> {
        if (a.bd) {
            auto it = delta_.find({a.a, a.b});
            if (it == delta_.end()) return std::nullopt;
            return it->second;
        }
        auto it = kappa_.find({a.a, a.b, a.c});
        if (it == kappa_.end()) return std::nullopt;
        return it->second;
    };
    auto identity_atom = [](const Atom& a) { return !a.bd && a.a == a.b && a.b == a.c; };

    // boundary maps between non-generator pieces, solved from naturality
    for (bool changed = true; changed;) {
        changed = false;
        for (const auto& terms : ext) {
            std::vector<std::pair<std::size_t, Atom>> unknown;
            for (std::size_t ti = 0; ti < terms.size(); ++ti)
                for (const Atom& a : terms[ti].second)
                    if (a.bd && !delta_.count({a.a, a.b})) unknown.emplace_back(ti, a);
            if (unknown.size() != 1) continue;
            auto [ti, ua] = unknown[0];
            bool others_id = true;
            for (const Atom& a : terms[ti].second)
                if (!(a == ua) && !identity_atom(a)) others_id = false;
            if (!others_id) continue;
            PathSum acc;
            bool ok = true;
            for (std::size_t tj = 0; tj < terms.size() && ok; ++tj) {
                if (tj == ti) continue;
                PathSum v = single(Path{});
                for (const Atom& a : terms[tj].second) {
                    auto av = value(a);
                    if (!av) {
                        ok = false;
                        break;
                    }
                    v = then(v, *av);
                }
                if (ok) add_to(acc, v, terms[tj].first);
            }
            if (!ok) continue;
            PathSum val;
            add_to(val, acc, -terms[ti].first);
            delta_[{ua.a, ua.b}] = val;
            changed = true;
        }
    }

    std::vector<SymRel> all = ext;
    std::map<Mask, std::vector<std::tuple<Mask, Mask, Mask>>> by_src;
    for (auto& k : katoms) by_src[std::get<0>(k)].push_back(k);
    for (auto& [A, B, E1] : katoms)
        for (auto& [B2, D, E2] : by_src[B]) {
            SymRel terms{{1, {Atom{false, A, B, E1}, Atom{false, B, D, E2}}}};
            for (const Atom& kt : kterms(A, D, E1 & E2)) terms.push_back({-1, {kt}});
            all.push_back(terms);
        }
    std::set<PathSum> seen;
    for (const auto& terms : all) {
        PathSum tot;
        bool ok = true;
        for (const auto& [cf, atoms] : terms) {
            PathSum v = single(Path{});
            for (const Atom& a : atoms) {
                auto av = value(a);
                if (!av) {
                    ok = false;
                    break;
                }
                v = then(v, *av);
            }
            if (!ok) break;
            add_to(tot, v, cf);
        }
        if (!ok) {
            ++missing_;
            continue;
        }
        if (tot.empty() || seen.count(tot)) continue;
        seen.insert(tot);
        relations_.push_back(tot);
    }
}

std::optional<PathSum> Composites::kappa(Mask a, Mask d, Mask e) const {
    auto it = kappa_.find({a, d, e});
    if (it == kappa_.end()) return std::nullopt;
    return it->second;
}

PathSum Composites::kappa_sum(Mask a, Mask d, Mask support) const {
    PathSum r;
    if (!support) return r;
    for (Mask c : X_->components(support)) {
        auto k = kappa(a, d, c);
        if (!k) throw ComputationError("no canonical map " + X_->label(a) + " -> " + X_->label(d));
        add_to(r, *k);
    }
    return r;
}

std::optional<PathSum> Composites::delta(Mask u, Mask w) const {
    if (!X_->connected(u | w)) return PathSum{};
    auto it = delta_.find({u, w});
    if (it == delta_.end()) return std::nullopt;
    return it->second;
}

int Category::object(const std::string& label) const { return pres.quiver.object(label); }

int Category::object(Mask m) const {
    for (std::size_t i = 0; i < masks.size(); ++i)
        if (masks[i] == m) return int(i);
    throw ComputationError("subset is not an object of the category");
}

Coeffs Category::word(const std::vector<std::string>& names) const {
    if (names.empty()) throw ComputationError("empty word");
    Path p;
    for (const auto& n : names) p.push_back(pres.quiver.arrow(n));
    return table.eval_path(pres.quiver.arrows[p.front()].src, p);
}

std::string arrow_name(ArrowKind k, const std::string& src, const std::string& dst) {
    const char* tag = k == ArrowKind::incl ? "i" : k == ArrowKind::restr ? "r" : "d";
    return std::string(tag) + "_" + src + "_" + dst;
}

namespace {

std::vector<Mask> object_masks(const FiniteSpace& X) {
    std::vector<Mask> ms;
    for (const auto& s : X.lc_subsets(true)) ms.push_back(s.value);
    return ms;
}

void add_arrow(GradedQuiver& Q, const FiniteSpace& X, const std::vector<Mask>& ms, const std::string& s,
               ArrowKind k, const std::string& d) {
    Mask a = X.parse(s), b = X.parse(d);
    int ia = int(std::find(ms.begin(), ms.end(), a) - ms.begin());
    int ib = int(std::find(ms.begin(), ms.end(), b) - ms.begin());
    if (ia == int(ms.size()) || ib == int(ms.size())) throw ComputationError("arrow endpoint is not an object");
    Q.arrows.push_back(Arrow{ia, ib, arrow_name(k, X.label(a), X.label(b)), k == ArrowKind::bdry ? 1 : 0, k});
}

}

GradedQuiver builtin_quiver(const FiniteSpace& X) {
    GradedQuiver Q;
    auto ms = object_masks(X);
    for (Mask m : ms) Q.objects.push_back(X.label(m));
    const std::string& nm = X.name();
    if (nm.size() == 2 && nm[0] == 'Z') {
        int m = nm[1] - '0';
        Mask top = Mask(1) << m, low = top - 1;
        for (Mask s = 0; s <= low; ++s)
            for (int l = 0; l < m; ++l) {
                Mask bit = Mask(1) << l;
                if (s & bit) continue;
                add_arrow(Q, X, ms, X.label(s | top), ArrowKind::incl, X.label(s | bit | top));
            }
        for (int l = 0; l < m; ++l) add_arrow(Q, X, ms, X.label(X.full()), ArrowKind::restr, X.label(Mask(1) << l));
        for (int l = 0; l < m; ++l) add_arrow(Q, X, ms, X.label(Mask(1) << l), ArrowKind::bdry, X.label(top));
    } else if (nm == "S") {
        using K = ArrowKind;
        const std::vector<std::tuple<const char*, K, const char*>> arr = {
            {"4", K::incl, "34"},    {"4", K::incl, "24"},     {"34", K::incl, "234"},  {"24", K::incl, "234"},
            {"234", K::incl, "1234"}, {"2", K::incl, "123"},   {"3", K::incl, "123"},   {"123", K::restr, "12"},
            {"123", K::restr, "13"}, {"12", K::restr, "1"},    {"13", K::restr, "1"},   {"234", K::restr, "2"},
            {"234", K::restr, "3"},  {"1234", K::restr, "123"}, {"123", K::bdry, "4"},  {"12", K::bdry, "34"},
            {"13", K::bdry, "24"},   {"1", K::bdry, "234"}};
        for (auto& [s, k, d] : arr) add_arrow(Q, X, ms, s, k, d);
    } else if (nm == "C2") {
        using K = ArrowKind;
        const std::vector<std::tuple<const char*, K, const char*>> arr = {
            {"3", K::incl, "134"},    {"3", K::incl, "234"},     {"4", K::incl, "234"},   {"4", K::incl, "134"},
            {"134", K::restr, "13"},  {"134", K::restr, "14"},   {"134", K::incl, "1234"}, {"234", K::incl, "1234"},
            {"234", K::restr, "23"},  {"234", K::restr, "24"},   {"13", K::incl, "123"},  {"14", K::incl, "124"},
            {"23", K::incl, "123"},   {"24", K::incl, "124"},    {"1234", K::restr, "123"}, {"1234", K::restr, "124"},
            {"123", K::restr, "1"},   {"123", K::restr, "2"},    {"124", K::restr, "2"},  {"124", K::restr, "1"},
            {"1", K::bdry, "3"},      {"1", K::bdry, "4"},       {"2", K::bdry, "4"},     {"2", K::bdry, "3"}};
        for (auto& [s, k, d] : arr) add_arrow(Q, X, ms, s, k, d);
    } else if (nm == "pt") {
    } else {
        throw ParseError("no builtin generators for space '" + nm + "'");
    }
    return Q;
}

namespace {

CatPresentation z_presentation(const FiniteSpace& X, int m) {
    CatPresentation P;
    P.quiver = builtin_quiver(X);
    auto& Q = P.quiver;
    auto arrow = [&](ArrowKind k, Mask s, Mask d) { return Q.arrow(arrow_name(k, X.label(s), X.label(d))); };
    Mask top = Mask(1) << m, low = top - 1, full = X.full();
    // commuting squares of the inclusion hypercube
    for (Mask s = 0; s <= low; ++s)
        for (int l1 = 0; l1 < m; ++l1)
            for (int l2 = l1 + 1; l2 < m; ++l2) {
                Mask b1 = Mask(1) << l1, b2 = Mask(1) << l2;
                if ((s & b1) || (s & b2)) continue;
                Mask base = s | top;
                PathSum r;
                r[{arrow(ArrowKind::incl, base, base | b1), arrow(ArrowKind::incl, base | b1, base | b1 | b2)}] = 1;
                r[{arrow(ArrowKind::incl, base, base | b2), arrow(ArrowKind::incl, base | b2, base | b1 | b2)}] = -1;
                P.relations.push_back({r});
            }
    PathSum sum;
    for (int l = 0; l < m; ++l) {
        Mask bit = Mask(1) << l;
        Mask sub = full & ~bit;
        P.relations.push_back({single({arrow(ArrowKind::incl, sub, full), arrow(ArrowKind::restr, full, bit)})});
        P.relations.push_back({single({arrow(ArrowKind::bdry, bit, top), arrow(ArrowKind::incl, top, bit | top)})});
        sum[{arrow(ArrowKind::restr, full, bit), arrow(ArrowKind::bdry, bit, top)}] = 1;
    }
    P.relations.push_back({sum});
    return P;
}

}

CatPresentation derived_presentation(const FiniteSpace& X) {
    CatPresentation P;
    P.quiver = builtin_quiver(X);
    Composites c(X, P.quiver, object_masks(X));
    if (!c.complete()) throw ComputationError("relation derivation left unresolved connecting maps");
    for (auto& r : c.relations()) P.relations.push_back({r});
    return P;
}

CatPresentation builtin_presentation(const std::string& space_name) {
    FiniteSpace X = builtin_space(space_name);
    if (space_name.size() == 2 && space_name[0] == 'Z') return z_presentation(X, space_name[1] - '0');
    if (space_name == "pt") {
        CatPresentation P;
        P.quiver = builtin_quiver(X);
        return P;
    }
    return derived_presentation(X);
}

std::shared_ptr<Category> make_category(std::string name, std::optional<FiniteSpace> X, CatPresentation P,
                                        int max_len) {
    auto c = std::make_shared<Category>();
    c->name = std::move(name);
    P.check();
    c->table = P.homogeneous() ? hom_closure(P, max_len) : hom_closure_truncated(P, max_len);
    if (X) {
        for (const auto& o : P.quiver.objects) c->masks.push_back(X->parse(o));
        bool lc = std::all_of(c->masks.begin(), c->masks.end(),
                              [&](Mask m) { return X->locally_closed(m) && X->connected(m); });
        c->space = std::move(X);
        if (lc) c->composites = std::make_shared<Composites>(*c->space, P.quiver, c->masks);
    }
    c->pres = std::move(P);
    return c;
}

std::shared_ptr<const Category> builtin_category(const std::string& space_name) {
    static std::mutex mu;
    static std::map<std::string, std::shared_ptr<const Category>> cache;
    std::lock_guard<std::mutex> lock(mu);
    auto it = cache.find(space_name);
    if (it != cache.end()) return it->second;
    auto c = make_category(space_name, builtin_space(space_name), builtin_presentation(space_name));
    c->reconstructed = space_name == "S" || space_name == "C2";
    cache[space_name] = c;
    return c;
}

}
