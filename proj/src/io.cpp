#include "fkt/io.hpp"

#include <fstream>

namespace fkt {

namespace {

const Json& field(const Json& j, const char* key) {
    if (!j.is_object() || !j.contains(key)) throw ParseError(std::string("missing field '") + key + "'");
    return j.at(key);
}

template <class F>
auto guarded(F&& f) {
    try {
        return f();
    } catch (const Json::exception& e) {
        throw ParseError(e.what());
    }
}

const char* kind_name(ArrowKind k) { return k == ArrowKind::incl ? "i" : k == ArrowKind::restr ? "r" : "d"; }

ArrowKind kind_from(const std::string& s) {
    if (s == "i" || s == "incl") return ArrowKind::incl;
    if (s == "r" || s == "restr") return ArrowKind::restr;
    if (s == "d" || s == "delta" || s == "bdry") return ArrowKind::bdry;
    throw ParseError("unknown arrow kind '" + s + "'");
}

Json path_sum_to_json(const GradedQuiver& Q, const PathSum& s) {
    Json out = Json::array();
    for (const auto& [p, c] : s) {
        Json path = Json::array();
        for (int a : p) path.push_back(Q.arrows[a].name);
        out.push_back({{"coeff", int_to_json(c)}, {"path", path}});
    }
    return out;
}

PathSum path_sum_from_json(const GradedQuiver& Q, const Json& j) {
    PathSum s;
    for (const auto& t : j) {
        Path p;
        for (const auto& n : field(t, "path")) p.push_back(Q.arrow(n.get<std::string>()));
        if (p.empty()) throw ParseError("empty path in relation");
        Int c = t.contains("coeff") ? int_from_json(t.at("coeff")) : Int(1);
        s[p] += c;
    }
    return s;
}

std::string graded_part_name(int q) { return q ? "odd" : "even"; }

}

Json int_to_json(const Int& x) {
    if (x.fits_slong_p()) return Json(x.get_si());
    return Json(x.get_str());
}

Int int_from_json(const Json& j) {
    if (j.is_number_integer()) return Int(j.get<long>());
    if (j.is_string()) {
        Int x;
        if (x.set_str(j.get<std::string>(), 10) != 0) throw ParseError("not an integer: " + j.get<std::string>());
        return x;
    }
    throw ParseError("expected an integer, got " + j.dump());
}

Json matrix_to_json(const IntMatrix& m) {
    Json out = Json::array();
    for (std::size_t i = 0; i < m.rows(); ++i) {
        Json row = Json::array();
        for (std::size_t k = 0; k < m.cols(); ++k) row.push_back(int_to_json(m(i, k)));
        out.push_back(row);
    }
    return out;
}

IntMatrix matrix_from_json(const Json& j, std::size_t rows, std::size_t cols) {
    if (!j.is_array() || j.size() != rows)
        throw ParseError("expected a matrix with " + std::to_string(rows) + " rows");
    IntMatrix m(rows, cols);
    for (std::size_t i = 0; i < rows; ++i) {
        if (!j[i].is_array() || j[i].size() != cols)
            throw ParseError("expected rows of length " + std::to_string(cols));
        for (std::size_t k = 0; k < cols; ++k) m(i, k) = int_from_json(j[i][k]);
    }
    return m;
}

Json space_to_json(const FiniteSpace& X) {
    Json opens = Json::array();
    for (Mask o : X.opens()) opens.push_back(X.point_list(o));
    return {{"name", X.name()}, {"points", X.points()}, {"opens", opens}};
}

FiniteSpace space_from_json(const Json& j) {
    return guarded([&] {
        if (j.is_string()) return builtin_space(j.get<std::string>());
        auto pts = field(j, "points").get<std::vector<std::string>>();
        auto opens = field(j, "opens").get<std::vector<std::vector<std::string>>>();
        std::string name = j.contains("name") ? j.at("name").get<std::string>() : "X";
        return FiniteSpace::from_lists(name, pts, opens);
    });
}

Json presentation_to_json(const CatPresentation& P) {
    Json arrows = Json::array();
    for (const auto& a : P.quiver.arrows)
        arrows.push_back({{"src", P.quiver.objects[a.src]},
                          {"dst", P.quiver.objects[a.dst]},
                          {"name", a.name},
                          {"parity", a.parity},
                          {"kind", kind_name(a.kind)}});
    Json rels = Json::array();
    for (const auto& r : P.relations) rels.push_back(path_sum_to_json(P.quiver, r.terms));
    return {{"objects", P.quiver.objects}, {"arrows", arrows}, {"relations", rels}};
}

CatPresentation presentation_from_json(const Json& j) {
    return guarded([&] {
        CatPresentation P;
        P.quiver.objects = field(j, "objects").get<std::vector<std::string>>();
        for (const auto& a : field(j, "arrows")) {
            Arrow ar;
            ar.src = P.quiver.object(field(a, "src").get<std::string>());
            ar.dst = P.quiver.object(field(a, "dst").get<std::string>());
            ar.name = field(a, "name").get<std::string>();
            ar.parity = a.value("parity", 0);
            if (ar.parity != 0 && ar.parity != 1) throw ParseError("parity must be 0 or 1");
            ar.kind = kind_from(a.value("kind", ar.parity ? "d" : "i"));
            P.quiver.arrows.push_back(ar);
        }
        if (j.contains("relations"))
            for (const auto& r : j.at("relations")) P.relations.push_back({path_sum_from_json(P.quiver, r)});
        P.check();
        return P;
    });
}

std::shared_ptr<Category> category_from_json(const Json& j) {
    return guarded([&] {
        std::optional<FiniteSpace> X;
        if (j.contains("space")) X = space_from_json(j.at("space"));
        auto P = presentation_from_json(j);
        return make_category(j.value("name", std::string("custom")), X, std::move(P));
    });
}

Json table_to_json(const Category& cat) {
    const auto& T = cat.table;
    const auto& Q = cat.pres.quiver;
    Json basis = Json::array();
    for (std::size_t id = 0; id < T.num_elems(); ++id) {
        const auto& e = T.elem(int(id));
        Json word = Json::array();
        for (int a : e.word) word.push_back(Q.arrows[a].name);
        basis.push_back({{"src", Q.objects[e.src]}, {"dst", Q.objects[e.dst]}, {"parity", e.parity}, {"word", word}});
    }
    // [a, b, c, coeff]: basis element b after a has coefficient coeff on c
    Json consts = Json::array();
    for (std::size_t a = 0; a < T.num_elems(); ++a)
        for (std::size_t b = 0; b < T.num_elems(); ++b) {
            if (T.elem(int(a)).dst != T.elem(int(b)).src) continue;
            const auto& h = T.hom(T.elem(int(a)).src, T.elem(int(b)).dst);
            for (const auto& [p, c] : T.compose_basis(int(a), int(b)))
                consts.push_back({a, b, h[p], int_to_json(c)});
        }
    return {{"name", cat.name}, {"basis", basis}, {"structure", consts}};
}

Json group_to_json(const Presentation& P) {
    Json rels = Json::array();
    for (std::size_t k = 0; k < P.rels.cols(); ++k) {
        Json v = Json::array();
        for (const auto& x : P.rels.col(k)) v.push_back(int_to_json(x));
        rels.push_back(v);
    }
    return {{"gens", P.gens}, {"rels", rels}};
}

Presentation group_from_json(const Json& j) {
    return guarded([&] {
        std::size_t n = field(j, "gens").get<std::size_t>();
        if (!j.contains("rels")) return Presentation(n);
        const auto& rs = j.at("rels");
        IntMatrix R = matrix_from_json(rs, rs.size(), n).transpose();
        return Presentation(n, R);
    });
}

Json module_to_json(const GradedModule& M) {
    const auto& cat = *M.cat;
    Json entries = Json::object(), actions = Json::object();
    for (std::size_t y = 0; y < cat.size(); ++y)
        entries[cat.label(int(y))] = {{"even", group_to_json(M.entries[y].even)},
                                      {"odd", group_to_json(M.entries[y].odd)}};
    for (std::size_t a = 0; a < cat.pres.quiver.arrows.size(); ++a)
        actions[cat.pres.quiver.arrows[a].name] = {{"evenPart", matrix_to_json(M.actions[a].part[0])},
                                                   {"oddPart", matrix_to_json(M.actions[a].part[1])}};
    return {{"space", cat.name},
            {"variance", M.variance == Variance::left ? "left" : "right"},
            {"entries", entries},
            {"actions", actions}};
}

FreeMap free_map_from_json(const Category& cat, const Json& j) {
    return guarded([&] {
        FreeMap f;
        auto summands = [&](const Json& list) {
            std::vector<Summand> out;
            for (const auto& s : list) {
                if (s.is_string()) out.push_back({cat.object(s.get<std::string>()), 0});
                else out.push_back({cat.object(field(s, "object").get<std::string>()), s.value("shift", 0)});
            }
            return out;
        };
        f.source = summands(field(j, "source"));
        f.target = summands(field(j, "target"));
        f.entry.assign(f.target.size(), std::vector<Coeffs>(f.source.size()));
        for (const auto& e : field(j, "entries")) {
            std::size_t r = field(e, "row").get<std::size_t>(), c = field(e, "col").get<std::size_t>();
            if (r >= f.target.size() || c >= f.source.size()) throw ParseError("entry outside the matrix");
            int y = f.target[r].obj, z = f.source[c].obj;
            Coeffs acc(cat.table.rank(y, z));
            for (const auto& t : field(e, "terms")) {
                std::vector<std::string> w = field(t, "path").get<std::vector<std::string>>();
                Coeffs v = cat.word(w);
                const auto& a0 = cat.pres.quiver.arrows[cat.pres.quiver.arrow(w.front())];
                const auto& a1 = cat.pres.quiver.arrows[cat.pres.quiver.arrow(w.back())];
                if (a0.src != y || a1.dst != z)
                    throw ParseError("entry (" + std::to_string(r) + ", " + std::to_string(c) +
                                     ") must run from " + cat.label(y) + " to " + cat.label(z));
                Int k = t.contains("coeff") ? int_from_json(t.at("coeff")) : Int(1);
                for (std::size_t i = 0; i < acc.size(); ++i) acc[i] += k * v[i];
            }
            f.entry[r][c] = acc;
        }
        return f;
    });
}

GradedModule module_from_json(const Json& j, std::shared_ptr<const Category> cat) {
    return guarded([&] {
        if (!cat) {
            const auto& s = field(j, "space");
            if (s.is_string()) cat = builtin_category(s.get<std::string>());
            else cat = category_from_json(s);
        }
        if (j.contains("cokernel")) return coker_module(cat, free_map_from_json(*cat, j.at("cokernel")));
        GradedModule M;
        M.cat = cat;
        M.variance = j.value("variance", std::string("left")) == "right" ? Variance::right : Variance::left;
        const auto& es = field(j, "entries");
        for (std::size_t y = 0; y < cat->size(); ++y) {
            const auto& lbl = cat->label(int(y));
            GradedGroup g;
            if (es.contains(lbl)) {
                const auto& e = es.at(lbl);
                if (e.contains("even")) g.even = group_from_json(e.at("even"));
                if (e.contains("odd")) g.odd = group_from_json(e.at("odd"));
            }
            M.entries.push_back(g);
        }
        for (const auto& [k, v] : es.items()) cat->object(k);
        const auto& as = j.contains("actions") ? j.at("actions") : Json::object();
        for (const auto& [k, v] : as.items()) cat->pres.quiver.arrow(k);
        for (const auto& a : cat->pres.quiver.arrows) {
            int src = a.src, dst = a.dst;
            if (M.variance == Variance::right) std::swap(src, dst);
            GradedHom h;
            h.degree = a.parity;
            for (int q = 0; q < 2; ++q) {
                std::size_t rows = M.entries[dst].part(q ^ a.parity).gens, cols = M.entries[src].part(q).gens;
                const char* key = q ? "oddPart" : "evenPart";
                if (as.contains(a.name) && as.at(a.name).contains(key))
                    h.part[q] = matrix_from_json(as.at(a.name).at(key), rows, cols);
                else
                    h.part[q] = IntMatrix(rows, cols);
            }
            M.actions.push_back(h);
        }
        return M;
    });
}

Json graph_to_json(const BlockGraph& G) {
    Json blocks = Json::array();
    for (const auto& b : G.blocks) blocks.push_back({{"point", b.point}, {"vertices", b.vertices}});
    return {{"space", G.space_name}, {"blocks", blocks}, {"adjacency", matrix_to_json(G.adjacency)}};
}

BlockGraph graph_from_json(const Json& j) {
    return guarded([&] {
        std::string sp = field(j, "space").get<std::string>();
        std::vector<GraphBlock> blocks;
        std::size_t n = 0;
        for (const auto& b : field(j, "blocks")) {
            blocks.push_back({field(b, "point").get<std::string>(), field(b, "vertices").get<int>()});
            n += std::size_t(std::max(0, blocks.back().vertices));
        }
        IntMatrix A = matrix_from_json(field(j, "adjacency"), n, n);
        return BlockGraph(sp, builtin_space(sp), blocks, A);
    });
}

Json tor_to_json(const TorReport& T) {
    Json out = Json::object();
    for (const auto& [y, m] : T.per_object) {
        Json per = Json::object();
        for (const auto& [n, g] : m)
            per[std::to_string(n)] = {{graded_part_name(0), g[0].str()}, {graded_part_name(1), g[1].str()}};
        out[y] = per;
    }
    return out;
}

TorReport tor_from_json(const Json& j) {
    return guarded([&] {
        TorReport T;
        for (const auto& [y, per] : j.items())
            for (const auto& [n, g] : per.items()) {
                int d = std::stoi(n);
                std::array<AbGroupNF, 2> v{AbGroupNF::parse(field(g, "even").get<std::string>()),
                                           AbGroupNF::parse(field(g, "odd").get<std::string>())};
                T.per_object[y][d] = v;
                auto& agg = T.aggregate[d];
                for (int q = 0; q < 2; ++q) agg[q] = direct_sum(agg[q], v[q]);
            }
        return T;
    });
}

Json load_json(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw ParseError("cannot open '" + path + "'");
    try {
        return Json::parse(in);
    } catch (const Json::exception& e) {
        throw ParseError(path + ": " + e.what());
    }
}

}
