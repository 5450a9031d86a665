#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <set>

#include "fkt/ntcat.hpp"

using namespace fkt;

namespace {

const std::vector<std::string> kSpaces{"pt", "Z1", "Z2", "Z3", "Z4", "S", "C2"};

Coeffs add(Coeffs a, const Coeffs& b) {
    for (std::size_t i = 0; i < a.size(); ++i) a[i] += b[i];
    return a;
}

void check_table(const HomTable& T) {
    std::size_t n = T.num_objects();
    for (std::size_t y = 0; y < n; ++y) {
        int id = T.identity(int(y));
        CHECK(T.elem(id).parity == 0);
        for (std::size_t z = 0; z < n; ++z)
            for (int a : T.hom(int(y), int(z))) {
                Coeffs ua = T.unit(a);
                CHECK(T.compose(int(y), int(y), int(z), T.unit(id), ua) == ua);
                CHECK(T.compose(int(y), int(z), int(z), ua, T.unit(T.identity(int(z)))) == ua);
            }
    }
    for (std::size_t y = 0; y < n; ++y)
        for (std::size_t z = 0; z < n; ++z)
            for (int a : T.hom(int(y), int(z)))
                for (std::size_t w = 0; w < n; ++w)
                    for (int b : T.hom(int(z), int(w))) {
                        Coeffs ab = T.compose(int(y), int(z), int(w), T.unit(a), T.unit(b));
                        for (std::size_t p = 0; p < ab.size(); ++p)
                            if (ab[p] != 0)
                                CHECK(T.elem(T.hom(int(y), int(w))[p]).parity ==
                                      (T.elem(a).parity ^ T.elem(b).parity));
                        for (std::size_t v = 0; v < n; ++v)
                            for (int c : T.hom(int(w), int(v))) {
                                Coeffs left = T.compose(int(y), int(w), int(v), ab, T.unit(c));
                                Coeffs bc = T.compose(int(z), int(w), int(v), T.unit(b), T.unit(c));
                                Coeffs right = T.compose(int(y), int(z), int(v), T.unit(a), bc);
                                CHECK(left == right);
                            }
                    }
}

std::vector<std::size_t> ranks(const HomTable& T) {
    std::vector<std::size_t> r;
    for (std::size_t y = 0; y < T.num_objects(); ++y)
        for (std::size_t z = 0; z < T.num_objects(); ++z) r.push_back(T.rank(int(y), int(z)));
    return r;
}

}

TEST_CASE("one object without arrows") {
    CatPresentation P;
    P.quiver.objects = {"x"};
    auto T = hom_closure(P, 4);
    CHECK(T.total_rank() == 1);
    CHECK(T.rank(0, 0) == 1);
    auto d = ideal_checks(T, P.quiver);
    CHECK(d.nil_rank == 0);
    CHECK(d.nilpotent);
    CHECK(d.semidirect);
}

TEST_CASE("malformed relations are rejected") {
    CatPresentation P;
    P.quiver.objects = {"a", "b"};
    P.quiver.arrows = {Arrow{0, 1, "f", 0, ArrowKind::incl}, Arrow{1, 0, "g", 1, ArrowKind::bdry}};
    PathSum r;
    r[{0}] = 1;
    r[{0, 1}] = 1;
    P.relations.push_back({r});
    CHECK_THROWS_AS(P.check(), ParseError);
    PathSum s;
    s[{0, 1, 0}] = 1;
    s[{0}] = -1;
    P.relations = {{s}};
    CHECK_THROWS_AS(P.check(), ParseError);
}

TEST_CASE("builtin object and arrow data") {
    CHECK(builtin_category("Z4")->size() == 20);
    CHECK(builtin_category("Z3")->size() == 11);
    auto S = builtin_category("S");
    CHECK(S->size() == 11);
    for (const char* a : {"r_123_12", "d_12_34", "i_34_234", "i_234_1234"}) CHECK_NOTHROW(S->pres.quiver.arrow(a));
    CHECK(S->reconstructed);
    CHECK(builtin_category("C2")->reconstructed);
    CHECK_FALSE(builtin_category("Z3")->reconstructed);
    CHECK_THROWS_AS(builtin_category("nowhere"), ParseError);

    // the Z3 quiver is the m = 3 pattern: i along inclusions of sets containing 4, r from 1234 to l, d from l to 4
    auto z3 = builtin_category("Z3");
    std::set<std::string> names;
    for (const auto& a : z3->pres.quiver.arrows) names.insert(a.name);
    for (const char* a : {"i_4_14", "i_14_124", "i_124_1234", "r_1234_1", "d_1_4", "i_34_234"}) CHECK(names.count(a));
    for (const auto& a : z3->pres.quiver.arrows) CHECK(a.parity == (a.kind == ArrowKind::bdry ? 1 : 0));
}

TEST_CASE("the four maps out of the top of Z4 sum to zero") {
    auto c = builtin_category("Z4");
    Coeffs sum(c->table.rank(c->object("12345"), c->object("5")));
    for (int l = 1; l <= 4; ++l) {
        std::string p = std::to_string(l);
        sum = add(sum, c->word({"r_12345_" + p, "d_" + p + "_5"}));
    }
    CHECK(sum == Coeffs(sum.size(), 0));
    Coeffs one = c->word({"r_12345_1", "d_1_5"});
    CHECK(one != Coeffs(one.size(), 0));
}

TEST_CASE("endomorphisms of the whole pseudocircle") {
    auto c = builtin_category("C2");
    int top = c->object("1234");
    const auto& T = c->table;
    REQUIRE(T.rank(top, top) == 2);
    std::multiset<int> par;
    int odd = -1;
    for (int e : T.hom(top, top)) {
        par.insert(T.elem(e).parity);
        if (T.elem(e).parity) odd = e;
    }
    CHECK(par == std::multiset<int>{0, 1});
    Coeffs sq = T.compose(top, top, top, T.unit(odd), T.unit(odd));
    CHECK(sq == Coeffs(2, 0));
}

TEST_CASE("tables are associative, unital and parity additive") {
    for (const auto& s : kSpaces) {
        CAPTURE(s);
        check_table(builtin_category(s)->table);
    }
}

TEST_CASE("every relation evaluates to zero") {
    for (const auto& s : kSpaces) {
        auto c = builtin_category(s);
        for (const auto& r : c->pres.relations) {
            int src = c->pres.quiver.arrows[r.terms.begin()->first.front()].src;
            Coeffs v = c->table.eval(src, r.terms);
            CHECK(v == Coeffs(v.size(), 0));
        }
    }
}

TEST_CASE("graded and truncated closures agree") {
    for (const auto& s : {"Z1", "Z2", "Z3", "S", "C2"}) {
        CAPTURE(s);
        auto P = builtin_presentation(s);
        auto a = hom_closure(P, 40);
        auto b = hom_closure_truncated(P, 40);
        CHECK(ranks(a) == ranks(b));
    }
}

TEST_CASE("hom ranks") {
    std::map<std::string, std::size_t> total{{"pt", 1}, {"Z1", 6}, {"Z2", 20}, {"Z3", 65},
                                             {"Z4", 230}, {"S", 65}, {"C2", 106}};
    for (const auto& [s, n] : total) CHECK(builtin_category(s)->table.total_rank() == n);
}

TEST_CASE("nilpotent ideal and semidirect splitting") {
    for (const auto& s : kSpaces) {
        CAPTURE(s);
        auto c = builtin_category(s);
        auto d = ideal_checks(c->table, c->pres.quiver);
        CHECK(d.nilpotent);
        CHECK(d.semidirect);
        CHECK(d.ss_basis.size() == c->size());
        CHECK(d.nil_rank + c->size() == c->table.total_rank());
        REQUIRE(d.nilpotency_index);
        CHECK(*d.nilpotency_index <= c->table.max_level() + 1);
    }
}

TEST_CASE("identities span a copy of Z^objects") {
    auto c = builtin_category("Z3");
    const auto& T = c->table;
    for (std::size_t y = 0; y < c->size(); ++y) {
        int id = T.identity(int(y));
        Coeffs sq = T.compose(int(y), int(y), int(y), T.unit(id), T.unit(id));
        CHECK(sq == T.unit(id));
    }
}

TEST_CASE("composites for exactness are available") {
    for (const auto& s : {"Z3", "Z4", "S", "C2"}) {
        auto c = builtin_category(s);
        REQUIRE(c->composites);
        CHECK(c->composites->complete());
    }
    auto c = builtin_category("Z3");
    const auto& X = *c->space;
    auto d = c->composites->delta(X.parse("14"), X.parse("23"));
    CHECK_FALSE(d.has_value());
    auto e = c->composites->delta(X.parse("14"), X.parse("2"));
    REQUIRE(e);
    Coeffs v = c->table.eval(c->object("2"), *e);
    CHECK(v != Coeffs(v.size(), 0));
}
