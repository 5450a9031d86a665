#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <set>

#include "fkt/ntmod.hpp"
#include "support.hpp"

using namespace fkt;
using namespace fkt::testing;

namespace {

std::multiset<std::string> shape(const Category& cat, const std::vector<Summand>& lev) {
    std::multiset<std::string> s;
    for (const auto& x : lev) s.insert(cat.label(x.obj) + (x.shift ? "[1]" : ""));
    return s;
}

using Shape = std::vector<std::multiset<std::string>>;

void check_shape(const std::string& space, const std::string& y, const Shape& want) {
    CAPTURE(space);
    CAPTURE(y);
    auto cat = builtin_category(space);
    auto R = builtin_resolution(space, y);
    REQUIRE(R.extend_to(int(want.size())));
    for (std::size_t n = 0; n < want.size(); ++n) CHECK(shape(*cat, R.levels[n]) == want[n]);
}

GradedModule simple_left(std::shared_ptr<const Category> cat, int y) {
    GradedModule M;
    M.cat = cat;
    for (std::size_t z = 0; z < cat->size(); ++z)
        M.entries.push_back(GradedGroup{Presentation(int(z) == y ? 1 : 0), Presentation()});
    for (const auto& a : cat->pres.quiver.arrows)
        M.actions.push_back(zero_hom(M.entries[a.src], M.entries[a.dst], a.parity));
    return M;
}

bool all_higher_zero(const TorReport& T) {
    for (const auto& [n, g] : T.aggregate)
        if (n >= 1 && !(g[0].trivial() && g[1].trivial())) return false;
    return true;
}

std::array<AbGroupNF, 2> total_mss(const GradedModule& M) {
    std::array<AbGroupNF, 2> s;
    for (const auto& g : m_ss(M))
        for (int q = 0; q < 2; ++q) s[q] = direct_sum(s[q], g[q]);
    return s;
}

}

TEST_CASE("free modules are valid and exact") {
    for (const auto& s : {"Z1", "Z2", "Z3", "S", "C2"}) {
        auto cat = builtin_category(s);
        for (std::size_t y = 0; y < cat->size(); ++y)
            for (auto side : {Variance::left, Variance::right}) {
                CAPTURE(s);
                CAPTURE(cat->label(int(y)));
                auto M = free_module(cat, int(y), side);
                CHECK(validate(M).ok);
                CHECK(check_exact(M).exact);
            }
    }
}

TEST_CASE("free module entries are hom groups") {
    auto cat = builtin_category("Z3");
    int top = cat->object("1234"), four = cat->object("4");
    auto Q = free_module(cat, top, Variance::right);
    auto nf = Q.entries[four].nf();
    CHECK(nf[0].rank + nf[1].rank == cat->table.rank(four, top));
    CHECK(Q.entries[top].nf()[0].rank >= 1);
    auto P = free_module(cat, four, Variance::left, 1);
    CHECK(P.entries[four].nf()[1] == AbGroupNF{1, {}});
}

TEST_CASE("a flipped action breaks a relation") {
    auto cat = builtin_category("Z3");
    auto M = free_module(cat, cat->object("4"), Variance::left);
    int a = cat->pres.quiver.arrow("i_4_14");
    M.actions[a].part[0] = -M.actions[a].part[0];
    auto v = validate(M);
    CHECK_FALSE(v.ok);
    CHECK_FALSE(v.problems.empty());
}

TEST_CASE("a lonely group at an open point is not exact") {
    auto cat = builtin_category("Z3");
    auto M = simple_left(cat, cat->object("4"));
    CHECK(validate(M).ok);
    auto e = check_exact(M);
    CHECK_FALSE(e.exact);
    CHECK(e.first_failure);
}

TEST_CASE("semisimple part") {
    auto cat = builtin_category("C2");
    for (std::size_t y = 0; y < cat->size(); ++y) {
        auto P = free_module(cat, int(y), Variance::left);
        auto ss = m_ss(P);
        for (std::size_t z = 0; z < cat->size(); ++z) {
            CHECK(ss[z][0] == (z == y ? AbGroupNF{1, {}} : AbGroupNF{}));
            CHECK(ss[z][1].trivial());
        }
        auto S = m_ss(simple_left(cat, int(y)));
        CHECK(S[y][0] == AbGroupNF{1, {}});
    }
}

TEST_CASE("known resolution shapes over Z3") {
    check_shape("Z3", "14", {{"14"}, {"4"}, {"1[1]"}});
    check_shape("Z3", "4", {{"4"}, {"1[1]", "2[1]", "3[1]"}, {"1234[1]"}});
    check_shape("Z3", "1", {{"1"}, {"1234"}, {"234"}});
    check_shape("Z3", "124", {{"124"}, {"14", "24"}, {"4"}});
    check_shape("Z3", "1234", {{"1234"}, {"124", "134", "234"}, {"14", "24", "34"}, {"4", "1234[1]"}});
}

TEST_CASE("resolution shapes over the pseudocircle") {
    check_shape("C2", "3", {{"3"}, {"1[1]", "2[1]"}, {"123[1]"}});
    check_shape("C2", "4", {{"4"}, {"1[1]", "2[1]"}, {"124[1]"}});
    check_shape("C2", "134", {{"134"}, {"3", "4"}, {"1[1]"}});
    check_shape("C2", "234", {{"234"}, {"3", "4"}, {"2[1]"}});
    for (const char* y : {"13", "14", "23", "24"}) {
        std::string a(1, y[0]), b(1, y[1]);
        std::string big = a == "1" ? "134" : "234";
        std::string other = b == "3" ? "4" : "3";
        check_shape("C2", y, {{y}, {big}, {other}});
    }
    check_shape("C2", "1234", {{"1234"}, {"134", "234"}, {"3", "4"}});
    check_shape("C2", "123", {{"123"}, {"1234", "13", "23"}, {"134", "234"}, {"4", "123[1]"}});
    check_shape("C2", "124", {{"124"}, {"1234", "14", "24"}, {"134", "234"}, {"3", "124[1]"}});
    check_shape("C2", "1", {{"1"}, {"123", "124"}, {"1234", "23", "24"}, {"234", "1[1]"}});
    check_shape("C2", "2", {{"2"}, {"123", "124"}, {"1234", "13", "14"}, {"134", "2[1]"}});
}

TEST_CASE("resolution of the top of Z4") {
    check_shape("Z4", "12345",
                {{"12345"},
                 {"1235", "1245", "1345", "2345"},
                 {"125", "135", "145", "235", "245", "345"},
                 {"15", "25", "35", "45", "12345[1]"},
                 {"5", "1235[1]", "1245[1]", "1345[1]", "2345[1]"}});
}

TEST_CASE("every shipped resolution squares to zero and is exact") {
    for (const auto& s : {"Z3", "C2", "Z4"}) {
        auto cat = builtin_category(s);
        for (std::size_t y = 0; y < cat->size(); ++y) {
            if (!has_builtin_resolution(s, cat->label(int(y)))) continue;
            CAPTURE(s);
            CAPTURE(cat->label(int(y)));
            auto R = builtin_resolution(s, cat->label(int(y)));
            R.extend_to(7);
            auto c = check_resolution(*cat, R);
            CHECK(c.squares_zero);
            CHECK(c.exact);
        }
    }
    CHECK(has_builtin_resolution("Z4", "12345"));
    CHECK_FALSE(has_builtin_resolution("Z4", "5"));
}

TEST_CASE("generic engine on small categories") {
    auto pt = builtin_category("pt");
    auto R = resolve_simple(*pt, 0, 3);
    CHECK(R.finite);
    CHECK(R.depth() == 0);
    auto z3 = builtin_category("Z3");
    for (std::size_t y = 0; y < z3->size(); ++y) {
        auto G = resolve_simple(*z3, int(y), 5);
        auto c = check_resolution(*z3, G);
        CHECK(c.squares_zero);
        CHECK(c.exact);
    }
}

TEST_CASE("cokernels of trivial maps") {
    auto cat = builtin_category("Z3");
    int y = cat->object("14");
    FreeMap id;
    id.source = id.target = {{y, 0}};
    id.entry = {{id_coeffs(*cat, y, 1)}};
    auto Z = coker_module(cat, id);
    for (const auto& e : Z.entries) CHECK(e.trivial());
    FreeMap zero;
    zero.source = zero.target = {{y, 0}};
    zero.entry = {{Coeffs{}}};
    auto F = coker_module(cat, zero);
    auto P = free_module(cat, y, Variance::left);
    for (std::size_t z = 0; z < cat->size(); ++z) CHECK(F.entries[z].nf() == P.entries[z].nf());
    FreeMap bad = id;
    bad.entry[0][0].push_back(0);
    CHECK_THROWS_AS(coker_module(cat, bad), ParseError);
}

TEST_CASE("the Z4 module of projective dimension two") {
    auto cat = builtin_category("Z4");
    auto M = coker_module(cat, z4_beta(*cat));
    CHECK(validate(M).ok);
    CHECK(check_exact(M).exact);
    auto entry = [&](const std::string& y) { return M.entries[cat->object(y)].nf(); };
    AbGroupNF Z1{1, {}}, Z2{2, {}}, Z3{3, {}};
    for (const char* y : {"15", "25", "35", "45"}) CHECK(entry(y) == std::array<AbGroupNF, 2>{});
    CHECK(entry("12345") == std::array<AbGroupNF, 2>{Z3, {}});
    std::size_t jk = 0;
    for (const auto& y : z4_rows()) jk += entry(y)[0].rank;
    CHECK(jk == 6);
    CHECK(entry("5") == std::array<AbGroupNF, 2>{AbGroupNF{}, Z1});
    for (const auto& y : z4_cols()) CHECK(entry(y) == std::array<AbGroupNF, 2>{Z2, {}});

    auto T = tor(M, {0, 1, 2, 3});
    CHECK(T.per_object.at("12345").at(2)[0] == Z1);
    CHECK(T.per_object.at("12345").at(2)[1].trivial());
    CHECK(T.aggregate.at(2)[0] == Z1);
    CHECK(T.aggregate.at(3)[0].trivial());
    auto pd = projective_dimension(M, 4);
    REQUIRE(pd.pd);
    CHECK(*pd.pd == 2);
}

TEST_CASE("M tensor Z/k has projective dimension three") {
    auto cat = builtin_category("Z4");
    auto M = coker_module(cat, z4_beta(*cat));
    for (long k : {2, 3, 5}) {
        CAPTURE(k);
        auto Mk = tensor_mod_k(M, k);
        CHECK(validate(Mk).ok);
        auto T = tor(Mk, {2});
        CHECK(T.per_object.at("12345").at(2)[0] == AbGroupNF{0, {Int(k)}});
        auto pd = projective_dimension(Mk, 4);
        REQUIRE(pd.pd);
        CHECK(*pd.pd == 3);
        // the explicit length-3 free resolution
        auto chain = z4_mk_resolution(*cat, k);
        auto c = check_free_left_complex(*cat, chain);
        CHECK(c.squares_zero);
        CHECK(c.exact);
        CHECK(c.injective);
        auto C = coker_module(cat, chain[0]);
        for (std::size_t y = 0; y < cat->size(); ++y) CHECK(C.entries[y].nf() == Mk.entries[y].nf());
    }
}

TEST_CASE("projective modules have no higher Tor") {
    for (const auto& s : {"Z3", "S", "C2"}) {
        auto cat = builtin_category(s);
        for (std::size_t y = 0; y < cat->size(); ++y) {
            auto P = free_module(cat, int(y), Variance::left, int(y) % 2);
            auto T = tor(P, {0, 1, 2, 3});
            CHECK(all_higher_zero(T));
            auto pd = projective_dimension(P, 2);
            REQUIRE(pd.pd);
            CHECK(*pd.pd == 0);
        }
    }
}

TEST_CASE("Tor_0 is the semisimple part") {
    std::mt19937 rng(21);
    for (const auto& s : {"Z3", "S", "C2"}) {
        auto cat = builtin_category(s);
        for (int t = 0; t < 50; ++t) {
            auto M = random_module(cat, rng);
            auto T = tor(M, {0});
            CHECK(T.aggregate.at(0) == total_mss(M));
        }
    }
}

TEST_CASE("generic and catalogued engines agree") {
    std::mt19937 rng(99);
    auto z3 = builtin_category("Z3");
    for (int t = 0; t < 25; ++t) {
        auto M = random_module(z3, rng);
        auto a = tor(M, {0, 1, 2, 3}, {Engine::builtin, true});
        auto b = tor(M, {0, 1, 2, 3}, {Engine::generic, true});
        CHECK(tor_equal(a, b));
    }
    auto c2 = builtin_category("C2");
    for (int t = 0; t < 5; ++t) {
        auto M = random_module(c2, rng);
        CHECK(tor_equal(tor(M, {1, 2}, {Engine::builtin, true}), tor(M, {1, 2}, {Engine::generic, true})));
    }
}

TEST_CASE("parallel and serial Tor agree") {
    std::mt19937 rng(4);
    auto z3 = builtin_category("Z3");
    for (int t = 0; t < 10; ++t) {
        auto M = random_module(z3, rng);
        CHECK(tor_equal(tor(M, {0, 1, 2}), tor_serial(M, {0, 1, 2})));
    }
}

TEST_CASE("negating every odd action leaves Tor unchanged") {
    std::mt19937 rng(8);
    for (const auto& s : {"Z3", "S"}) {
        auto cat = builtin_category(s);
        for (int t = 0; t < 10; ++t) {
            auto M = random_module(cat, rng);
            auto N = negate_odd(M);
            CHECK(validate(N).ok);
            CHECK(tor_equal(tor(M, {0, 1, 2}), tor(N, {0, 1, 2})));
        }
    }
}

TEST_CASE("rational Tor") {
    auto cat = builtin_category("Z4");
    auto M = coker_module(cat, z4_beta(*cat));
    CHECK(rational_tor(M, 2) == 1);
    auto Mk = tensor_mod_k(M, 3);
    CHECK(rational_tor(Mk, 2) == 0);
    CHECK(rational_tor(Mk, 0) == 0);
    CHECK_THROWS_AS(tensor_mod_k(M, 1), ComputationError);
}

TEST_CASE("closures refuse a loop that never dies") {
    CatPresentation P;
    P.quiver.objects = {"x"};
    P.quiver.arrows = {Arrow{0, 0, "e", 0, ArrowKind::incl}};
    PathSum r;
    r[{0, 0}] = 1;
    r[{0}] = -1;
    P.relations.push_back({r});
    CHECK_THROWS_AS(make_category("idempotent", std::nullopt, P), HypothesisError);

    // a composite named by a third arrow is fine
    CatPresentation Q;
    Q.quiver.objects = {"x", "y", "z"};
    Q.quiver.arrows = {Arrow{0, 1, "f", 0, ArrowKind::incl}, Arrow{1, 2, "g", 0, ArrowKind::incl},
                       Arrow{0, 2, "k", 0, ArrowKind::incl}};
    PathSum s;
    s[{0, 1}] = 1;
    s[{2}] = -1;
    Q.relations.push_back({s});
    auto cat = make_category("triangle", std::nullopt, Q);
    CHECK(cat->table.total_rank() == 6);
    auto M = free_module(cat, 0, Variance::left);
    CHECK(validate(M).ok);
    auto pd = projective_dimension(M, 2);
    REQUIRE(pd.pd);
    CHECK(*pd.pd == 0);
}
