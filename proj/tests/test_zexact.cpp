#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <functional>
#include <random>

#include "fkt/zexact.hpp"
#include "support.hpp"

using namespace fkt;
using fkt::testing::random_matrix;

namespace {

bool is_unimodular(const IntMatrix& m) { return abs(determinant(m)) == 1; }

// gcd of all k x k minors, by cofactor expansion over chosen rows/columns
Int minor_gcd(const IntMatrix& A, std::size_t k) {
    Int g = 0;
    std::vector<std::size_t> rs, cs;
    std::function<void(std::size_t)> pick_cols;
    std::function<void(std::size_t)> pick_rows = [&](std::size_t from) {
        if (rs.size() == k) {
            pick_cols(0);
            return;
        }
        for (std::size_t i = from; i < A.rows(); ++i) {
            rs.push_back(i);
            pick_rows(i + 1);
            rs.pop_back();
        }
    };
    pick_cols = [&](std::size_t from) {
        if (cs.size() == k) {
            Int d = determinant(A.select_rows(rs).select_cols(cs));
            mpz_gcd(g.get_mpz_t(), g.get_mpz_t(), d.get_mpz_t());
            return;
        }
        for (std::size_t j = from; j < A.cols(); ++j) {
            cs.push_back(j);
            pick_cols(j + 1);
            cs.pop_back();
        }
    };
    pick_rows(0);
    return g;
}

void check_smith(const IntMatrix& A) {
    auto sf = smith(A);
    CHECK(sf.U * A * sf.V == sf.S);
    CHECK(is_unimodular(sf.U));
    CHECK(is_unimodular(sf.V));
    CHECK(sf.U * sf.Uinv == IntMatrix::identity(A.rows()));
    CHECK(sf.V * sf.Vinv == IntMatrix::identity(A.cols()));
    auto d = sf.diagonal();
    for (std::size_t i = 0; i < A.rows(); ++i)
        for (std::size_t j = 0; j < A.cols(); ++j)
            if (i != j) CHECK(sf.S(i, j) == 0);
    for (std::size_t i = 0; i < d.size(); ++i) {
        CHECK(d[i] >= 0);
        if (i + 1 < d.size() && d[i] != 0) CHECK(d[i + 1] % d[i] == 0);
    }
}

}

TEST_CASE("smith on small fixed matrices") {
    auto z = smith(IntMatrix::from_rows({{0}}));
    CHECK(z.S == IntMatrix::from_rows({{0}}));
    CHECK(z.U == IntMatrix::identity(1));
    CHECK(z.V == IntMatrix::identity(1));

    // determinantal divisors: gcd of entries is 2, |det| = 8
    auto a = smith(IntMatrix::from_rows({{2, 4}, {6, 8}}));
    CHECK(a.diagonal() == std::vector<Int>{2, 4});

    auto id = smith(IntMatrix::identity(3));
    CHECK(id.S == IntMatrix::identity(3));
    CHECK(id.U == IntMatrix::identity(3));
    CHECK(id.V == IntMatrix::identity(3));
}

TEST_CASE("smith diagonal matches determinantal divisors") {
    std::mt19937 rng(11);
    for (int t = 0; t < 60; ++t) {
        std::size_t r = 1 + rng() % 4, c = 1 + rng() % 4;
        IntMatrix A = random_matrix(rng, r, c, -6, 6);
        check_smith(A);
        auto d = smith(A).diagonal();
        Int prod = 1;
        for (std::size_t k = 1; k <= std::min(r, c); ++k) {
            Int dk = minor_gcd(A, k);
            Int sk = k <= d.size() ? d[k - 1] : Int(0);
            prod *= sk;
            CHECK(abs(prod) == dk);
        }
    }
}

TEST_CASE("smith keeps exact entries for large values") {
    IntMatrix A(2, 2);
    A(0, 0) = Int("123456789012345678901234567890");
    A(0, 1) = Int("987654321098765432109876543210");
    A(1, 0) = 7;
    A(1, 1) = 11;
    check_smith(A);
}

TEST_CASE("normal forms of presented groups") {
    CHECK(normal_form(Presentation(2, IntMatrix::from_rows({{2, 2}, {2, 2}}))) == AbGroupNF::parse("Z^1 + Z/2"));
    CHECK(normal_form(Presentation(3)) == AbGroupNF{3, {}});
    CHECK(normal_form(Presentation(2, IntMatrix::from_rows({{1, 1}, {1, 1}}))) == AbGroupNF{1, {}});
    CHECK(normal_form(Presentation::cyclic(6)) == AbGroupNF{0, {6}});
    // Z/2 + Z/3 = Z/6
    CHECK(normal_form(Presentation(2, IntMatrix::from_rows({{2, 0}, {0, 3}}))) == AbGroupNF{0, {6}});
}

TEST_CASE("normal form is invariant under unimodular changes") {
    std::mt19937 rng(5);
    for (int t = 0; t < 120; ++t) {
        std::size_t n = 1 + rng() % 4, m = rng() % 5;
        IntMatrix R = random_matrix(rng, n, m, -4, 4);
        AbGroupNF g = normal_form(Presentation(n, R));
        IntMatrix S = R;
        for (int k = 0; k < 8; ++k) {
            std::size_t i = rng() % n, j = rng() % n;
            if (i != j) S.add_row(i, j, Int(int(rng() % 5) - 2));
            if (m > 1) {
                std::size_t a = rng() % m, b = rng() % m;
                if (a != b) S.add_col(a, b, Int(int(rng() % 5) - 2));
                S.swap_cols(a, b);
            }
            S.swap_rows(i, j);
        }
        CHECK(normal_form(Presentation(n, S)) == g);
    }
}

TEST_CASE("kernel examples") {
    IntMatrix K = kernel(IntMatrix::from_rows({{1, 1, 1}}));
    CHECK(K.cols() == 2);
    CHECK((IntMatrix::from_rows({{1, 1, 1}}) * K).is_zero());
    CHECK(in_span(K, {1, -1, 0}));
    CHECK(in_span(K, {0, 1, -1}));
    CHECK(kernel(IntMatrix::identity(3)).cols() == 0);
    IntMatrix K2 = kernel(IntMatrix::from_rows({{2, 2}, {2, 2}}));
    CHECK(K2.cols() == 1);
    CHECK(abs(K2(0, 0)) == 1);
    CHECK(K2(0, 0) == -K2(1, 0));
}

TEST_CASE("kernel is saturated and complete on a brute-force box") {
    std::mt19937 rng(3);
    for (int t = 0; t < 30; ++t) {
        std::size_t r = 1 + rng() % 2, c = 2 + rng() % 2;
        IntMatrix A = random_matrix(rng, r, c, -3, 3);
        IntMatrix K = kernel(A);
        CHECK((A * K).is_zero());
        CHECK(K.cols() + rank(A) == c);
        std::vector<Int> x(c);
        std::function<void(std::size_t)> walk = [&](std::size_t i) {
            if (i == c) {
                if (mat_vec(A, x) == std::vector<Int>(r, 0)) CHECK(in_span(K, x));
                return;
            }
            for (int v = -3; v <= 3; ++v) {
                x[i] = v;
                walk(i + 1);
            }
        };
        walk(0);
    }
}

TEST_CASE("homology of small complexes") {
    Presentation Z2(2);
    auto h = subquotient_homology(IntMatrix(2, 2), Z2, IntMatrix(2, 2), Z2);
    CHECK(h.group == AbGroupNF{2, {}});
    auto ex = subquotient_homology(IntMatrix::identity(1), Presentation(1), IntMatrix(0, 1), Presentation(0));
    CHECK(ex.group.trivial());
    CHECK_THROWS_AS(subquotient_homology(IntMatrix::identity(1), Presentation(1), IntMatrix::identity(1),
                                         Presentation(1)),
                    ComputationError);
}

TEST_CASE("identified S complex has homology Z/2 generated by (0,1,1,0,1)") {
    // Z + Z/2 + Z -> (Z/2)^2 + Z + (Z/2)^2 -> (Z/2)^3
    Presentation B(5, IntMatrix::from_rows({{2, 0, 0, 0}, {0, 2, 0, 0}, {0, 0, 0, 0}, {0, 0, 2, 0}, {0, 0, 0, 2}}));
    Presentation C(3, IntMatrix::identity(3).scaled(2));
    IntMatrix f = IntMatrix::from_rows({{0, 1, 0}, {0, 0, 0}, {-2, 0, 2}, {0, 1, 0}, {0, 0, 0}});
    IntMatrix g = IntMatrix::from_rows({{1, 0, 0, 1, 0}, {0, 1, 1, 0, 0}, {0, 0, 1, 0, 1}});
    Presentation A(3, IntMatrix::from_rows({{0}, {2}, {0}}));
    CHECK(normal_form(A) == AbGroupNF::parse("Z^2 + Z/2"));
    CHECK(normal_form(B) == AbGroupNF::parse("Z^1 + Z/2 + Z/2 + Z/2 + Z/2"));
    CHECK(well_defined(GroupHom{A, B, f}));
    CHECK(well_defined(GroupHom{B, C, g}));
    auto h = subquotient_homology(GroupHom{A, B, f}, GroupHom{B, C, g});
    CHECK(h.group == AbGroupNF{0, {2}});
    auto c = h.class_of({0, 1, 1, 0, 1});
    REQUIRE(c);
    REQUIRE(c->size() == 1);
    CHECK((*c)[0] % 2 != 0);
    CHECK_FALSE(h.class_of({0, 1, 0, 0, 0}));
}

TEST_CASE("homology unchanged when both maps are negated; exact complexes are trivial") {
    std::mt19937 rng(17);
    for (int t = 0; t < 40; ++t) {
        std::size_t a = 1 + rng() % 3, b = 1 + rng() % 4;
        IntMatrix f = random_matrix(rng, b, a, -3, 3);
        IntMatrix g = kernel(f.transpose()).transpose();
        Presentation B(b), C(g.rows());
        auto h1 = subquotient_homology(f, B, g, C);
        auto h2 = subquotient_homology(-f, B, -g, C);
        CHECK(h1.group == h2.group);
        // A -> B -> B/im(A) is exact at B
        Presentation Q(b, f);
        CHECK(subquotient_homology(f, B, IntMatrix::identity(b), Q).group.trivial());
    }
}

TEST_CASE("graded utilities") {
    GradedGroup g{Presentation(1), Presentation()};
    auto s = shift(g);
    CHECK(s.nf()[0].trivial());
    CHECK(s.nf()[1] == AbGroupNF{1, {}});
    std::mt19937 rng(2);
    for (int t = 0; t < 20; ++t) {
        std::size_t n = rng() % 3, m = rng() % 3;
        GradedGroup r{Presentation(n, random_matrix(rng, n, 1, -3, 3)), Presentation(m, random_matrix(rng, m, 1, -3, 3))};
        auto rr = shift(shift(r));
        CHECK(rr.nf() == r.nf());
    }
    // M(5) + four copies of M(ijk5)[1] with M(5) = Z odd and M(ijk5) = Z^2 even
    GradedGroup m5{Presentation(), Presentation(1)};
    GradedGroup ijk{Presentation(2), Presentation()};
    std::vector<GradedGroup> parts{m5};
    for (int i = 0; i < 4; ++i) parts.push_back(shift(ijk));
    auto sum = direct_sum(parts);
    CHECK(sum.nf()[0].trivial());
    CHECK(sum.nf()[1] == AbGroupNF{9, {}});
}

TEST_CASE("group string format") {
    CHECK(AbGroupNF{}.str() == "0");
    CHECK(AbGroupNF{1, {2}}.str() == "Z^1 + Z/2");
    CHECK(AbGroupNF::parse("Z^2 + Z/4 + Z/2") == AbGroupNF::from_invariants(2, {2, 4}));
    CHECK(AbGroupNF::parse(AbGroupNF{3, {2, 6}}.str()) == AbGroupNF{3, {2, 6}});
}
