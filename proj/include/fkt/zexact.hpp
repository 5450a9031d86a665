#pragma once
#include <gmpxx.h>

#include <array>
#include <cstddef>
#include <optional>
#include <stdexcept>
#include <string>
#include <vector>

namespace fkt {

using Int = mpz_class;

struct Error : std::runtime_error {
    using std::runtime_error::runtime_error;
};
// input does not match a schema
struct ParseError : Error {
    using Error::Error;
};
// structural precondition of the criterion could not be machine-verified
struct HypothesisError : Error {
    using Error::Error;
};
struct ComputationError : Error {
    using Error::Error;
};

class IntMatrix {
public:
    IntMatrix() = default;
    IntMatrix(std::size_t rows, std::size_t cols) : r_(rows), c_(cols), a_(rows * cols) {}

    static IntMatrix identity(std::size_t n);
    static IntMatrix from_rows(const std::vector<std::vector<long>>& rows);
    static IntMatrix from_rows(const std::vector<std::vector<Int>>& rows, std::size_t cols);
    static IntMatrix column(const std::vector<Int>& v);

    std::size_t rows() const { return r_; }
    std::size_t cols() const { return c_; }
    Int& operator()(std::size_t i, std::size_t j) { return a_[i * c_ + j]; }
    const Int& operator()(std::size_t i, std::size_t j) const { return a_[i * c_ + j]; }

    IntMatrix operator*(const IntMatrix& o) const;
    IntMatrix operator+(const IntMatrix& o) const;
    IntMatrix operator-(const IntMatrix& o) const;
    IntMatrix operator-() const;
    IntMatrix scaled(const Int& k) const;
    IntMatrix& operator+=(const IntMatrix& o);
    bool operator==(const IntMatrix& o) const;

    IntMatrix transpose() const;
    bool is_zero() const;
    IntMatrix block(std::size_t r0, std::size_t c0, std::size_t nr, std::size_t nc) const;
    void set_block(std::size_t r0, std::size_t c0, const IntMatrix& b);
    void add_block(std::size_t r0, std::size_t c0, const IntMatrix& b);
    IntMatrix select_rows(const std::vector<std::size_t>& idx) const;
    IntMatrix select_cols(const std::vector<std::size_t>& idx) const;
    std::vector<Int> col(std::size_t j) const;
    void swap_rows(std::size_t i, std::size_t j);
    void swap_cols(std::size_t i, std::size_t j);
    // row_i += k * row_j
    void add_row(std::size_t i, std::size_t j, const Int& k);
    void add_col(std::size_t i, std::size_t j, const Int& k);

    static IntMatrix hcat(const IntMatrix& a, const IntMatrix& b);
    static IntMatrix vcat(const IntMatrix& a, const IntMatrix& b);
    static IntMatrix diag_sum(const IntMatrix& a, const IntMatrix& b);

    std::string str() const;

private:
    std::size_t r_ = 0, c_ = 0;
    std::vector<Int> a_;
};

std::vector<Int> mat_vec(const IntMatrix& a, const std::vector<Int>& v);

struct SmithForm {
    IntMatrix U, S, V;
    IntMatrix Uinv, Vinv;
    std::size_t rank = 0;
    std::vector<Int> diagonal() const;
};

// U*A*V = S with d1 | d2 | ... ; pivot = smallest nonzero absolute value
SmithForm smith(const IntMatrix& A);

// column echelon form: A*T = H, first `rank` columns of H nonzero and in echelon shape
struct ColumnEchelon {
    IntMatrix H, T;
    std::size_t rank = 0;
    std::vector<std::size_t> pivot_rows;
};
ColumnEchelon column_echelon(const IntMatrix& A);

std::size_t rank(const IntMatrix& A);
Int determinant(const IntMatrix& A);

// columns form a basis of {x : A x = 0}
IntMatrix kernel(const IntMatrix& A);
// basis of the lattice spanned by the columns
IntMatrix lattice_basis(const IntMatrix& gens);
// x with A x = b, if one exists over Z
std::optional<std::vector<Int>> solve(const IntMatrix& A, const std::vector<Int>& b);
// X with A X = B, if one exists
std::optional<IntMatrix> solve(const IntMatrix& A, const IntMatrix& B);
bool in_span(const IntMatrix& gens, const std::vector<Int>& v);

struct AbGroupNF {
    std::size_t rank = 0;
    std::vector<Int> torsion;

    bool trivial() const { return rank == 0 && torsion.empty(); }
    bool free() const { return torsion.empty(); }
    std::string str() const;
    static AbGroupNF parse(const std::string& s);
    static AbGroupNF from_invariants(std::size_t rank, std::vector<Int> factors);
    bool operator==(const AbGroupNF& o) const = default;
};
AbGroupNF direct_sum(const AbGroupNF& a, const AbGroupNF& b);

// Z^n modulo the column span of `rels`
struct Presentation {
    std::size_t gens = 0;
    IntMatrix rels;

    Presentation() : rels(0, 0) {}
    explicit Presentation(std::size_t n) : gens(n), rels(n, 0) {}
    Presentation(std::size_t n, IntMatrix r);
    static Presentation cyclic(const Int& d);
    bool contains_zero(const std::vector<Int>& v) const;
};
AbGroupNF normal_form(const Presentation& P);
Presentation direct_sum(const Presentation& a, const Presentation& b);

struct GroupHom {
    Presentation source, target;
    IntMatrix matrix;
};
bool well_defined(const GroupHom& f);
// true when every column of m maps into the relations of `target`
bool is_zero_map(const IntMatrix& m, const Presentation& target);

struct Homology {
    AbGroupNF group;
    // coordinates in the middle group's generators, torsion factors first then free ones
    std::vector<std::vector<Int>> generators;
    IntMatrix lattice;    // basis of the preimage of ker g
    IntMatrix reduce;     // unimodular change to invariant-factor coordinates
    std::vector<Int> factors;

    // coordinates of the class of x in the invariant-factor basis, nullopt if x is not a cycle
    std::optional<std::vector<Int>> class_of(const std::vector<Int>& x) const;
};

// ker(g)/im(f) for A -f-> B -g-> C; f and g are matrices on generators
Homology subquotient_homology(const IntMatrix& f, const Presentation& B, const IntMatrix& g,
                              const Presentation& C);
Homology subquotient_homology(const GroupHom& f, const GroupHom& g);

struct GradedGroup {
    Presentation even, odd;

    const Presentation& part(int q) const { return q ? odd : even; }
    Presentation& part(int q) { return q ? odd : even; }
    std::array<AbGroupNF, 2> nf() const { return {normal_form(even), normal_form(odd)}; }
    bool trivial() const;
};
GradedGroup shift(const GradedGroup& g);
GradedGroup direct_sum(const std::vector<GradedGroup>& gs);

// part[q] maps the degree-q generators of the source to degree q+deg
struct GradedHom {
    int degree = 0;
    std::array<IntMatrix, 2> part;
};
GradedHom compose(const GradedHom& first, const GradedHom& second);
GradedHom zero_hom(const GradedGroup& src, const GradedGroup& dst, int degree);
bool well_defined(const GradedHom& h, const GradedGroup& src, const GradedGroup& dst);
bool is_zero_map(const GradedHom& h, const GradedGroup& dst);

}
