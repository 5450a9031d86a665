#include "fkt/zexact.hpp"

#include <algorithm>
#include <sstream>

namespace fkt {

IntMatrix IntMatrix::identity(std::size_t n) {
    IntMatrix m(n, n);
    for (std::size_t i = 0; i < n; ++i) m(i, i) = 1;
    return m;
}

IntMatrix IntMatrix::from_rows(const std::vector<std::vector<long>>& rows) {
    std::size_t c = rows.empty() ? 0 : rows[0].size();
    IntMatrix m(rows.size(), c);
    for (std::size_t i = 0; i < rows.size(); ++i) {
        if (rows[i].size() != c) throw ParseError("ragged matrix rows");
        for (std::size_t j = 0; j < c; ++j) m(i, j) = rows[i][j];
    }
    return m;
}

IntMatrix IntMatrix::from_rows(const std::vector<std::vector<Int>>& rows, std::size_t cols) {
    IntMatrix m(rows.size(), cols);
    for (std::size_t i = 0; i < rows.size(); ++i) {
        if (rows[i].size() != cols) throw ParseError("ragged matrix rows");
        for (std::size_t j = 0; j < cols; ++j) m(i, j) = rows[i][j];
    }
    return m;
}

IntMatrix IntMatrix::column(const std::vector<Int>& v) {
    IntMatrix m(v.size(), 1);
    for (std::size_t i = 0; i < v.size(); ++i) m(i, 0) = v[i];
    return m;
}

IntMatrix IntMatrix::operator*(const IntMatrix& o) const {
    if (c_ != o.r_) throw ComputationError("matrix product: dimension mismatch");
    IntMatrix m(r_, o.c_);
    for (std::size_t i = 0; i < r_; ++i)
        for (std::size_t k = 0; k < c_; ++k) {
            const Int& x = (*this)(i, k);
            if (x == 0) continue;
            for (std::size_t j = 0; j < o.c_; ++j)
                if (o(k, j) != 0) m(i, j) += x * o(k, j);
        }
    return m;
}

IntMatrix IntMatrix::operator+(const IntMatrix& o) const {
    IntMatrix m = *this;
    m += o;
    return m;
}

IntMatrix& IntMatrix::operator+=(const IntMatrix& o) {
    if (r_ != o.r_ || c_ != o.c_) throw ComputationError("matrix sum: dimension mismatch");
    for (std::size_t i = 0; i < a_.size(); ++i) a_[i] += o.a_[i];
    return *this;
}

IntMatrix IntMatrix::operator-(const IntMatrix& o) const { return *this + (-o); }

IntMatrix IntMatrix::operator-() const {
    IntMatrix m = *this;
    for (auto& x : m.a_) x = -x;
    return m;
}

IntMatrix IntMatrix::scaled(const Int& k) const {
    IntMatrix m = *this;
    for (auto& x : m.a_) x *= k;
    return m;
}

bool IntMatrix::operator==(const IntMatrix& o) const {
    return r_ == o.r_ && c_ == o.c_ && a_ == o.a_;
}

IntMatrix IntMatrix::transpose() const {
    IntMatrix m(c_, r_);
    for (std::size_t i = 0; i < r_; ++i)
        for (std::size_t j = 0; j < c_; ++j) m(j, i) = (*this)(i, j);
    return m;
}

bool IntMatrix::is_zero() const {
    return std::all_of(a_.begin(), a_.end(), [](const Int& x) { return x == 0; });
}

IntMatrix IntMatrix::block(std::size_t r0, std::size_t c0, std::size_t nr, std::size_t nc) const {
    IntMatrix m(nr, nc);
    for (std::size_t i = 0; i < nr; ++i)
        for (std::size_t j = 0; j < nc; ++j) m(i, j) = (*this)(r0 + i, c0 + j);
    return m;
}

void IntMatrix::set_block(std::size_t r0, std::size_t c0, const IntMatrix& b) {
    for (std::size_t i = 0; i < b.r_; ++i)
        for (std::size_t j = 0; j < b.c_; ++j) (*this)(r0 + i, c0 + j) = b(i, j);
}

void IntMatrix::add_block(std::size_t r0, std::size_t c0, const IntMatrix& b) {
    for (std::size_t i = 0; i < b.r_; ++i)
        for (std::size_t j = 0; j < b.c_; ++j) (*this)(r0 + i, c0 + j) += b(i, j);
}

IntMatrix IntMatrix::select_rows(const std::vector<std::size_t>& idx) const {
    IntMatrix m(idx.size(), c_);
    for (std::size_t i = 0; i < idx.size(); ++i)
        for (std::size_t j = 0; j < c_; ++j) m(i, j) = (*this)(idx[i], j);
    return m;
}

IntMatrix IntMatrix::select_cols(const std::vector<std::size_t>& idx) const {
    IntMatrix m(r_, idx.size());
    for (std::size_t i = 0; i < r_; ++i)
        for (std::size_t j = 0; j < idx.size(); ++j) m(i, j) = (*this)(i, idx[j]);
    return m;
}

std::vector<Int> IntMatrix::col(std::size_t j) const {
    std::vector<Int> v(r_);
    for (std::size_t i = 0; i < r_; ++i) v[i] = (*this)(i, j);
    return v;
}

void IntMatrix::swap_rows(std::size_t i, std::size_t j) {
    if (i == j) return;
    for (std::size_t k = 0; k < c_; ++k) std::swap((*this)(i, k), (*this)(j, k));
}

void IntMatrix::swap_cols(std::size_t i, std::size_t j) {
    if (i == j) return;
    for (std::size_t k = 0; k < r_; ++k) std::swap((*this)(k, i), (*this)(k, j));
}

void IntMatrix::add_row(std::size_t i, std::size_t j, const Int& k) {
    if (k == 0) return;
    for (std::size_t c = 0; c < c_; ++c)
        if ((*this)(j, c) != 0) (*this)(i, c) += k * (*this)(j, c);
}

void IntMatrix::add_col(std::size_t i, std::size_t j, const Int& k) {
    if (k == 0) return;
    for (std::size_t r = 0; r < r_; ++r)
        if ((*this)(r, j) != 0) (*this)(r, i) += k * (*this)(r, j);
}

IntMatrix IntMatrix::hcat(const IntMatrix& a, const IntMatrix& b) {
    if (a.r_ != b.r_) throw ComputationError("hcat: row mismatch");
    IntMatrix m(a.r_, a.c_ + b.c_);
    m.set_block(0, 0, a);
    m.set_block(0, a.c_, b);
    return m;
}

IntMatrix IntMatrix::vcat(const IntMatrix& a, const IntMatrix& b) {
    if (a.c_ != b.c_) throw ComputationError("vcat: column mismatch");
    IntMatrix m(a.r_ + b.r_, a.c_);
    m.set_block(0, 0, a);
    m.set_block(a.r_, 0, b);
    return m;
}

IntMatrix IntMatrix::diag_sum(const IntMatrix& a, const IntMatrix& b) {
    IntMatrix m(a.r_ + b.r_, a.c_ + b.c_);
    m.set_block(0, 0, a);
    m.set_block(a.r_, a.c_, b);
    return m;
}

std::string IntMatrix::str() const {
    std::ostringstream os;
    os << "[";
    for (std::size_t i = 0; i < r_; ++i) {
        os << (i ? ",[" : "[");
        for (std::size_t j = 0; j < c_; ++j) os << (j ? "," : "") << (*this)(i, j).get_str();
        os << "]";
    }
    os << "]";
    return os.str();
}

std::vector<Int> mat_vec(const IntMatrix& a, const std::vector<Int>& v) {
    if (a.cols() != v.size()) throw ComputationError("mat_vec: dimension mismatch");
    std::vector<Int> r(a.rows());
    for (std::size_t i = 0; i < a.rows(); ++i)
        for (std::size_t j = 0; j < a.cols(); ++j)
            if (v[j] != 0 && a(i, j) != 0) r[i] += a(i, j) * v[j];
    return r;
}

std::vector<Int> SmithForm::diagonal() const {
    std::size_t n = std::min(S.rows(), S.cols());
    std::vector<Int> d(n);
    for (std::size_t i = 0; i < n; ++i) d[i] = S(i, i);
    return d;
}

namespace {

struct SmithState {
    IntMatrix S, U, V, Ui, Vi;

    void row_add(std::size_t i, std::size_t j, const Int& k) {
        S.add_row(i, j, k);
        U.add_row(i, j, k);
        Ui.add_col(j, i, -k);
    }
    void col_add(std::size_t i, std::size_t j, const Int& k) {
        S.add_col(i, j, k);
        V.add_col(i, j, k);
        Vi.add_row(j, i, -k);
    }
    void row_swap(std::size_t i, std::size_t j) {
        S.swap_rows(i, j);
        U.swap_rows(i, j);
        Ui.swap_cols(i, j);
    }
    void col_swap(std::size_t i, std::size_t j) {
        S.swap_cols(i, j);
        V.swap_cols(i, j);
        Vi.swap_rows(i, j);
    }
    void row_neg(std::size_t i) {
        for (std::size_t c = 0; c < S.cols(); ++c) S(i, c) = -S(i, c);
        for (std::size_t c = 0; c < U.cols(); ++c) U(i, c) = -U(i, c);
        for (std::size_t r = 0; r < Ui.rows(); ++r) Ui(r, i) = -Ui(r, i);
    }
};

}

SmithForm smith(const IntMatrix& A) {
    std::size_t m = A.rows(), n = A.cols();
    SmithState st{A, IntMatrix::identity(m), IntMatrix::identity(n), IntMatrix::identity(m),
                  IntMatrix::identity(n)};
    IntMatrix& S = st.S;
    std::size_t t = 0;
    for (; t < std::min(m, n); ++t) {
        // smallest nonzero entry of the trailing block becomes the pivot
        bool found = false;
        std::size_t pi = 0, pj = 0;
        Int best;
        for (std::size_t i = t; i < m; ++i)
            for (std::size_t j = t; j < n; ++j)
                if (S(i, j) != 0 && (!found || abs(S(i, j)) < best)) {
                    found = true;
                    best = abs(S(i, j));
                    pi = i;
                    pj = j;
                }
        if (!found) break;
        st.row_swap(t, pi);
        st.col_swap(t, pj);
        for (;;) {
            bool clean = true;
            for (std::size_t i = t + 1; i < m; ++i) {
                if (S(i, t) == 0) continue;
                Int q;
                mpz_tdiv_q(q.get_mpz_t(), S(i, t).get_mpz_t(), S(t, t).get_mpz_t());
                st.row_add(i, t, -q);
                if (S(i, t) != 0) clean = false;
            }
            for (std::size_t j = t + 1; j < n; ++j) {
                if (S(t, j) == 0) continue;
                Int q;
                mpz_tdiv_q(q.get_mpz_t(), S(t, j).get_mpz_t(), S(t, t).get_mpz_t());
                st.col_add(j, t, -q);
                if (S(t, j) != 0) clean = false;
            }
            if (!clean) {
                std::size_t bi = t, bj = t;
                Int b = abs(S(t, t));
                for (std::size_t i = t + 1; i < m; ++i)
                    if (S(i, t) != 0 && abs(S(i, t)) < b) {
                        b = abs(S(i, t));
                        bi = i;
                        bj = t;
                    }
                for (std::size_t j = t + 1; j < n; ++j)
                    if (S(t, j) != 0 && abs(S(t, j)) < b) {
                        b = abs(S(t, j));
                        bi = t;
                        bj = j;
                    }
                st.row_swap(t, bi);
                st.col_swap(t, bj);
                continue;
            }
            bool divides = true;
            for (std::size_t i = t + 1; i < m && divides; ++i)
                for (std::size_t j = t + 1; j < n; ++j)
                    if (S(i, j) % S(t, t) != 0) {
                        st.row_add(t, i, 1);
                        divides = false;
                        break;
                    }
            if (divides) break;
        }
        if (S(t, t) < 0) st.row_neg(t);
    }
    SmithForm f{std::move(st.U), std::move(st.S), std::move(st.V), std::move(st.Ui),
                std::move(st.Vi), t};
    return f;
}

namespace {

ColumnEchelon echelon(const IntMatrix& A, bool track) {
    ColumnEchelon ce;
    ce.H = A;
    std::size_t n = A.cols();
    if (track) ce.T = IntMatrix::identity(n);
    IntMatrix& H = ce.H;
    std::size_t k = 0;
    auto cswap = [&](std::size_t i, std::size_t j) {
        H.swap_cols(i, j);
        if (track) ce.T.swap_cols(i, j);
    };
    auto cadd = [&](std::size_t i, std::size_t j, const Int& q) {
        H.add_col(i, j, q);
        if (track) ce.T.add_col(i, j, q);
    };
    for (std::size_t r = 0; r < A.rows() && k < n; ++r) {
        for (;;) {
            std::size_t best = n;
            for (std::size_t j = k; j < n; ++j)
                if (H(r, j) != 0 && (best == n || abs(H(r, j)) < abs(H(r, best)))) best = j;
            if (best == n) break;
            cswap(k, best);
            bool done = true;
            for (std::size_t j = k + 1; j < n; ++j) {
                if (H(r, j) == 0) continue;
                Int q;
                mpz_tdiv_q(q.get_mpz_t(), H(r, j).get_mpz_t(), H(r, k).get_mpz_t());
                cadd(j, k, -q);
                if (H(r, j) != 0) done = false;
            }
            if (done) break;
        }
        if (k < n && H(r, k) != 0) {
            if (H(r, k) < 0) {
                for (std::size_t i = 0; i < H.rows(); ++i) H(i, k) = -H(i, k);
                if (track)
                    for (std::size_t i = 0; i < n; ++i) ce.T(i, k) = -ce.T(i, k);
            }
            ce.pivot_rows.push_back(r);
            ++k;
        }
    }
    ce.rank = k;
    return ce;
}

std::optional<std::vector<Int>> echelon_coords(const ColumnEchelon& ce, const std::vector<Int>& b) {
    std::vector<Int> c(ce.rank);
    for (std::size_t j = 0; j < ce.rank; ++j) {
        std::size_t p = ce.pivot_rows[j];
        Int s = b[p];
        for (std::size_t i = 0; i < j; ++i)
            if (ce.H(p, i) != 0) s -= ce.H(p, i) * c[i];
        if (s % ce.H(p, j) != 0) return std::nullopt;
        c[j] = s / ce.H(p, j);
    }
    for (std::size_t r = 0; r < ce.H.rows(); ++r) {
        Int s = b[r];
        for (std::size_t j = 0; j < ce.rank; ++j)
            if (ce.H(r, j) != 0) s -= ce.H(r, j) * c[j];
        if (s != 0) return std::nullopt;
    }
    return c;
}

}

ColumnEchelon column_echelon(const IntMatrix& A) { return echelon(A, true); }

std::size_t rank(const IntMatrix& A) { return echelon(A, false).rank; }

Int determinant(const IntMatrix& A) {
    if (A.rows() != A.cols()) throw ComputationError("determinant of non-square matrix");
    std::size_t n = A.rows();
    if (n == 0) return 1;
    IntMatrix M = A;
    Int sign = 1, prev = 1;
    for (std::size_t k = 0; k + 1 < n; ++k) {
        if (M(k, k) == 0) {
            std::size_t p = k + 1;
            while (p < n && M(p, k) == 0) ++p;
            if (p == n) return 0;
            M.swap_rows(k, p);
            sign = -sign;
        }
        for (std::size_t i = k + 1; i < n; ++i)
            for (std::size_t j = k + 1; j < n; ++j) {
                M(i, j) = M(i, j) * M(k, k) - M(i, k) * M(k, j);
                mpz_divexact(M(i, j).get_mpz_t(), M(i, j).get_mpz_t(), prev.get_mpz_t());
            }
        prev = M(k, k);
    }
    return sign * M(n - 1, n - 1);
}

IntMatrix kernel(const IntMatrix& A) {
    ColumnEchelon ce = echelon(A, true);
    std::size_t n = A.cols();
    return ce.T.block(0, ce.rank, n, n - ce.rank);
}

IntMatrix lattice_basis(const IntMatrix& gens) {
    ColumnEchelon ce = echelon(gens, false);
    return ce.H.block(0, 0, gens.rows(), ce.rank);
}

std::optional<std::vector<Int>> solve(const IntMatrix& A, const std::vector<Int>& b) {
    if (b.size() != A.rows()) throw ComputationError("solve: dimension mismatch");
    ColumnEchelon ce = echelon(A, true);
    auto c = echelon_coords(ce, b);
    if (!c) return std::nullopt;
    std::vector<Int> x(A.cols());
    for (std::size_t j = 0; j < ce.rank; ++j)
        if ((*c)[j] != 0)
            for (std::size_t i = 0; i < A.cols(); ++i) x[i] += ce.T(i, j) * (*c)[j];
    return x;
}

std::optional<IntMatrix> solve(const IntMatrix& A, const IntMatrix& B) {
    if (B.rows() != A.rows()) throw ComputationError("solve: dimension mismatch");
    ColumnEchelon ce = echelon(A, true);
    IntMatrix X(A.cols(), B.cols());
    for (std::size_t k = 0; k < B.cols(); ++k) {
        auto c = echelon_coords(ce, B.col(k));
        if (!c) return std::nullopt;
        for (std::size_t j = 0; j < ce.rank; ++j)
            if ((*c)[j] != 0)
                for (std::size_t i = 0; i < A.cols(); ++i) X(i, k) += ce.T(i, j) * (*c)[j];
    }
    return X;
}

bool in_span(const IntMatrix& gens, const std::vector<Int>& v) {
    if (std::all_of(v.begin(), v.end(), [](const Int& x) { return x == 0; })) return true;
    return echelon_coords(echelon(gens, false), v).has_value();
}

std::string AbGroupNF::str() const {
    if (trivial()) return "0";
    std::string s;
    if (rank > 0) s = "Z^" + std::to_string(rank);
    for (const auto& d : torsion) s += (s.empty() ? "" : " + ") + std::string("Z/") + d.get_str();
    return s;
}

AbGroupNF AbGroupNF::parse(const std::string& text) {
    AbGroupNF g;
    std::string s;
    for (char ch : text)
        if (ch != ' ') s += ch;
    if (s == "0") return g;
    std::vector<Int> factors;
    std::size_t pos = 0;
    while (pos < s.size()) {
        std::size_t end = s.find('+', pos);
        if (end == std::string::npos) end = s.size();
        std::string tok = s.substr(pos, end - pos);
        if (tok.rfind("Z^", 0) == 0) {
            g.rank += std::stoul(tok.substr(2));
        } else if (tok.rfind("Z/", 0) == 0) {
            factors.emplace_back(tok.substr(2));
        } else if (tok == "Z") {
            g.rank += 1;
        } else {
            throw ParseError("bad group string: " + text);
        }
        pos = end + 1;
    }
    return from_invariants(g.rank, factors);
}

AbGroupNF AbGroupNF::from_invariants(std::size_t r, std::vector<Int> factors) {
    // normalise an arbitrary list of cyclic orders into a divisibility chain
    std::size_t n = factors.size();
    IntMatrix D(n, n);
    for (std::size_t i = 0; i < n; ++i) D(i, i) = abs(factors[i]);
    SmithForm sf = smith(D);
    AbGroupNF g;
    g.rank = r;
    for (const auto& d : sf.diagonal()) {
        if (d == 0)
            ++g.rank;
        else if (d != 1)
            g.torsion.push_back(d);
    }
    return g;
}

AbGroupNF direct_sum(const AbGroupNF& a, const AbGroupNF& b) {
    std::vector<Int> f = a.torsion;
    f.insert(f.end(), b.torsion.begin(), b.torsion.end());
    return AbGroupNF::from_invariants(a.rank + b.rank, f);
}

Presentation::Presentation(std::size_t n, IntMatrix r) : gens(n), rels(std::move(r)) {
    if (rels.rows() != n) throw ComputationError("presentation: relation matrix must have one row per generator");
}

Presentation Presentation::cyclic(const Int& d) {
    IntMatrix r(1, 1);
    r(0, 0) = d;
    return Presentation(1, r);
}

bool Presentation::contains_zero(const std::vector<Int>& v) const { return in_span(rels, v); }

AbGroupNF normal_form(const Presentation& P) {
    SmithForm sf = smith(P.rels);
    AbGroupNF g;
    g.rank = P.gens - sf.rank;
    for (std::size_t i = 0; i < sf.rank; ++i)
        if (sf.S(i, i) != 1) g.torsion.push_back(sf.S(i, i));
    return g;
}

Presentation direct_sum(const Presentation& a, const Presentation& b) {
    return Presentation(a.gens + b.gens, IntMatrix::diag_sum(a.rels, b.rels));
}

bool is_zero_map(const IntMatrix& m, const Presentation& target) {
    if (m.is_zero()) return true;
    ColumnEchelon ce = echelon(target.rels, false);
    for (std::size_t j = 0; j < m.cols(); ++j)
        if (!echelon_coords(ce, m.col(j))) return false;
    return true;
}

bool well_defined(const GroupHom& f) {
    if (f.matrix.rows() != f.target.gens || f.matrix.cols() != f.source.gens) return false;
    return is_zero_map(f.matrix * f.source.rels, f.target);
}

std::optional<std::vector<Int>> Homology::class_of(const std::vector<Int>& x) const {
    auto c = solve(lattice, x);
    if (!c) return std::nullopt;
    std::vector<Int> y = mat_vec(reduce, *c);
    std::vector<Int> out;
    for (std::size_t i = 0; i < factors.size(); ++i) {
        if (factors[i] == 1) continue;
        Int v = y[i];
        if (factors[i] != 0) {
            v %= factors[i];
            if (v < 0) v += factors[i];
        }
        out.push_back(v);
    }
    return out;
}

Homology subquotient_homology(const IntMatrix& f, const Presentation& B, const IntMatrix& g,
                              const Presentation& C) {
    std::size_t n = B.gens;
    if (f.rows() != n || g.cols() != n || g.rows() != C.gens)
        throw ComputationError("homology: dimension mismatch");
    if (!is_zero_map(g * f, C)) throw ComputationError("homology: composite of the two maps is nonzero");
    IntMatrix K = kernel(IntMatrix::hcat(g, C.rels));
    IntMatrix L = lattice_basis(K.block(0, 0, n, K.cols()));
    auto X = solve(L, IntMatrix::hcat(f, B.rels));
    if (!X) throw ComputationError("homology: map is not well defined on relations");
    SmithForm sf = smith(*X);
    Homology h;
    std::size_t l = L.cols();
    h.factors.assign(l, Int(0));
    for (std::size_t i = 0; i < sf.rank; ++i) h.factors[i] = sf.S(i, i);
    std::vector<Int> fs;
    std::size_t free_rank = 0;
    for (std::size_t i = 0; i < l; ++i) {
        if (h.factors[i] == 1) continue;
        if (h.factors[i] == 0)
            ++free_rank;
        else
            fs.push_back(h.factors[i]);
        h.generators.push_back(mat_vec(L, sf.Uinv.col(i)));
    }
    h.group.rank = free_rank;
    h.group.torsion = fs;
    h.lattice = L;
    h.reduce = sf.U;
    return h;
}

Homology subquotient_homology(const GroupHom& f, const GroupHom& g) {
    if (f.target.gens != g.source.gens) throw ComputationError("homology: middle groups differ");
    return subquotient_homology(f.matrix, f.target, g.matrix, g.target);
}

bool GradedGroup::trivial() const { return normal_form(even).trivial() && normal_form(odd).trivial(); }

GradedGroup shift(const GradedGroup& g) { return GradedGroup{g.odd, g.even}; }

GradedGroup direct_sum(const std::vector<GradedGroup>& gs) {
    GradedGroup s;
    for (const auto& g : gs) {
        s.even = direct_sum(s.even, g.even);
        s.odd = direct_sum(s.odd, g.odd);
    }
    return s;
}

GradedHom compose(const GradedHom& first, const GradedHom& second) {
    GradedHom h;
    h.degree = (first.degree + second.degree) % 2;
    for (int q = 0; q < 2; ++q) h.part[q] = second.part[q ^ first.degree] * first.part[q];
    return h;
}

GradedHom zero_hom(const GradedGroup& src, const GradedGroup& dst, int degree) {
    GradedHom h;
    h.degree = degree;
    for (int q = 0; q < 2; ++q) h.part[q] = IntMatrix(dst.part(q ^ degree).gens, src.part(q).gens);
    return h;
}

bool well_defined(const GradedHom& h, const GradedGroup& src, const GradedGroup& dst) {
    for (int q = 0; q < 2; ++q)
        if (!well_defined(GroupHom{src.part(q), dst.part(q ^ h.degree), h.part[q]})) return false;
    return true;
}

bool is_zero_map(const GradedHom& h, const GradedGroup& dst) {
    for (int q = 0; q < 2; ++q)
        if (!is_zero_map(h.part[q], dst.part(q ^ h.degree))) return false;
    return true;
}

}
