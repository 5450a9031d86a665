#pragma once
#include <map>
#include <memory>
#include <optional>
#include <string>
#include <tuple>
#include <vector>

#include "fkt/finspace.hpp"
#include "fkt/zexact.hpp"

namespace fkt {

enum class ArrowKind { incl, restr, bdry };

struct Arrow {
    int src = 0, dst = 0;
    std::string name;
    int parity = 0;
    ArrowKind kind = ArrowKind::incl;
};

struct GradedQuiver {
    std::vector<std::string> objects;
    std::vector<Arrow> arrows;

    int object(const std::string& label) const;
    int arrow(const std::string& name) const;
};

// arrow indices applied left to right
using Path = std::vector<int>;
// formal integer combination of parallel paths
using PathSum = std::map<Path, Int>;

void add_to(PathSum& acc, const PathSum& x, const Int& c = 1);
// x first, then y
PathSum then(const PathSum& x, const PathSum& y);
PathSum single(const Path& p);

struct PathRelation {
    PathSum terms;
};

struct CatPresentation {
    GradedQuiver quiver;
    std::vector<PathRelation> relations;

    // throws on non-parallel or mixed-parity relations
    void check() const;
    bool homogeneous() const;
};

struct BasisElem {
    int src = 0, dst = 0;
    int parity = 0;
    int level = 0;
    Path word;
};

using Coeffs = std::vector<Int>;
using Sparse = std::vector<std::pair<int, Int>>;

class HomTable {
public:
    std::size_t num_objects() const { return hom_.size(); }
    std::size_t num_elems() const { return elems_.size(); }
    const std::vector<int>& hom(int y, int z) const { return hom_[y][z]; }
    std::size_t rank(int y, int z) const { return hom_[y][z].size(); }
    std::size_t total_rank() const { return elems_.size(); }
    const BasisElem& elem(int id) const { return elems_[id]; }
    int pos(int id) const { return pos_[id]; }
    int identity(int y) const { return ident_[y]; }
    int max_level() const { return max_level_; }

    // b after a, in coordinates of hom(src a, dst b)
    const Sparse& compose_basis(int a, int b) const;
    Coeffs compose(int y, int z, int w, const Coeffs& a, const Coeffs& b) const;
    Coeffs eval(int y, const PathSum& s) const;
    Coeffs eval_path(int y, const Path& p) const;
    Coeffs unit(int id) const;
    const Sparse& after_arrow(int id, int arrow) const;

    // builds from per-element successor data; used by the closure routines
    struct Builder;

private:
    friend struct Builder;
    std::vector<BasisElem> elems_;
    std::vector<int> pos_, ident_;
    std::vector<std::vector<std::vector<int>>> hom_;
    std::vector<std::map<int, Sparse>> after_;
    std::vector<std::map<int, Sparse>> comp_;
    std::vector<Arrow> arrows_;
    int max_level_ = 0;

    void finish();
};

// graded incremental closure for length-homogeneous relations
HomTable hom_closure(const CatPresentation& P, int max_len);
// quotient of the truncated path category; any relations
HomTable hom_closure_truncated(const CatPresentation& P, int max_len);

struct RingIdealData {
    std::vector<int> ss_basis;  // identities
    std::size_t nil_rank = 0;
    std::optional<int> nilpotency_index;
    bool nilpotent = false;
    bool semidirect = false;
};
RingIdealData ideal_checks(const HomTable& T, const GradedQuiver& Q);

// canonical i/r composites and connecting maps between locally closed pieces
class Composites {
public:
    Composites(const FiniteSpace& X, const GradedQuiver& Q, const std::vector<Mask>& objects);

    // map A -> D that is the identity on the connected support E
    std::optional<PathSum> kappa(Mask a, Mask d, Mask e) const;
    // sum over components of a possibly disconnected support
    PathSum kappa_sum(Mask a, Mask d, Mask support) const;
    // connecting map W -> U of the extension U >-> U+W ->> W; zero if U+W is disconnected
    std::optional<PathSum> delta(Mask u, Mask w) const;
    std::vector<PathSum> relations() const { return relations_; }
    const std::vector<std::pair<Mask, Mask>>& extensions() const { return exts_; }
    bool complete() const { return missing_ == 0; }

private:
    const FiniteSpace* X_;
    std::map<Mask, int> obj_;
    std::vector<std::pair<Mask, Mask>> exts_;
    std::map<std::tuple<Mask, Mask, Mask>, PathSum> kappa_;
    std::map<std::pair<Mask, Mask>, PathSum> delta_;
    std::vector<PathSum> relations_;
    int missing_ = 0;
};

struct Category {
    std::string name;
    std::optional<FiniteSpace> space;
    std::vector<Mask> masks;
    CatPresentation pres;
    HomTable table;
    std::shared_ptr<Composites> composites;
    bool reconstructed = false;

    std::size_t size() const { return pres.quiver.objects.size(); }
    int object(const std::string& label) const;
    int object(Mask m) const;
    const std::string& label(int obj) const { return pres.quiver.objects[obj]; }
    Coeffs word(const std::vector<std::string>& arrow_names) const;
};

// quiver of the generating transformations for a builtin space
GradedQuiver builtin_quiver(const FiniteSpace& X);
CatPresentation builtin_presentation(const std::string& space_name);
// relations derived from naturality and six-term vanishing
CatPresentation derived_presentation(const FiniteSpace& X);
std::shared_ptr<const Category> builtin_category(const std::string& space_name);
std::shared_ptr<Category> make_category(std::string name, std::optional<FiniteSpace> X, CatPresentation P,
                                        int max_len = 40);

std::string arrow_name(ArrowKind k, const std::string& src, const std::string& dst);

}
