#pragma once
#include <map>
#include <memory>
#include <optional>
#include <string>
#include <vector>

#include "fkt/ntcat.hpp"
#include "fkt/zexact.hpp"

namespace fkt {

enum class Variance { left, right };

// left modules are covariant: the action of x: Y -> Z maps M(Y) to M(Z)
// right modules are contravariant: it maps M(Z) to M(Y)
struct GradedModule {
    std::shared_ptr<const Category> cat;
    Variance variance = Variance::left;
    std::vector<GradedGroup> entries;  // per object
    std::vector<GradedHom> actions;    // per generator arrow
};

// actions of every basis element, precomputed from the arrow actions
class ModuleEval {
public:
    explicit ModuleEval(const GradedModule& M);
    const GradedModule& module() const { return *M_; }
    const GradedHom& basis(int id) const { return basis_[id]; }
    // action of a combination of basis elements of hom(y, z)
    GradedHom apply(int y, int z, const Coeffs& c) const;
    GradedHom apply(int y, const PathSum& s) const;

private:
    const GradedModule* M_;
    std::vector<GradedHom> basis_;
};

struct ValidationReport {
    bool ok = true;
    std::vector<std::string> problems;
};
ValidationReport validate(const GradedModule& M);

struct ExactReport {
    bool exact = true;
    std::size_t checked = 0;  // number of (Y, U) pairs
    std::optional<std::string> first_failure;
};
ExactReport check_exact(const GradedModule& M);

std::vector<std::array<AbGroupNF, 2>> m_ss(const GradedModule& M);

GradedModule free_module(std::shared_ptr<const Category> cat, int y, Variance side, int shift = 0);
GradedModule shifted(const GradedModule& M);
GradedModule direct_sum(const GradedModule& a, const GradedModule& b);
// same module with every odd action negated
GradedModule negate_odd(const GradedModule& M);

struct Summand {
    int obj = 0;
    int shift = 0;
    bool operator==(const Summand&) const = default;
};

// a matrix of natural transformations between sums of free modules;
// entry (i, j) goes from source summand j to target summand i, empty = 0
struct FreeMap {
    std::vector<Summand> source, target;
    std::vector<std::vector<Coeffs>> entry;  // [target][source]
};

// cokernel of a map of free left modules; the entry in NT(T_i, S_j) acts by precomposition
GradedModule coker_module(std::shared_ptr<const Category> cat, const FreeMap& f);
GradedModule tensor_mod_k(const GradedModule& M, const Int& k);

// chain[0] is the map onto the lowest level; checks d d = 0, interior exactness and injectivity on top
struct FreeComplexCheck {
    bool squares_zero = true;
    bool exact = true;
    bool injective = true;
};
FreeComplexCheck check_free_left_complex(const Category& cat, const std::vector<FreeMap>& chain);
// matrix of a map of free left modules evaluated at z in degree q
IntMatrix evaluate_left(const Category& cat, const FreeMap& f, int z, int q);

// resolution of a simple right module by free right modules Q_Z[e]
struct FreeResolution {
    int target = 0;
    std::vector<std::vector<Summand>> levels;
    // diffs[n-1] is d_n : levels[n] -> levels[n-1], entry in NT(source obj, target obj)
    std::vector<FreeMap> diffs;
    // levels[n+period] = levels[n][1] for n >= period_start, differentials repeat likewise
    std::optional<int> period, period_start;
    bool reconstructed = false;
    bool finite = false;  // every level past the last one is zero

    int depth() const { return int(diffs.size()); }
    // unrolls a periodic tail up to depth n; false if not periodic and too short
    bool extend_to(int n);
};

struct ResolutionCheck {
    bool squares_zero = true;
    bool exact = true;
    std::string detail;
};
ResolutionCheck check_resolution(const Category& cat, const FreeResolution& R);

bool has_builtin_resolution(const std::string& space, const std::string& object);
FreeResolution builtin_resolution(const std::string& space, const std::string& object);
FreeResolution resolve_simple(const Category& cat, int y, int depth);

enum class Engine { builtin, generic };

// per object label, per degree: even and odd part
struct TorReport {
    std::map<std::string, std::map<int, std::array<AbGroupNF, 2>>> per_object;
    std::map<int, std::array<AbGroupNF, 2>> aggregate;
};

// complex Q_Z[e] -> M(Z)[e]; degree q, homology at level n
std::array<Homology, 2> tensor_homology(const ModuleEval& E, const FreeResolution& R, int n);

struct TorOptions {
    Engine engine = Engine::builtin;
    bool parallel = true;
};
TorReport tor(const GradedModule& M, const std::vector<int>& degrees, TorOptions opt = {});
TorReport tor_serial(const GradedModule& M, const std::vector<int>& degrees, Engine engine = Engine::builtin);

// resolution used for S_Y; builtin falls back to the generic engine outside the catalogue
std::shared_ptr<const FreeResolution> simple_resolution(const Category& cat, int y, int depth, Engine engine);

struct PdResult {
    std::optional<int> pd;  // nullopt: larger than max_n
    TorReport tor;
};
PdResult projective_dimension(const GradedModule& M, int max_n, TorOptions opt = {});
std::size_t rational_tor(const GradedModule& M, int n, TorOptions opt = {});
std::optional<int> rational_projective_dimension(const GradedModule& M, int max_n, TorOptions opt = {});

}
