#pragma once
#include <memory>
#include <optional>
#include <string>
#include <vector>

#include "fkt/finspace.hpp"
#include "fkt/ntmod.hpp"
#include "fkt/zexact.hpp"

namespace fkt {

struct GraphBlock {
    std::string point;
    int vertices = 0;
};

// adjacency(v, w) = number of edges v -> w; vertices numbered block by block
struct BlockGraph {
    std::string space_name;
    FiniteSpace space;
    std::vector<GraphBlock> blocks;
    IntMatrix adjacency;

    BlockGraph() = default;
    BlockGraph(std::string space_name, FiniteSpace X, std::vector<GraphBlock> blocks, IntMatrix adjacency);

    std::size_t num_vertices() const { return adjacency.rows(); }
    // vertices over the points of y, in block order
    std::vector<std::size_t> vertices(Mask y) const;
    Mask point_of(std::size_t v) const { return vertex_point_[v]; }
    // (A^t - I) restricted to rows r and columns c
    IntMatrix bprime(const std::vector<std::size_t>& r, const std::vector<std::size_t>& c) const;

private:
    std::vector<Mask> vertex_point_;
};

struct GraphReport {
    bool triangular = true;
    bool has_sinks = false;
    bool has_sources = false;
    bool condition_k = true;
    std::vector<std::size_t> sinks, sources, too_few_cycles;
};
// condition (K) enumerates simple cycles; refused above vertex_limit vertices
GraphReport graph_checks(const BlockGraph& G, std::size_t vertex_limit = 20);

struct SubquotientK {
    Mask y = 0;
    std::vector<std::size_t> vertices;
    IntMatrix bprime;
    Presentation k0;
    IntMatrix k1;  // columns: lattice basis of the kernel
    AbGroupNF k0_nf() const { return normal_form(k0); }
    std::size_t k1_rank() const { return k1.cols(); }
};
SubquotientK k_groups(const BlockGraph& G, Mask y);

// filtrated K-theory of the graph as a left module over the builtin category of its space
GradedModule fk_module(const BlockGraph& G);

struct FastPath {
    std::string kind;  // "Z3" or "S"
    std::array<AbGroupNF, 2> tor1;
    std::vector<AbGroupNF> complex_groups;  // identified complex, source first (degree used by the shortcut)
    // Z3: generators of ker(f) meet im(phi0), and of phi0(ker f)
    std::vector<std::vector<Int>> witness_lattice, witness_sublattice;
    // S: whether the class of (0,1,1,0,1) generates the homology
    std::optional<bool> witness_generates;
};

struct CkTor {
    TorReport tor;
    std::optional<FastPath> fast;
};
CkTor tor_ck(const BlockGraph& G, int max_degree = 2, TorOptions opt = {});
std::optional<FastPath> fast_path(const BlockGraph& G);

}
