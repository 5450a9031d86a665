#pragma once
#include <cstdint>
#include <string>
#include <utility>
#include <vector>

namespace fkt {

using Mask = std::uint32_t;

inline int popcount(Mask m) { return __builtin_popcount(m); }
inline bool subset_of(Mask a, Mask b) { return (a & ~b) == 0; }

struct LCSubset {
    Mask value = 0;
    Mask open = 0, removed = 0;  // value = open \ removed
};

class FiniteSpace {
public:
    FiniteSpace() = default;
    // throws ParseError unless the family is a topology
    FiniteSpace(std::string name, std::vector<std::string> points, std::vector<Mask> opens);
    static FiniteSpace from_lists(std::string name, std::vector<std::string> points,
                                  const std::vector<std::vector<std::string>>& opens);

    const std::string& name() const { return name_; }
    const std::vector<std::string>& points() const { return points_; }
    const std::vector<Mask>& opens() const { return opens_; }
    std::size_t size() const { return points_.size(); }
    Mask full() const { return points_.empty() ? 0 : Mask((1ull << points_.size()) - 1); }

    bool is_t0() const { return t0_; }
    bool is_open(Mask s) const;
    bool is_closed(Mask s) const { return is_open(full() & ~s); }
    bool rel_open(Mask s, Mask y) const;
    bool rel_closed(Mask s, Mask y) const { return subset_of(s, y) && rel_open(y & ~s, y); }
    bool locally_closed(Mask s) const;
    Mask smallest_open(Mask s) const;
    Mask closure(Mask s) const;

    // x specializes to y: every open set containing x contains y
    bool specializes(int x, int y) const;
    std::vector<Mask> components(Mask y) const;
    bool connected(Mask y) const { return y != 0 && components(y).size() == 1; }

    std::string label(Mask s) const;
    Mask parse(const std::string& label) const;
    Mask point_mask(const std::string& p) const;
    std::vector<std::string> point_list(Mask s) const;

    std::vector<LCSubset> lc_subsets(bool connected_only) const;
    // pairs (U, Y\U) with U relatively open in Y, trivial pairs included
    std::vector<std::pair<Mask, Mask>> open_pairs(Mask y) const;
    bool is_accordion_union() const;

private:
    std::string name_;
    std::vector<std::string> points_;
    std::vector<Mask> opens_;
    bool t0_ = true;
};

FiniteSpace z_space(int m);
FiniteSpace s_space();
FiniteSpace pseudocircle();
FiniteSpace one_point();
// "Z1".."Z4", "S", "C2", "pt"
FiniteSpace builtin_space(const std::string& name);
bool is_builtin_space(const std::string& name);

}
