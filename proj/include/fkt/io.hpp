#pragma once
#include <json.hpp>
#include <memory>
#include <string>

#include "fkt/finspace.hpp"
#include "fkt/graphk.hpp"
#include "fkt/ntcat.hpp"
#include "fkt/ntmod.hpp"

namespace fkt {

using Json = nlohmann::json;

// integers are numbers when they fit in 64 bits, decimal strings otherwise
Json int_to_json(const Int& x);
Int int_from_json(const Json& j);
Json matrix_to_json(const IntMatrix& m);
IntMatrix matrix_from_json(const Json& j, std::size_t rows, std::size_t cols);

// {"points": [...], "opens": [[...], ...]} or a builtin name
Json space_to_json(const FiniteSpace& X);
FiniteSpace space_from_json(const Json& j);

Json presentation_to_json(const CatPresentation& P);
CatPresentation presentation_from_json(const Json& j);
// {"name", "space"?, "objects", "arrows", "relations"}
std::shared_ptr<Category> category_from_json(const Json& j);
// basis words and structure constants
Json table_to_json(const Category& cat);

// relation vectors are listed one per inner array
Json group_to_json(const Presentation& P);
Presentation group_from_json(const Json& j);

// either explicit entries/actions or a "cokernel" of free modules
Json module_to_json(const GradedModule& M);
GradedModule module_from_json(const Json& j, std::shared_ptr<const Category> cat = nullptr);
FreeMap free_map_from_json(const Category& cat, const Json& j);

Json graph_to_json(const BlockGraph& G);
BlockGraph graph_from_json(const Json& j);

// {"Y": {"n": {"even": "...", "odd": "..."}}}; the aggregate is recomputed on reading
Json tor_to_json(const TorReport& T);
TorReport tor_from_json(const Json& j);

Json load_json(const std::string& path);

}
