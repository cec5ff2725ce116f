#ifndef NUMINDEX_IO_HPP
#define NUMINDEX_IO_HPP

#include "numindex/duality.hpp"
#include "numindex/index_estimator.hpp"
#include "numindex/numerical_range.hpp"
#include "numindex/operators.hpp"

#include "json.hpp"

#include <string>

namespace numindex {

using Json = nlohmann::ordered_json;

// Space files:
//   {"leaves":[d1,...,dL],"exponents":[p1,...,p_{L-1}]}   optional "leaf_exponents":[r1,...,rL]
//   {"leaves":[d],"exponents":[],"flat_p":p}               p may be "inf"
// Schema problems throw SpecError naming the offending field.
TowerSpec space_from_json(const Json& j);
Json to_json(const TowerSpec& spec);

// Operator files: {"dim":n,"rows":[[...],...]} (dense, row-major).
Operator operator_from_json(const Json& j, const TowerSpec& spec);
Json to_json(const Operator& op);

Json to_json(const Provenance& p);
Json to_json(const RadiusEstimate& r);
Json to_json(const NormEstimate& n);
Json to_json(const IndexBudget& b);
Json to_json(const IndexEstimate& e);
Json to_json(const CCReport& r);

Json read_json_file(const std::string& path);
void write_text_file(const std::string& path, const std::string& text);
TowerSpec load_space(const std::string& path);
Operator load_operator(const std::string& path, const TowerSpec& spec);

// Fixed 12 significant digits, the CSV float format.
std::string format_float(double v);

}  // namespace numindex

#endif  // NUMINDEX_IO_HPP
