#include "numindex/io.hpp"

#include "numindex/errors.hpp"

#include <cmath>
#include <cstdio>
#include <fstream>
#include <sstream>

namespace numindex {

namespace {

double exponent_from_json(const Json& v, const std::string& field) {
  if (v.is_number()) return v.get<double>();
  if (v.is_string() && v.get<std::string>() == "inf") return kInfinity;
  throw SpecError("field \"" + field + "\": expected a number or \"inf\", got " + v.dump());
}

Json exponent_to_json(double p) { return std::isinf(p) ? Json("inf") : Json(p); }

const Json& require(const Json& j, const char* field) {
  if (!j.is_object()) throw SpecError("expected a JSON object, got " + j.dump());
  if (!j.contains(field)) throw SpecError("missing field \"" + std::string(field) + "\"");
  return j.at(field);
}

std::vector<double> exponent_list(const Json& j, const char* field) {
  if (!j.is_array()) throw SpecError("field \"" + std::string(field) + "\" must be an array");
  std::vector<double> out;
  for (std::size_t i = 0; i < j.size(); ++i) {
    out.push_back(exponent_from_json(j[i], std::string(field) + "[" + std::to_string(i) + "]"));
  }
  return out;
}

Json vector_json(const Eigen::VectorXd& v) {
  Json out = Json::array();
  for (Index i = 0; i < v.size(); ++i) out.push_back(v[i]);
  return out;
}

}  // namespace

TowerSpec space_from_json(const Json& j) {
  const Json& leaves_json = require(j, "leaves");
  if (!leaves_json.is_array() || leaves_json.empty()) throw SpecError("field \"leaves\" must be a nonempty array");
  std::vector<Index> leaves;
  for (const Json& d : leaves_json) {
    if (!d.is_number_integer() || d.get<long long>() < 1) {
      throw SpecError("field \"leaves\": dimensions must be positive integers, got " + d.dump());
    }
    leaves.push_back(static_cast<Index>(d.get<long long>()));
  }
  const std::vector<double> exponents = exponent_list(require(j, "exponents"), "exponents");

  if (j.contains("flat_p")) {
    if (leaves.size() != 1 || !exponents.empty()) {
      throw SpecError("flat spaces take \"leaves\":[d] and \"exponents\":[]");
    }
    return TowerSpec::flat(leaves[0], exponent_from_json(j.at("flat_p"), "flat_p"));
  }
  if (j.contains("leaf_exponents")) {
    return TowerSpec::tower(leaves, exponents, exponent_list(j.at("leaf_exponents"), "leaf_exponents"));
  }
  return TowerSpec::tower(leaves, exponents);
}

Json to_json(const TowerSpec& spec) {
  Json out;
  if (spec.is_flat()) {
    out["leaves"] = Json::array({spec.dim()});
    out["exponents"] = Json::array();
    out["flat_p"] = exponent_to_json(spec.flat_exponent());
    return out;
  }
  out["leaves"] = spec.leaf_dims();
  Json exps = Json::array();
  for (double p : spec.exponents()) exps.push_back(exponent_to_json(p));
  out["exponents"] = exps;
  Json leaf = Json::array();
  for (double r : spec.leaf_exponents()) leaf.push_back(exponent_to_json(r));
  out["leaf_exponents"] = leaf;
  return out;
}

Operator operator_from_json(const Json& j, const TowerSpec& spec) {
  const Json& dim = require(j, "dim");
  if (!dim.is_number_integer()) throw SpecError("field \"dim\" must be an integer");
  const Index n = static_cast<Index>(dim.get<long long>());
  if (n != spec.dim()) {
    throw SpecError("operator dim " + std::to_string(n) + " does not match space dim " + std::to_string(spec.dim()));
  }
  const Json& rows = require(j, "rows");
  if (!rows.is_array() || static_cast<Index>(rows.size()) != n) {
    throw SpecError("field \"rows\" must hold " + std::to_string(n) + " rows");
  }
  Eigen::MatrixXd m(n, n);
  for (Index r = 0; r < n; ++r) {
    const Json& row = rows[static_cast<std::size_t>(r)];
    if (!row.is_array() || static_cast<Index>(row.size()) != n) {
      throw SpecError("rows[" + std::to_string(r) + "] must hold " + std::to_string(n) + " numbers");
    }
    for (Index c = 0; c < n; ++c) {
      const Json& v = row[static_cast<std::size_t>(c)];
      if (!v.is_number()) throw SpecError("rows[" + std::to_string(r) + "][" + std::to_string(c) + "] is not a number");
      m(r, c) = v.get<double>();
    }
  }
  return Operator(spec, std::move(m));
}

Json to_json(const Operator& op) {
  Json rows = Json::array();
  for (Index r = 0; r < op.dim(); ++r) rows.push_back(vector_json(op.matrix().row(r).transpose()));
  Json out;
  out["dim"] = op.dim();
  out["rows"] = rows;
  return out;
}

Json to_json(const Provenance& p) {
  Json out;
  out["seed"] = p.seed;
  out["restarts"] = p.restarts;
  out["iterations"] = p.iterations;
  out["tol"] = p.tol;
  return out;
}

Json to_json(const RadiusEstimate& r) {
  Json out;
  out["value"] = r.value;
  out["method"] = r.method;
  out["witness"] = vector_json(r.witness.x);
  out["functional"] = vector_json(r.witness.functional);
  out["pairing"] = r.witness.pairing;
  out["projection_level"] = r.projection_level;
  out["provenance"] = to_json(r.provenance);
  return out;
}

Json to_json(const NormEstimate& n) {
  Json out;
  out["value"] = n.value;
  out["method"] = n.method;
  out["witness"] = vector_json(n.witness);
  out["provenance"] = to_json(n.provenance);
  return out;
}

Json to_json(const IndexBudget& b) {
  Json out;
  out["restarts"] = b.restarts;
  out["inner_restarts"] = b.inner_restarts;
  out["inner_iterations"] = b.inner_iterations;
  out["final_factor"] = b.final_factor;
  out["initial_step"] = b.initial_step;
  out["final_step"] = b.final_step;
  out["max_sweeps"] = b.max_sweeps;
  out["tol"] = b.tol;
  return out;
}

Json to_json(const IndexEstimate& e) {
  Json out;
  out["value"] = e.value;
  out["label"] = "upper-bound estimate of the infimum";
  out["witness_radius"] = e.witness_radius;
  out["witness"] = to_json(e.witness);
  out["trace"] = e.trace;
  out["best_restart"] = e.best_restart;
  out["restart_variance"] = e.restart_variance;
  out["noisy"] = e.noisy;
  out["seed"] = e.seed;
  out["budget"] = to_json(e.budget);
  return out;
}

Json to_json(const CCReport& r) {
  Json out;
  out["samples"] = r.samples;
  out["checked"] = r.checked;
  out["skipped"] = r.skipped;
  out["max_violation"] = r.max_violation;
  out["max_lcc_violation"] = r.max_lcc_violation;
  out["min_b"] = r.min_b;
  out["tol"] = r.tol;
  out["passed"] = r.passed;
  return out;
}

Json read_json_file(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw SpecError("cannot open " + path);
  try {
    return Json::parse(in);
  } catch (const nlohmann::json::parse_error& e) {
    throw SpecError(path + ": " + e.what());
  }
}

void write_text_file(const std::string& path, const std::string& text) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw SpecError("cannot write " + path);
  out << text;
}

TowerSpec load_space(const std::string& path) {
  try {
    return space_from_json(read_json_file(path));
  } catch (const std::invalid_argument& e) {
    throw SpecError(path + ": " + e.what());
  }
}

Operator load_operator(const std::string& path, const TowerSpec& spec) {
  try {
    return operator_from_json(read_json_file(path), spec);
  } catch (const std::invalid_argument& e) {
    throw SpecError(path + ": " + e.what());
  }
}

std::string format_float(double v) {
  char buf[32];
  std::snprintf(buf, sizeof buf, "%.12g", v);
  return buf;
}

}  // namespace numindex
