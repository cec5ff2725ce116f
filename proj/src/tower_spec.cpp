#include "numindex/tower_spec.hpp"

#include "numindex/errors.hpp"

#include <cmath>
#include <sstream>

namespace numindex {

namespace {

bool smooth_exponent(double p) { return std::isfinite(p) && p > 1.0; }

std::string format_exponent(double p) {
  if (std::isinf(p)) return "inf";
  std::ostringstream out;
  out.precision(12);
  out << p;
  return out.str();
}

}  // namespace

double conjugate_exponent(double p) {
  if (std::isnan(p) || p < 1.0) throw SpecError("exponent must lie in [1, inf]");
  if (p == 1.0) return kInfinity;
  if (std::isinf(p)) return 1.0;
  return p / (p - 1.0);
}

TowerSpec TowerSpec::build(Data data) {
  data.offsets.assign(data.leaf_dims.size() + 1, 0);
  for (std::size_t n = 0; n < data.leaf_dims.size(); ++n) {
    data.offsets[n + 1] = data.offsets[n] + data.leaf_dims[n];
  }
  return TowerSpec(std::make_shared<const Data>(std::move(data)));
}

TowerSpec TowerSpec::flat(Index dim, double p) {
  if (dim < 1) throw SpecError("flat space dimension must be at least 1");
  if (std::isnan(p) || p < 1.0) throw SpecError("flat exponent must lie in [1, inf]");
  Data data;
  data.leaf_dims.assign(static_cast<std::size_t>(dim), 1);
  data.exponents.assign(static_cast<std::size_t>(dim - 1), p);
  data.leaf_exponents.assign(static_cast<std::size_t>(dim), p);
  data.flat = true;
  data.flat_p = p;
  return build(std::move(data));
}

TowerSpec TowerSpec::tower(std::vector<Index> leaf_dims, std::vector<double> exponents) {
  if (leaf_dims.empty()) throw SpecError("tower needs at least one leaf");
  if (exponents.size() + 1 != leaf_dims.size()) {
    throw SpecError("tower needs exactly one combining exponent per leaf after the first");
  }
  std::vector<double> leaf_exponents(leaf_dims.size());
  if (exponents.empty()) {
    if (leaf_dims[0] != 1) {
      throw SpecError("a single-leaf space of dimension > 1 must be declared flat");
    }
    leaf_exponents[0] = 2.0;
  } else {
    leaf_exponents[0] = exponents[0];
    for (std::size_t n = 1; n < leaf_dims.size(); ++n) leaf_exponents[n] = exponents[n - 1];
  }
  return tower(std::move(leaf_dims), std::move(exponents), std::move(leaf_exponents));
}

TowerSpec TowerSpec::tower(std::vector<Index> leaf_dims, std::vector<double> exponents,
                           std::vector<double> leaf_exponents) {
  if (leaf_dims.empty()) throw SpecError("tower needs at least one leaf");
  if (exponents.size() + 1 != leaf_dims.size()) {
    throw SpecError("tower needs exactly one combining exponent per leaf after the first");
  }
  if (leaf_exponents.size() != leaf_dims.size()) {
    throw SpecError("tower needs exactly one leaf exponent per leaf");
  }
  for (Index d : leaf_dims) {
    if (d < 1) throw SpecError("leaf dimensions must be at least 1");
  }
  for (double p : exponents) {
    if (!smooth_exponent(p)) {
      throw SpecError("combining exponents of a multi-level tower must lie in (1, inf); "
                      "use a flat space for p = 1 or p = inf");
    }
  }
  for (std::size_t n = 0; n < leaf_dims.size(); ++n) {
    if (leaf_dims[n] > 1 && !smooth_exponent(leaf_exponents[n])) {
      throw SpecError("leaf exponents of a multi-level tower must lie in (1, inf)");
    }
  }
  Data data;
  data.leaf_dims = std::move(leaf_dims);
  data.exponents = std::move(exponents);
  data.leaf_exponents = std::move(leaf_exponents);
  return build(std::move(data));
}

Index TowerSpec::level_dim(int m) const {
  if (m < 0 || m > depth()) throw LevelError("level " + std::to_string(m) + " outside [0, depth]");
  return data_->offsets[static_cast<std::size_t>(m)];
}

Index TowerSpec::leaf_dim(int n) const {
  check_level(n);
  return data_->leaf_dims[static_cast<std::size_t>(n - 1)];
}

Index TowerSpec::leaf_offset(int n) const {
  check_level(n);
  return data_->offsets[static_cast<std::size_t>(n - 1)];
}

double TowerSpec::combining_exponent(int n) const {
  if (n < 1 || n >= depth()) {
    throw LevelError("combining exponent index " + std::to_string(n) + " outside [1, depth - 1]");
  }
  return data_->exponents[static_cast<std::size_t>(n - 1)];
}

double TowerSpec::leaf_exponent(int n) const {
  check_level(n);
  return data_->leaf_exponents[static_cast<std::size_t>(n - 1)];
}

bool TowerSpec::is_smooth() const {
  if (data_->flat) return smooth_exponent(data_->flat_p) || dim() == 1;
  return true;
}

void TowerSpec::check_level(int m) const {
  if (m < 1 || m > depth()) {
    throw LevelError("level " + std::to_string(m) + " outside [1, " + std::to_string(depth()) + "]");
  }
}

TowerSpec TowerSpec::truncated(int m) const {
  check_level(m);
  if (m == depth()) return *this;
  if (data_->flat) return flat(m, data_->flat_p);
  const auto count = static_cast<std::size_t>(m);
  Data data;
  data.leaf_dims.assign(data_->leaf_dims.begin(), data_->leaf_dims.begin() + count);
  data.exponents.assign(data_->exponents.begin(), data_->exponents.begin() + count - 1);
  data.leaf_exponents.assign(data_->leaf_exponents.begin(),
                             data_->leaf_exponents.begin() + count);
  return build(std::move(data));
}

TowerSpec TowerSpec::dual() const {
  if (data_->flat) return flat(dim(), conjugate_exponent(data_->flat_p));
  Data data = *data_;
  for (double& p : data.exponents) p = conjugate_exponent(p);
  for (double& r : data.leaf_exponents) r = conjugate_exponent(r);
  return build(std::move(data));
}

std::string TowerSpec::describe() const {
  std::ostringstream out;
  if (data_->flat) {
    out << "flat l_" << format_exponent(data_->flat_p) << "^" << dim();
    return out.str();
  }
  out << "tower leaves=[";
  for (std::size_t n = 0; n < data_->leaf_dims.size(); ++n) {
    out << (n ? "," : "") << data_->leaf_dims[n];
  }
  out << "] exponents=[";
  for (std::size_t n = 0; n < data_->exponents.size(); ++n) {
    out << (n ? "," : "") << format_exponent(data_->exponents[n]);
  }
  out << "]";
  return out.str();
}

bool operator==(const TowerSpec& a, const TowerSpec& b) {
  if (a.data_ == b.data_) return true;
  return a.data_->flat == b.data_->flat && a.data_->leaf_dims == b.data_->leaf_dims &&
         a.data_->exponents == b.data_->exponents &&
         a.data_->leaf_exponents == b.data_->leaf_exponents &&
         (!a.data_->flat || a.data_->flat_p == b.data_->flat_p);
}

}  // namespace numindex
