#include "bilinctl/model.hpp"

#include <cmath>
#include <random>
#include <type_traits>
#include <string>
#include <utility>

#include <json.hpp>

#include "bilinctl/errors.hpp"

namespace bilinctl {

using nlohmann::json;

SystemSpec SystemSpec::bilinear(std::string name, MatrixFamily family) {
  if (family.matrices.empty()) {
    throw InvalidInput("bilinear system needs at least one matrix");
  }
  const Eigen::Index n = family.matrices.front().rows();
  if (n < 1) {
    throw InvalidInput("state dimension must be at least 1");
  }
  for (const Matrix& m : family.matrices) {
    if (m.rows() != m.cols()) {
      throw InvalidInput("non-square matrix in family");
    }
    if (m.rows() != n) {
      throw InvalidInput("dimension mismatch across family matrices");
    }
    if (!m.allFinite()) {
      throw InvalidInput("non-finite matrix entry");
    }
  }
  if (!family.labels.empty() && family.labels.size() != family.matrices.size()) {
    throw InvalidInput("labels must match matrices one to one");
  }
  SystemSpec spec;
  spec.name_ = std::move(name);
  spec.n_ = static_cast<int>(n);
  spec.kind_ = std::move(family);
  return spec;
}

SystemSpec SystemSpec::smooth(std::string name, int n, SmoothFamily family) {
  if (n < 1) {
    throw InvalidInput("state dimension must be at least 1");
  }
  if (family.fields.empty()) {
    throw InvalidInput("smooth system needs at least one field");
  }
  for (const VectorField& f : family.fields) {
    if (!f) {
      throw InvalidInput("empty vector field");
    }
  }
  if (!family.labels.empty() && family.labels.size() != family.fields.size()) {
    throw InvalidInput("labels must match fields one to one");
  }
  SystemSpec spec;
  spec.name_ = std::move(name);
  spec.n_ = n;
  spec.kind_ = std::move(family);
  return spec;
}

const MatrixFamily& SystemSpec::family() const {
  if (const auto* f = std::get_if<MatrixFamily>(&kind_)) {
    return *f;
  }
  throw InvalidInput("system '" + name_ + "' is not bilinear");
}

const SmoothFamily& SystemSpec::smooth_family() const {
  if (const auto* f = std::get_if<SmoothFamily>(&kind_)) {
    return *f;
  }
  throw InvalidInput("system '" + name_ + "' is not a smooth family");
}

int SystemSpec::field_count() const {
  return std::visit(
      [](const auto& k) -> int {
        if constexpr (std::is_same_v<std::decay_t<decltype(k)>, MatrixFamily>) {
          return static_cast<int>(k.matrices.size());
        } else {
          return static_cast<int>(k.fields.size());
        }
      },
      kind_);
}

const std::vector<std::string>& SystemSpec::labels() const {
  return std::visit(
      [](const auto& k) -> const std::vector<std::string>& { return k.labels; },
      kind_);
}

Vector SystemSpec::evaluate(int index, const Vector& x) const {
  if (index < 0 || index >= field_count()) {
    throw InvalidInput("field index out of range");
  }
  if (x.size() != n_) {
    throw InvalidInput("state has wrong dimension");
  }
  if (is_bilinear()) {
    return family().matrices[index] * x;
  }
  Vector v = smooth_family().fields[index](x);
  if (v.size() != n_) {
    throw NumericalFailure("vector field returned wrong dimension");
  }
  return v;
}

SystemSpec SystemSpec::with_builtin_name(std::string builtin) const {
  SystemSpec copy = *this;
  copy.builtin_ = std::move(builtin);
  return copy;
}

SystemSpec SystemSpec::scaled(double factor) const {
  MatrixFamily f = family();
  for (Matrix& m : f.matrices) {
    m *= factor;
  }
  return bilinear(name_ + "_scaled", std::move(f));
}

double ControlSchedule::total_time() const {
  double total = 0.0;
  for (const Segment& s : segments) {
    total += std::abs(s.duration);
  }
  return total;
}

void ControlSchedule::validate(int field_count) const {
  for (const Segment& s : segments) {
    if (s.index < 0 || s.index >= field_count) {
      throw InvalidInput("schedule references field " + std::to_string(s.index) +
                         " of " + std::to_string(field_count));
    }
    if (!std::isfinite(s.duration)) {
      throw InvalidInput("schedule has a non-finite duration");
    }
    if (mode == ScheduleMode::kAttainable && s.duration < 0.0) {
      throw InvalidInput("negative duration in attainable-mode schedule");
    }
  }
}

Vector project_sphere(const Matrix& m, const Vector& x) {
  if (m.rows() != m.cols() || m.rows() != x.size()) {
    throw InvalidInput("project_sphere: dimension mismatch");
  }
  if (!(std::abs(x.norm() - 1.0) <= 1e-9)) {
    throw InvalidInput("project_sphere: x must be a unit vector");
  }
  const Vector v = m * x;
  return v - x.dot(v) * x;
}

namespace {

Matrix parse_matrix(const json& rows, int n) {
  if (!rows.is_array() || rows.empty()) {
    throw InvalidInput("matrix must be a nonempty array of rows");
  }
  const std::size_t r = rows.size();
  for (const json& row : rows) {
    if (!row.is_array()) {
      throw InvalidInput("matrix row must be an array");
    }
    if (row.size() != r) {
      throw InvalidInput("non-square matrix (" + std::to_string(r) + " rows, row of length " +
                         std::to_string(row.size()) + ")");
    }
  }
  if (static_cast<int>(r) != n) {
    throw InvalidInput("dimension mismatch: matrix is " + std::to_string(r) + "x" +
                       std::to_string(r) + " but n = " + std::to_string(n));
  }
  Matrix m(n, n);
  for (int i = 0; i < n; ++i) {
    for (int j = 0; j < n; ++j) {
      const json& v = rows[i][j];
      if (!v.is_number()) {
        throw InvalidInput("matrix entries must be numbers");
      }
      m(i, j) = v.get<double>();
      if (!std::isfinite(m(i, j))) {
        throw InvalidInput("non-finite matrix entry");
      }
    }
  }
  return m;
}

SystemSpec spec_from_json(const json& doc) {
  if (!doc.is_object()) {
    throw InvalidInput("system document must be an object");
  }
  const std::string kind = doc.value("kind", std::string("bilinear"));
  std::string name = doc.value("name", std::string());

  if (kind == "builtin") {
    if (!doc.contains("builtin_name") || !doc["builtin_name"].is_string()) {
      throw InvalidInput("builtin document needs a string builtin_name");
    }
    SystemSpec spec = builtin_corpus(doc["builtin_name"].get<std::string>());
    if (doc.contains("n") && doc["n"] != spec.n()) {
      throw InvalidInput("dimension mismatch: builtin '" + spec.name() + "' has n = " +
                         std::to_string(spec.n()));
    }
    return spec;
  }
  if (kind != "bilinear") {
    throw InvalidInput("unknown system kind '" + kind + "'");
  }
  if (!doc.contains("n") || !doc["n"].is_number_integer() || doc["n"].get<long long>() < 1) {
    throw InvalidInput("n must be a positive integer");
  }
  const int n = doc["n"].get<int>();
  if (!doc.contains("matrices") || !doc["matrices"].is_array() || doc["matrices"].empty()) {
    throw InvalidInput("matrices must be a nonempty array");
  }
  MatrixFamily family;
  for (const json& m : doc["matrices"]) {
    family.matrices.push_back(parse_matrix(m, n));
  }
  if (doc.contains("labels")) {
    const json& labels = doc["labels"];
    if (!labels.is_array()) {
      throw InvalidInput("labels must be an array of strings");
    }
    for (const json& l : labels) {
      if (!l.is_string()) {
        throw InvalidInput("labels must be an array of strings");
      }
      family.labels.push_back(l.get<std::string>());
    }
  }
  if (name.empty()) {
    name = "custom";
  }
  return SystemSpec::bilinear(std::move(name), std::move(family));
}

}  // namespace

SystemSpec parse_system(std::string_view text) {
  json doc;
  try {
    doc = json::parse(text);
  } catch (const json::exception& e) {
    throw InvalidInput(std::string("malformed system document: ") + e.what());
  }
  try {
    return spec_from_json(doc);
  } catch (const json::exception& e) {
    throw InvalidInput(std::string("invalid system document: ") + e.what());
  }
}

std::string serialize_system(const SystemSpec& spec) {
  json doc;
  doc["name"] = spec.name();
  doc["n"] = spec.n();
  if (!spec.builtin_name().empty()) {
    doc["kind"] = "builtin";
    doc["builtin_name"] = spec.builtin_name();
    return doc.dump(2);
  }
  if (!spec.is_bilinear()) {
    throw InvalidInput("smooth systems can only be serialized as builtins");
  }
  doc["kind"] = "bilinear";
  json matrices = json::array();
  for (const Matrix& m : spec.family().matrices) {
    json rows = json::array();
    for (Eigen::Index i = 0; i < m.rows(); ++i) {
      json row = json::array();
      for (Eigen::Index j = 0; j < m.cols(); ++j) {
        row.push_back(m(i, j));
      }
      rows.push_back(std::move(row));
    }
    matrices.push_back(std::move(rows));
  }
  doc["matrices"] = std::move(matrices);
  if (!spec.labels().empty()) {
    doc["labels"] = spec.labels();
  }
  return doc.dump(2);
}

const std::vector<std::string>& builtin_names() {
  static const std::vector<std::string> names = {
      "so3", "planar_jd", "expanding_pair", "identity_only", "example1"};
  return names;
}

double example1_phi(double x, double y) {
  const double rho = y > 0.0 ? std::exp(-1.0 / y) : 0.0;
  return x * x + rho;
}

SystemSpec builtin_corpus(std::string_view name) {
  const Matrix j = (Matrix(2, 2) << 0, -1, 1, 0).finished();
  const Matrix d = (Matrix(2, 2) << 1, 0, 0, -1).finished();
  const Matrix i2 = Matrix::Identity(2, 2);

  SystemSpec spec = [&]() {
    if (name == "so3") {
      MatrixFamily f;
      f.matrices = {(Matrix(3, 3) << 0, 0, 0, 0, 0, -1, 0, 1, 0).finished(),
                    (Matrix(3, 3) << 0, 0, 1, 0, 0, 0, -1, 0, 0).finished(),
                    (Matrix(3, 3) << 0, -1, 0, 1, 0, 0, 0, 0, 0).finished()};
      f.labels = {"L1", "L2", "L3"};
      return SystemSpec::bilinear("so3", std::move(f));
    }
    if (name == "planar_jd") {
      return SystemSpec::bilinear("planar_jd", MatrixFamily{{j, d}, {"J", "D"}});
    }
    if (name == "expanding_pair") {
      return SystemSpec::bilinear("expanding_pair",
                                  MatrixFamily{{i2 + j, i2 + d}, {"I+J", "I+D"}});
    }
    if (name == "identity_only") {
      return SystemSpec::bilinear("identity_only", MatrixFamily{{i2}, {"I"}});
    }
    if (name == "example1") {
      SmoothFamily f;
      f.fields = {
          [](const Vector&) { return Vector{{0.0, 1.0}}; },
          [](const Vector& p) { return Vector{{0.0, -example1_phi(p(0), p(1))}}; },
          [](const Vector& p) { return Vector{{example1_phi(p(0), p(1)), 0.0}}; },
          [](const Vector& p) { return Vector{{-example1_phi(p(0), p(1)), 0.0}}; },
      };
      f.labels = {"f1", "f2", "f3+", "f3-"};
      f.homogeneous = false;
      return SystemSpec::smooth("example1", 2, std::move(f));
    }
    throw InvalidInput("unknown builtin system '" + std::string(name) + "'");
  }();
  return spec.with_builtin_name(std::string(name));
}

SystemSpec random_system(int n, int m, std::uint64_t seed) {
  if (n < 1 || m < 1) {
    throw InvalidInput("random_system: n and m must be positive");
  }
  std::mt19937_64 rng(seed);
  std::normal_distribution<double> normal(0.0, 1.0);
  MatrixFamily f;
  for (int k = 0; k < m; ++k) {
    Matrix a(n, n);
    for (int i = 0; i < n; ++i) {
      for (int j = 0; j < n; ++j) {
        a(i, j) = normal(rng);
      }
    }
    f.matrices.push_back(std::move(a));
  }
  return SystemSpec::bilinear("random_n" + std::to_string(n) + "_m" + std::to_string(m) +
                                  "_s" + std::to_string(seed),
                              std::move(f));
}

}  // namespace bilinctl
