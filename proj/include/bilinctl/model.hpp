#pragma once

#include <cstdint>
#include <functional>
#include <string>
#include <string_view>
#include <variant>
#include <vector>

#include "bilinctl/matlie.hpp"

namespace bilinctl {

/// The control set of a bilinear system x' = M(t) x, M(t) in the family.
struct MatrixFamily {
  std::vector<Matrix> matrices;
  std::vector<std::string> labels;  // empty, or one per matrix

  int dimension() const {
    return matrices.empty() ? 0 : static_cast<int>(matrices.front().rows());
  }
};

using VectorField = std::function<Vector(const Vector&)>;

/// A finite family of smooth vector fields x' = f_u(x).
struct SmoothFamily {
  std::vector<VectorField> fields;
  std::vector<std::string> labels;
  bool homogeneous = false;
};

/// A validated system definition. Immutable once built.
class SystemSpec {
 public:
  static SystemSpec bilinear(std::string name, MatrixFamily family);
  static SystemSpec smooth(std::string name, int n, SmoothFamily family);

  const std::string& name() const { return name_; }
  int n() const { return n_; }
  bool is_bilinear() const {
    return std::holds_alternative<MatrixFamily>(kind_);
  }
  /// Throws InvalidInput when the spec is not bilinear.
  const MatrixFamily& family() const;
  /// Throws InvalidInput when the spec is not a smooth family.
  const SmoothFamily& smooth_family() const;

  int field_count() const;
  const std::vector<std::string>& labels() const;
  /// Value of admissible field `index` at x.
  Vector evaluate(int index, const Vector& x) const;

  /// Name of the built-in corpus entry this spec came from, if any.
  const std::string& builtin_name() const { return builtin_; }
  SystemSpec with_builtin_name(std::string builtin) const;
  /// Bilinear spec with every matrix multiplied by `factor`.
  SystemSpec scaled(double factor) const;

 private:
  SystemSpec() = default;

  std::string name_;
  int n_ = 0;
  std::variant<MatrixFamily, SmoothFamily> kind_;
  std::string builtin_;
};

enum class ScheduleMode {
  kAttainable,  // durations >= 0
  kOrbit,       // durations of any sign
};

struct Segment {
  int index = 0;
  double duration = 0.0;
};

/// Piecewise-constant control plan: apply field `index` for `duration`.
struct ControlSchedule {
  std::vector<Segment> segments;
  ScheduleMode mode = ScheduleMode::kAttainable;

  /// Sum of |duration|.
  double total_time() const;
  /// Throws InvalidInput on bad indices, non-finite durations, or negative
  /// durations in attainable mode.
  void validate(int field_count) const;
};

/// Tangential part Mx - <x, Mx> x of the linear field at a unit vector x.
Vector project_sphere(const Matrix& m, const Vector& x);

/// Parses a system document (JSON). Keys: n, kind ("bilinear" | "builtin"),
/// matrices (row-major n×n arrays), labels, builtin_name, name.
SystemSpec parse_system(std::string_view text);

/// Inverse of parse_system for specs it can represent. Built-in smooth
/// systems serialize by name.
std::string serialize_system(const SystemSpec& spec);

/// Names accepted by builtin_corpus.
const std::vector<std::string>& builtin_names();

/// so3, planar_jd, expanding_pair, identity_only, example1.
SystemSpec builtin_corpus(std::string_view name);

/// m matrices of size n×n with iid standard normal entries.
SystemSpec random_system(int n, int m, std::uint64_t seed);

/// The bump-like function of the non-Lie-determined planar example:
/// zero exactly on {x = 0, y <= 0}.
double example1_phi(double x, double y);

}  // namespace bilinctl
