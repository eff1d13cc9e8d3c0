#include "bilinctl/matlie.hpp"

#include <algorithm>
#include <cmath>
#include <string>

#include <unsupported/Eigen/MatrixFunctions>

#include "bilinctl/errors.hpp"

namespace bilinctl {

namespace {

void require_square(const Matrix& m, const char* what) {
  if (m.rows() != m.cols() || m.rows() == 0) {
    throw InvalidInput(std::string(what) + ": matrix must be square and nonempty");
  }
}

// Classical Gram-Schmidt, run twice for stability. Returns the residual of
// `candidate` after projection onto span(basis).
Matrix project_out(const std::vector<Matrix>& basis, Matrix candidate) {
  for (int pass = 0; pass < 2; ++pass) {
    for (const Matrix& b : basis) {
      candidate -= frobenius_dot(b, candidate) * b;
    }
  }
  return candidate;
}

}  // namespace

Matrix bracket(const Matrix& a, const Matrix& b) {
  require_square(a, "bracket");
  require_square(b, "bracket");
  if (a.rows() != b.rows()) {
    throw InvalidInput("bracket: dimension mismatch (" +
                       std::to_string(a.rows()) + " vs " +
                       std::to_string(b.rows()) + ")");
  }
  const Matrix ab = a * b;
  const Matrix ba = b * a;
  return ab - ba;
}

LieBasis lie_closure(std::span<const Matrix> generators, double tol,
                     std::optional<int> depth_cap) {
  if (generators.empty()) {
    throw InvalidInput("lie_closure: empty generator list");
  }
  if (!(tol > 0.0)) {
    throw InvalidInput("lie_closure: tol must be positive");
  }
  const Eigen::Index n = generators.front().rows();
  for (const Matrix& g : generators) {
    require_square(g, "lie_closure");
    if (g.rows() != n) {
      throw InvalidInput("lie_closure: generators have different dimensions");
    }
    if (!g.allFinite()) {
      throw InvalidInput("lie_closure: non-finite generator entry");
    }
  }
  const int full_dim = static_cast<int>(n * n);
  const int cap = depth_cap.value_or(2 * full_dim);
  if (cap < 0) {
    throw InvalidInput("lie_closure: depth_cap must be non-negative");
  }

  LieBasis out;
  out.n = static_cast<int>(n);
  out.tol = tol;
  std::vector<int> depth_of;

  double scale = 0.0;
  for (const Matrix& g : generators) {
    scale = std::max(scale, g.norm());
  }

  auto admit = [&](const Matrix& candidate, int depth) {
    if (out.dim() >= full_dim) {
      return false;
    }
    const Matrix residual = project_out(out.basis, candidate);
    const double r = residual.norm();
    if (!(r > tol * scale)) {
      return false;
    }
    out.basis.push_back(residual / r);
    depth_of.push_back(depth);
    scale = std::max(scale, 1.0);
    return true;
  };

  for (const Matrix& g : generators) {
    admit(g, 1);
  }

  std::size_t frontier = 0;
  bool grew = true;
  while (out.rounds < cap && out.dim() < full_dim) {
    const std::size_t size_before = out.basis.size();
    for (std::size_t i = 0; i < size_before; ++i) {
      for (std::size_t j = std::max(i + 1, frontier); j < size_before; ++j) {
        const Matrix c = bracket(out.basis[i], out.basis[j]);
        scale = std::max(scale, c.norm());
        admit(c, depth_of[i] + depth_of[j]);
      }
    }
    ++out.rounds;
    frontier = size_before;
    grew = out.basis.size() > size_before;
    if (!grew) {
      break;
    }
  }
  out.converged = !grew || out.dim() >= full_dim || out.dim() <= 1;
  out.depth = depth_of.empty()
                  ? 0
                  : *std::max_element(depth_of.begin(), depth_of.end());
  return out;
}

int numerical_rank(const Eigen::Ref<const Matrix>& m, double tol,
                   Vector* singular_values) {
  if (m.size() == 0) {
    if (singular_values != nullptr) {
      singular_values->resize(0);
    }
    return 0;
  }
  Eigen::JacobiSVD<Matrix> svd(m);
  const Vector& s = svd.singularValues();
  if (singular_values != nullptr) {
    *singular_values = s;
  }
  if (s.size() == 0 || !(s(0) > 0.0)) {
    return 0;
  }
  const double cutoff = tol * s(0);
  int rank = 0;
  for (Eigen::Index k = 0; k < s.size(); ++k) {
    if (s(k) > cutoff) {
      ++rank;
    }
  }
  return rank;
}

SubspaceReport evaluate_at(const LieBasis& basis, const Vector& x) {
  if (x.size() != basis.n) {
    throw InvalidInput("evaluate_at: point has wrong dimension");
  }
  if (!x.allFinite() || x.norm() == 0.0) {
    throw InvalidInput("evaluate_at: point must be finite and nonzero");
  }
  SubspaceReport report;
  report.vectors.resize(basis.n, basis.dim());
  for (int k = 0; k < basis.dim(); ++k) {
    report.vectors.col(k) = basis.basis[k] * x;
  }
  report.dim = numerical_rank(report.vectors, basis.tol, &report.singular_values);
  return report;
}

Matrix matrix_exponential(const Matrix& a, double t) {
  require_square(a, "matrix_exponential");
  if (!a.allFinite() || !std::isfinite(t)) {
    throw InvalidInput("matrix_exponential: non-finite input");
  }
  const Matrix scaled = t * a;
  Matrix result = scaled.exp();
  if (!result.allFinite()) {
    throw NumericalFailure("matrix_exponential: result overflowed to non-finite entries");
  }
  return result;
}

}  // namespace bilinctl
