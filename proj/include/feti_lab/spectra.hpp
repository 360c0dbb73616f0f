#pragma once

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <memory>
#include <random>
#include <string>
#include <vector>

#include <Eigen/Eigenvalues>

#include "feti_lab/assembly.hpp"
#include "feti_lab/error.hpp"
#include "feti_lab/mesh.hpp"
#include "feti_lab/parallel.hpp"
#include "feti_lab/substructuring.hpp"

namespace feti_lab {

struct LanczosOptions {
  double tol = 1e-8;
  std::uint64_t seed = 0x5EED;
  int max_iterations = 0;  // 0 means 3 * dim
};

struct LanczosResult {
  double lambda_min = 0.0;
  double lambda_max = 0.0;
  int iterations = 0;
  double residual_min = 0.0;  // ‖op x − λ x‖ / (λ ‖x‖) of the Ritz pairs
  double residual_max = 0.0;
  bool converged = false;

  double kappa() const noexcept { return lambda_max / lambda_min; }
  double residual() const noexcept { return std::max(residual_min, residual_max); }
};

class LanczosNotConverged : public ConvergenceError {
public:
  explicit LanczosNotConverged(const LanczosResult& best)
      : ConvergenceError("lanczos_extremal: extremal Ritz pairs not converged", best.residual(), best.iterations),
        best_(best) {}

  const LanczosResult& best() const noexcept { return best_; }

private:
  LanczosResult best_;
};

/// Extremal eigenvalues of an SPD operator `op(in, out)` of dimension `dim` by Lanczos with full
/// reorthogonalization. Both Ritz pairs are certified by their true residual
/// ‖op x − θ x‖ ≤ tol · θ ‖x‖. Throws LanczosNotConverged (carrying the best estimates) at the cap.
template <class Op>
LanczosResult lanczos_extremal(const Op& op, int dim, const LanczosOptions& opts = {}) {
  if (dim < 1) throw InvalidArgument("lanczos_extremal: empty operator");
  if (!(opts.tol > 0.0)) throw InvalidArgument("lanczos_extremal: tolerance must be positive");
  const int cap = opts.max_iterations > 0 ? opts.max_iterations : 3 * dim;
  const int max_basis = std::min(cap, dim);

  Matrix basis(dim, max_basis);
  std::vector<double> alpha, beta;  // beta[k] couples q_k and q_{k+1}
  {
    std::mt19937_64 rng(opts.seed);
    std::uniform_real_distribution<double> dist(-1.0, 1.0);
    Vector q0(dim);
    for (int i = 0; i < dim; ++i) q0(i) = dist(rng);
    basis.col(0) = q0.normalized();
  }

  LanczosResult res;
  Vector w(dim), ritz(dim), image(dim);

  const auto certify = [&](const Vector& y, double theta) {
    ritz.noalias() = basis.leftCols(y.size()) * y;
    op(ritz, image);
    return (image - theta * ritz).norm() / (std::abs(theta) * ritz.norm());
  };

  for (int k = 0; k < max_basis; ++k) {
    const Vector qk = basis.col(k);
    op(qk, w);
    const double a = qk.dot(w);
    alpha.push_back(a);
    w.noalias() -= a * basis.col(k);
    if (k > 0) w.noalias() -= beta[k - 1] * basis.col(k - 1);
    for (int pass = 0; pass < 2; ++pass) {
      const Vector c = basis.leftCols(k + 1).transpose() * w;
      w.noalias() -= basis.leftCols(k + 1) * c;
    }
    const double b = w.norm();
    const int size = k + 1;

    Eigen::SelfAdjointEigenSolver<Matrix> tri;
    Vector diag = Eigen::Map<const Vector>(alpha.data(), size);
    Vector sub = size > 1 ? Vector(Eigen::Map<const Vector>(beta.data(), size - 1)) : Vector(0);
    tri.computeFromTridiagonal(diag, sub, Eigen::ComputeEigenvectors);
    const Vector& theta = tri.eigenvalues();
    const Matrix& s = tri.eigenvectors();
    const double tmin = theta(0), tmax = theta(size - 1);

    res.iterations = size;
    res.lambda_min = tmin;
    res.lambda_max = tmax;
    const double est_min = b * std::abs(s(size - 1, 0)) / std::abs(tmin);
    const double est_max = b * std::abs(s(size - 1, size - 1)) / std::abs(tmax);
    res.residual_min = est_min;
    res.residual_max = est_max;

    const double scale = std::max(std::abs(tmax), std::abs(tmin));
    const bool exhausted = b <= 1e-14 * scale || size == max_basis;
    if ((est_min <= opts.tol && est_max <= opts.tol) || exhausted) {
      res.residual_min = certify(s.col(0), tmin);
      res.residual_max = certify(s.col(size - 1), tmax);
      if (res.residual_min <= opts.tol && res.residual_max <= opts.tol) {
        res.converged = true;
        return res;
      }
      if (exhausted) break;
    }
    beta.push_back(b);
    basis.col(k + 1) = w / b;
  }
  throw LanczosNotConverged(res);
}

enum class OperatorTag { Schur, Dual };

inline const char* to_string(OperatorTag tag) { return tag == OperatorTag::Schur ? "S" : "F"; }

inline OperatorTag parse_operator_tag(const std::string& s) {
  if (s == "S") return OperatorTag::Schur;
  if (s == "F") return OperatorTag::Dual;
  throw InvalidArgument("unknown operator '" + s + "' (expected S or F)");
}

/// Growth model of κ in 2D: m (1 + ln m) for F, (1 + ln m) / (H h) for S.
inline double kappa_bound_model(OperatorTag tag, int subdomains, int ratio) {
  const double log_term = 1.0 + std::log(static_cast<double>(ratio));
  if (tag == OperatorTag::Dual) return ratio * log_term;
  const double big_h = 1.0 / subdomains, h = big_h / ratio;
  return log_term / (big_h * h);
}

struct SpectralReport {
  OperatorTag tag = OperatorTag::Dual;
  int subdomains = 0;
  int ratio = 0;
  double lambda_min = 0.0;
  double lambda_max = 0.0;
  double kappa = 0.0;
  double bound_ratio = 0.0;  // κ / kappa_bound_model
  int iterations = 0;
  double residual = 0.0;
};

/// Operators of one (N, m) instance.
struct FetiProblem {
  StructuredMesh mesh;
  DofPartition part;
  DualOperator dual;

  const SchurOperator& schur() const noexcept { return dual.schur(); }
  const JumpOperator& jump() const noexcept { return dual.jump(); }
  const BlockStiffness& blocks() const noexcept { return dual.schur().blocks(); }

  static FetiProblem create(const MeshConfig& cfg, double inner_tol = 1e-12) {
    StructuredMesh mesh = build_mesh(cfg);
    DofPartition part = classify_dofs(mesh);
    SchurOperator schur(assemble_blocks(mesh, part));
    JumpOperator jump = jump_operator(part);
    DualOperator dual(std::move(schur), std::move(jump), inner_tol);
    return {std::move(mesh), std::move(part), std::move(dual)};
  }
};

inline LanczosResult extremal_eigenvalues(const FetiProblem& problem, OperatorTag tag, double tol) {
  const LanczosOptions opts{tol};
  if (tag == OperatorTag::Schur) {
    const auto op = [&](const Vector& in, Vector& out) { problem.schur().apply(in, out); };
    return lanczos_extremal(op, problem.schur().size(), opts);
  }
  const auto op = [&](const Vector& in, Vector& out) { out = problem.dual.apply(in); };
  return lanczos_extremal(op, problem.dual.size(), opts);
}

inline SpectralReport condition_number(OperatorTag tag, int subdomains, int ratio, double tol = 1e-8) {
  if (subdomains < 2 || ratio < 2) throw InvalidArgument("condition_number: need N >= 2 and m >= 2");
  const auto problem = FetiProblem::create({subdomains, ratio});
  const LanczosResult eig = extremal_eigenvalues(problem, tag, tol);
  SpectralReport rep;
  rep.tag = tag;
  rep.subdomains = subdomains;
  rep.ratio = ratio;
  rep.lambda_min = eig.lambda_min;
  rep.lambda_max = eig.lambda_max;
  rep.kappa = eig.kappa();
  rep.bound_ratio = rep.kappa / kappa_bound_model(tag, subdomains, ratio);
  rep.iterations = eig.iterations;
  rep.residual = eig.residual();
  return rep;
}

enum class ScalingAxis {
  FixRatio,       // m fixed, N varies
  FixSubdomains,  // N fixed, m varies
};

inline ScalingAxis parse_scaling_axis(const std::string& s) {
  if (s == "ratio") return ScalingAxis::FixRatio;
  if (s == "subdomains") return ScalingAxis::FixSubdomains;
  throw InvalidArgument("unknown scaling axis '" + s + "' (expected ratio or subdomains)");
}

inline const char* to_string(ScalingAxis axis) { return axis == ScalingAxis::FixRatio ? "ratio" : "subdomains"; }

/// Least-squares slope of ln y against ln x.
inline double log_log_slope(const std::vector<double>& x, const std::vector<double>& y) {
  if (x.size() != y.size() || x.size() < 2) throw InvalidArgument("log_log_slope: need matching series of length >= 2");
  const double n = static_cast<double>(x.size());
  double sx = 0, sy = 0, sxx = 0, sxy = 0;
  for (std::size_t i = 0; i < x.size(); ++i) {
    const double lx = std::log(x[i]), ly = std::log(y[i]);
    sx += lx;
    sy += ly;
    sxx += lx * lx;
    sxy += lx * ly;
  }
  return (n * sxy - sx * sy) / (n * sxx - sx * sx);
}

struct ScalingStudy {
  OperatorTag tag = OperatorTag::Dual;
  ScalingAxis axis = ScalingAxis::FixSubdomains;
  int fixed = 0;
  std::vector<SpectralReport> table;  // ordered by (N, m)
  double kappa_slope = 0.0;           // against ln of the varied parameter
  double lambda_min_slope = 0.0;
  double lambda_max_slope = 0.0;

  int varied(const SpectralReport& r) const noexcept {
    return axis == ScalingAxis::FixRatio ? r.subdomains : r.ratio;
  }
};

inline ScalingStudy scaling_study(OperatorTag tag, ScalingAxis axis, std::vector<int> values, int fixed,
                                  double tol = 1e-8) {
  if (values.size() < 3) throw InvalidArgument("scaling_study: need at least 3 grid points");
  std::sort(values.begin(), values.end());
  if (std::adjacent_find(values.begin(), values.end()) != values.end())
    throw InvalidArgument("scaling_study: grid values must be distinct");

  ScalingStudy study;
  study.tag = tag;
  study.axis = axis;
  study.fixed = fixed;
  study.table = parallel_map(static_cast<int>(values.size()), [&](int i) {
    return axis == ScalingAxis::FixRatio ? condition_number(tag, values[i], fixed, tol)
                                         : condition_number(tag, fixed, values[i], tol);
  });
  std::vector<double> x, kappa, lmin, lmax;
  for (const auto& r : study.table) {
    x.push_back(study.varied(r));
    kappa.push_back(r.kappa);
    lmin.push_back(r.lambda_min);
    lmax.push_back(r.lambda_max);
  }
  study.kappa_slope = log_log_slope(x, kappa);
  study.lambda_min_slope = log_log_slope(x, lmin);
  study.lambda_max_slope = log_log_slope(x, lmax);
  return study;
}

/// Quadratic forms of the coarse-interpolation Poincaré inequality on one square subdomain of
/// side H = 1 with an m × m grid: `stiffness` is the H¹ seminorm, `trace` is
/// v ↦ ‖v − I^H v‖²_{L²(∂Ω_j)} / H with the exact P1 edge mass matrix. Both are scale free.
struct PoincarePencil {
  Matrix stiffness;
  Matrix trace;
};

inline PoincarePencil poincare_pencil(int ratio) {
  if (ratio < 2) throw InvalidArgument("poincare_constant: need m >= 2");
  const StructuredMesh mesh = build_mesh({1, ratio});
  const auto n = static_cast<Eigen::Index>(mesh.nodes.size());
  const double big_h = 1.0, h = big_h / ratio;

  // Boundary loop, counter-clockwise from the origin.
  std::vector<int> loop;
  for (int i = 0; i < ratio; ++i) loop.push_back(mesh.node(i, 0));
  for (int j = 0; j < ratio; ++j) loop.push_back(mesh.node(ratio, j));
  for (int i = ratio; i > 0; --i) loop.push_back(mesh.node(i, ratio));
  for (int j = ratio; j > 0; --j) loop.push_back(mesh.node(0, j));

  // v − I^H v as a matrix: identity minus the interpolation through the four vertices.
  Matrix residual = Matrix::Identity(n, n);
  for (int vertex : {mesh.node(0, 0), mesh.node(ratio, 0), mesh.node(0, ratio), mesh.node(ratio, ratio)}) {
    Vector e = Vector::Zero(n);
    e(vertex) = 1.0;
    residual.col(vertex) -= coarse_interpolation(mesh, e);
  }

  Matrix mass = Matrix::Zero(n, n);
  for (std::size_t k = 0; k < loop.size(); ++k) {
    const int a = loop[k], b = loop[(k + 1) % loop.size()];
    mass(a, a) += 2.0 * h / 6.0;
    mass(b, b) += 2.0 * h / 6.0;
    mass(a, b) += h / 6.0;
    mass(b, a) += h / 6.0;
  }

  PoincarePencil pencil;
  pencil.stiffness = Matrix(assemble_conforming(mesh));
  pencil.trace = residual.transpose() * mass * residual / big_h;
  return pencil;
}

struct PoincareReport {
  int ratio = 0;
  double c_star = 0.0;
  double ratio_log = 0.0;  // c* / (1 + ln m)
};

namespace detail {

// Q A Q restricted to the complement of the constants, with Q the Householder reflection
// sending the normalized constant vector to e_0.
inline Matrix deflate_constants(const Matrix& a) {
  const auto n = a.rows();
  Vector u = Vector::Constant(n, 1.0 / std::sqrt(static_cast<double>(n)));
  u(0) -= 1.0;
  u.normalize();
  const Vector au = a * u;
  const double uau = u.dot(au);
  Matrix r = a;
  r.noalias() -= 2.0 * u * au.transpose();
  r.noalias() -= 2.0 * au * u.transpose();
  r.noalias() += 4.0 * uau * u * u.transpose();
  return r.bottomRightCorner(n - 1, n - 1);
}

}  // namespace detail

/// Sharp constant c*(m) = max over v ⊥ 1 of ‖v − I^H v‖²_{L²(∂Ω_j)} / (H |v|²_{H¹(Ω_j)}).
inline PoincareReport poincare_constant(int ratio) {
  const PoincarePencil pencil = poincare_pencil(ratio);
  const Matrix k = detail::deflate_constants(pencil.stiffness);
  const Matrix q = detail::deflate_constants(pencil.trace);
  Eigen::GeneralizedSelfAdjointEigenSolver<Matrix> ges(q, k, Eigen::EigenvaluesOnly | Eigen::Ax_lBx);
  if (ges.info() != Eigen::Success) throw AssemblyError("poincare_constant: generalized eigensolver failed");
  PoincareReport rep;
  rep.ratio = ratio;
  rep.c_star = ges.eigenvalues().maxCoeff();
  rep.ratio_log = rep.c_star / (1.0 + std::log(static_cast<double>(ratio)));
  return rep;
}

}  // namespace feti_lab
