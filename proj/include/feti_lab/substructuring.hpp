#pragma once

#include <cmath>
#include <memory>
#include <string>
#include <utility>
#include <vector>

#include <Eigen/Cholesky>
#include <Eigen/SparseCholesky>

#include "feti_lab/assembly.hpp"
#include "feti_lab/error.hpp"
#include "feti_lab/mesh.hpp"

namespace feti_lab {

/// Largest local dual dimension for which dense S or F are formed.
inline constexpr int kDenseCap = 4096;

struct CgResult {
  Vector x;
  int iterations = 0;
  double relative_residual = 0.0;
  bool converged = false;
};

/// Unpreconditioned conjugate gradients for an SPD operator given as `op(in, out)`.
/// Stops on ‖r‖ ≤ tol·‖b‖; never throws, the caller decides what non-convergence means.
template <class Op>
CgResult conjugate_gradient(const Op& op, const Vector& rhs, double tol, int max_iterations) {
  CgResult res;
  res.x = Vector::Zero(rhs.size());
  const double bnorm = rhs.norm();
  if (bnorm == 0.0) {
    res.converged = true;
    return res;
  }
  Vector r = rhs;
  Vector p = r;
  Vector q(rhs.size());
  double rr = r.squaredNorm();
  while (res.iterations < max_iterations) {
    op(p, q);
    const double pq = p.dot(q);
    if (!(pq > 0.0)) break;  // operator not SPD along p
    const double alpha = rr / pq;
    res.x.noalias() += alpha * p;
    r.noalias() -= alpha * q;
    ++res.iterations;
    const double rr_new = r.squaredNorm();
    if (std::sqrt(rr_new) <= tol * bnorm) {
      rr = rr_new;
      res.converged = true;
      break;
    }
    p = r + (rr_new / rr) * p;
    rr = rr_new;
  }
  res.relative_residual = std::sqrt(rr) / bnorm;
  return res;
}

/// Schur complement S = A_ΔΔ − A_rΔᵀ A_rr⁻¹ A_rΔ onto the local dual DOFs, applied matrix-free
/// with a sparse Cholesky factorization of A_rr computed once at construction.
class SchurOperator {
public:
  using Factor = Eigen::SimplicialLLT<SparseMatrix>;

  explicit SchurOperator(std::shared_ptr<const BlockStiffness> blocks) : blocks_(std::move(blocks)) {
    if (!blocks_) throw InvalidArgument("SchurOperator: null blocks");
    auto factor = std::make_shared<Factor>();
    if (blocks_->r_count() > 0) {
      factor->compute(blocks_->rr);
      if (factor->info() != Eigen::Success)
        throw AssemblyError("SchurOperator: A_rr is not symmetric positive definite");
    }
    factor_ = std::move(factor);
  }

  explicit SchurOperator(BlockStiffness blocks)
      : SchurOperator(std::make_shared<const BlockStiffness>(std::move(blocks))) {}

  int size() const noexcept { return blocks_->dual_count(); }
  const BlockStiffness& blocks() const noexcept { return *blocks_; }
  std::shared_ptr<const BlockStiffness> shared_blocks() const noexcept { return blocks_; }

  /// Interior and corner values of the discrete harmonic extension, A_rr v_r = −A_rΔ v_Δ.
  Vector extend_r(const Vector& dual) const {
    check(dual, "harmonic_extension");
    if (blocks_->r_count() == 0) return Vector();
    const Vector rhs = -(blocks_->rd * dual);
    Vector vr = factor_->solve(rhs);
    if (factor_->info() != Eigen::Success) throw AssemblyError("harmonic_extension: A_rr solve failed");
    return vr;
  }

  void apply(const Vector& dual, Vector& out) const {
    check(dual, "schur_apply");
    out.noalias() = blocks_->dd * dual;
    if (blocks_->r_count() > 0) out.noalias() += blocks_->rd.transpose() * extend_r(dual);
  }

  Vector apply(const Vector& dual) const {
    Vector out(size());
    apply(dual, out);
    return out;
  }

  /// Dense S; only for local dual dimension up to kDenseCap.
  Matrix dense() const {
    if (size() > kDenseCap)
      throw InvalidArgument("schur_dense: dual dimension " + std::to_string(size()) + " exceeds " +
                            std::to_string(kDenseCap));
    Matrix s = Matrix(blocks_->dd);
    if (blocks_->r_count() > 0) {
      const Matrix rd = Matrix(blocks_->rd);
      const Matrix x = factor_->solve(rd);
      s.noalias() -= rd.transpose() * x;
    }
    return 0.5 * (s + s.transpose());
  }

private:
  void check(const Vector& dual, const char* who) const {
    if (dual.size() != size()) throw InvalidArgument(std::string(who) + ": dual vector has wrong size");
  }

  std::shared_ptr<const BlockStiffness> blocks_;
  std::shared_ptr<const Factor> factor_;
};

/// ℋ^c(v_Δ): the minimal-energy extension of local dual values, corners kept continuous.
inline SplitFunction harmonic_extension(const SchurOperator& schur, const DofPartition& part, const Vector& dual) {
  SplitFunction v = SplitFunction::zeros(part);
  if (part.r_count() != schur.blocks().r_count()) throw InvalidArgument("harmonic_extension: partition mismatch");
  v.dual = dual;
  v.set_r_values(schur.extend_r(dual));
  return v;
}

/// Relative residual ‖A_rr v_r + A_rΔ v_Δ‖ / ‖A_rΔ v_Δ‖ of an extension (0 for zero data).
inline double extension_residual(const BlockStiffness& blocks, const SplitFunction& v) {
  const Vector rhs = blocks.rd * v.dual;
  const double scale = rhs.norm();
  if (scale == 0.0) return (blocks.rr * v.r_values()).norm();
  return (blocks.rr * v.r_values() + rhs).norm() / scale;
}

/// Signed incidence matrix B_Δ: one row per global dual node, +1 on the copy in the
/// lower-numbered owner and −1 on the copy in the higher-numbered one.
struct JumpOperator {
  SparseMatrix matrix;

  int rows() const noexcept { return static_cast<int>(matrix.rows()); }
  int cols() const noexcept { return static_cast<int>(matrix.cols()); }
  Vector apply(const Vector& local_dual) const { return matrix * local_dual; }
  Vector apply_transpose(const Vector& multipliers) const { return matrix.transpose() * multipliers; }
};

inline JumpOperator jump_operator(const DofPartition& part) {
  std::vector<Triplet> trips;
  trips.reserve(2 * part.dual.size());
  for (int row = 0; row < part.dual_count(); ++row) {
    trips.emplace_back(row, part.dual_columns[row][0], 1.0);
    trips.emplace_back(row, part.dual_columns[row][1], -1.0);
  }
  JumpOperator b;
  b.matrix.resize(part.dual_count(), part.local_dual_count());
  b.matrix.setFromTriplets(trips.begin(), trips.end());
  return b;
}

/// F = B_Δ S⁻¹ B_Δᵀ with S⁻¹ applied by conjugate gradients on the dual space.
class DualOperator {
public:
  struct Stats {
    int inner_iterations = 0;
    double inner_residual = 0.0;
  };

  /// `inner_cap` bounds the CG iterations per Schur solve; 0 selects 50 · dim S.
  DualOperator(SchurOperator schur, JumpOperator jump, double inner_tol = 1e-12, int inner_cap = 0)
      : schur_(std::move(schur)), jump_(std::move(jump)), inner_tol_(inner_tol), inner_cap_(inner_cap) {
    if (jump_.cols() != schur_.size()) throw InvalidArgument("DualOperator: jump/Schur dimension mismatch");
  }

  int size() const noexcept { return jump_.rows(); }
  int inner_iteration_cap() const noexcept { return inner_cap_ > 0 ? inner_cap_ : 50 * schur_.size(); }
  const SchurOperator& schur() const noexcept { return schur_; }
  const JumpOperator& jump() const noexcept { return jump_; }

  /// S⁻¹ v; throws ConvergenceError when the iteration cap is reached.
  Vector schur_solve(const Vector& v, Stats* stats = nullptr) const {
    const auto op = [this](const Vector& in, Vector& out) { schur_.apply(in, out); };
    CgResult cg = conjugate_gradient(op, v, inner_tol_, inner_iteration_cap());
    if (stats) *stats = {cg.iterations, cg.relative_residual};
    if (!cg.converged)
      throw ConvergenceError("dual_apply: inner Schur solve did not converge", cg.relative_residual, cg.iterations);
    return std::move(cg.x);
  }

  Vector apply(const Vector& multipliers, Stats* stats = nullptr) const {
    if (multipliers.size() != size()) throw InvalidArgument("dual_apply: multiplier vector has wrong size");
    return jump_.apply(schur_solve(jump_.apply_transpose(multipliers), stats));
  }

  void apply(const Vector& in, Vector& out) const { out = apply(in); }

  /// Dense B_Δ S⁻¹ B_Δᵀ through a dense Cholesky factorization of S.
  Matrix dense() const {
    const Matrix s = schur_.dense();
    const Eigen::LLT<Matrix> llt(s);
    if (llt.info() != Eigen::Success) throw AssemblyError("dual_dense: S is not positive definite");
    const Matrix bt = Matrix(jump_.matrix.transpose());
    const Matrix f = Matrix(jump_.matrix) * llt.solve(bt);
    return 0.5 * (f + f.transpose());
  }

private:
  SchurOperator schur_;
  JumpOperator jump_;
  double inner_tol_;
  int inner_cap_;
};

/// Piecewise-linear interpolant on the coarse mesh (each subdomain split along the fine-mesh
/// diagonal direction) matching `nodal` at the subdomain vertices, evaluated at every node.
inline Vector coarse_interpolation(const StructuredMesh& mesh, const Vector& nodal) {
  if (nodal.size() != static_cast<Eigen::Index>(mesh.nodes.size()))
    throw InvalidArgument("coarse_interpolation: nodal vector has wrong size");
  const int m = mesh.config.ratio;
  const int big_n = mesh.config.subdomains;
  const int p = mesh.points_per_side();
  Vector out(nodal.size());
  for (int j = 0; j < p; ++j) {
    for (int i = 0; i < p; ++i) {
      const int sx = std::min(i / m, big_n - 1), sy = std::min(j / m, big_n - 1);
      const int x0 = sx * m, y0 = sy * m;
      const double sw = nodal(mesh.node(x0, y0)), se = nodal(mesh.node(x0 + m, y0));
      const double nw = nodal(mesh.node(x0, y0 + m)), ne = nodal(mesh.node(x0 + m, y0 + m));
      const int a = i - x0, b = j - y0;
      const double xi = static_cast<double>(a) / m, eta = static_cast<double>(b) / m;
      double value;
      if (mesh.diagonal == Diagonal::SouthWestNorthEast) {
        value = a >= b ? sw + xi * (se - sw) + eta * (ne - se) : sw + eta * (nw - sw) + xi * (ne - nw);
      } else {
        value = a + b <= m ? sw + xi * (se - sw) + eta * (nw - sw)
                           : ne + (1.0 - xi) * (nw - ne) + (1.0 - eta) * (se - ne);
      }
      out(mesh.node(i, j)) = value;
    }
  }
  return out;
}

}  // namespace feti_lab
