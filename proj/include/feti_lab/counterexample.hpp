#pragma once

#include <algorithm>
#include <cmath>
#include <limits>
#include <memory>
#include <utility>
#include <vector>

#include "feti_lab/assembly.hpp"
#include "feti_lab/error.hpp"
#include "feti_lab/mesh.hpp"
#include "feti_lab/parallel.hpp"
#include "feti_lab/substructuring.hpp"

namespace feti_lab {

/// How a subdomain meets the outer boundary.
enum class SubdomainCase {
  Floating,          // no edge on the boundary
  OneBoundaryEdge,   // case (i)
  TwoBoundaryEdges,  // case (ii), the four corner subdomains
};

inline SubdomainCase classify_subdomain(const StructuredMesh& mesh, int s) {
  switch (mesh.boundary_edge_count(s)) {
    case 0: return SubdomainCase::Floating;
    case 1: return SubdomainCase::OneBoundaryEdge;
    case 2: return SubdomainCase::TwoBoundaryEdges;
    default: throw InvalidArgument("classify_subdomain: a single subdomain has no interface");
  }
}

/// Closed form of ã(w_c, w_c): four per interior cross-point.
inline double corner_energy_closed_form(int subdomains) {
  const double k = subdomains - 1;
  return 4.0 * k * k;
}

/// Closed form of ã(w_I + w_Δ, w_I + w_Δ) for H/h = 3.
inline double remainder_energy_closed_form(int subdomains) {
  const double k = subdomains - 2;
  return 4.0 * k * k + 17.0 * k + 14.0;
}

/// Everything needed to evaluate the test function w on one mesh.
struct CounterexampleSetup {
  StructuredMesh mesh;
  DofPartition part;
  SchurOperator schur;

  const BlockStiffness& blocks() const noexcept { return schur.blocks(); }

  static CounterexampleSetup create(const MeshConfig& cfg) {
    StructuredMesh mesh = build_mesh(cfg);
    DofPartition part = classify_dofs(mesh);
    SchurOperator schur(assemble_blocks(mesh, part));
    return {std::move(mesh), std::move(part), std::move(schur)};
  }
};

/// w = ℋ^c(w_Δ) with w_Δ = 1 on every dual DOF.
inline SplitFunction build_w(const CounterexampleSetup& setup) {
  if (setup.mesh.config.subdomains < 2) throw InvalidArgument("build_w: need at least 2 subdomains per side");
  const Vector ones = Vector::Ones(setup.part.local_dual_count());
  return harmonic_extension(setup.schur, setup.part, ones);
}

struct CaseEnergies {
  int count = 0;
  double energy = std::numeric_limits<double>::quiet_NaN();  // mean over the case
  double min = std::numeric_limits<double>::quiet_NaN();
  double max = std::numeric_limits<double>::quiet_NaN();

  double spread() const noexcept { return count == 0 ? 0.0 : max - min; }

  void add(double e) {
    if (count == 0) {
      min = max = energy = e;
    } else {
      min = std::min(min, e);
      max = std::max(max, e);
      energy = (energy * count + e) / (count + 1);
    }
    ++count;
  }
};

struct CounterexampleReport {
  int subdomains = 0;
  int ratio = 0;
  double a_cc = 0.0;  // ã(w_c, w_c)
  double a_dd = 0.0;  // ã(w_I + w_Δ, w_I + w_Δ)
  CaseEnergies floating;
  CaseEnergies case_i;
  CaseEnergies case_ii;
  double gamma_sq = 0.0;
  double gamma = 0.0;
  double residual_cc = 0.0;  // |a_cc − 4(N−1)²|
  double residual_dd = 0.0;  // |a_dd − (4(N−2)² + 17(N−2) + 14)|, the H/h = 3 closed form
};

inline CounterexampleReport counterexample_report(int subdomains, int ratio = 3) {
  if (subdomains < 3) throw InvalidArgument("counterexample_report: need N >= 3 so that every subdomain case occurs");
  if (ratio < 2) throw InvalidArgument("counterexample_report: need m >= 2");
  const auto setup = CounterexampleSetup::create({subdomains, ratio});
  const SplitFunction w = build_w(setup);
  const SplitFunction corner = w.corner_part();
  const SplitFunction rest = w.interior_part() + w.dual_part();

  CounterexampleReport rep;
  rep.subdomains = subdomains;
  rep.ratio = ratio;
  rep.a_cc = energy(setup.blocks(), corner);
  for (int s = 0; s < setup.mesh.subdomain_count(); ++s) {
    const double e = energy_subdomain(setup.blocks(), rest, s);
    rep.a_dd += e;
    switch (classify_subdomain(setup.mesh, s)) {
      case SubdomainCase::Floating: rep.floating.add(e); break;
      case SubdomainCase::OneBoundaryEdge: rep.case_i.add(e); break;
      case SubdomainCase::TwoBoundaryEdges: rep.case_ii.add(e); break;
    }
  }
  rep.gamma_sq = rep.a_cc / rep.a_dd;
  rep.gamma = std::sqrt(rep.gamma_sq);
  rep.residual_cc = std::abs(rep.a_cc - corner_energy_closed_form(subdomains));
  rep.residual_dd = std::abs(rep.a_dd - remainder_energy_closed_form(subdomains));
  return rep;
}

/// (N, γ(N)) with m = 3, in input order.
inline std::vector<std::pair<int, double>> gamma_sequence(const std::vector<int>& subdomain_values) {
  for (int n : subdomain_values)
    if (n < 3) throw InvalidArgument("gamma_sequence: every N must be >= 3");
  const auto reports = parallel_map(static_cast<int>(subdomain_values.size()),
                                    [&](int i) { return counterexample_report(subdomain_values[i]); });
  std::vector<std::pair<int, double>> out;
  out.reserve(reports.size());
  for (const auto& r : reports) out.emplace_back(r.subdomains, r.gamma);
  return out;
}

/// Measured strengthened Cauchy–Schwarz ratio
/// |ã(v_I+v_Δ, v_c)| / (ã(v_I+v_Δ, v_I+v_Δ)^½ ã(v_c, v_c)^½) for v = ℋ^c(v_Δ).
inline double measure_scs_gamma(const SchurOperator& schur, const DofPartition& part, const Vector& dual) {
  const SplitFunction v = harmonic_extension(schur, part, dual);
  const SplitFunction corner = v.corner_part();
  const SplitFunction rest = v.interior_part() + v.dual_part();
  const double a_dd = energy(schur.blocks(), rest);
  if (!(a_dd > 1e-14)) throw InvalidArgument("measure_scs_gamma: ã(v_I + v_Δ, v_I + v_Δ) vanishes");
  const double a_cc = energy(schur.blocks(), corner);
  if (a_cc == 0.0) return 0.0;
  return std::abs(energy_form(schur.blocks(), rest, corner)) / (std::sqrt(a_dd) * std::sqrt(a_cc));
}

}  // namespace feti_lab
