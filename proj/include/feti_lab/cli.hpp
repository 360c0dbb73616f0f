#pragma once

#include <algorithm>
#include <cmath>
#include <fstream>
#include <iostream>
#include <memory>
#include <optional>
#include <sstream>
#include <string>
#include <vector>

#include <CLI11.hpp>

#include "feti_lab/assembly.hpp"
#include "feti_lab/counterexample.hpp"
#include "feti_lab/error.hpp"
#include "feti_lab/parallel.hpp"
#include "feti_lab/report.hpp"
#include "feti_lab/spectra.hpp"
#include "feti_lab/svg.hpp"

namespace feti_lab::cli {

enum ExitCode : int { kOk = 0, kFailure = 1, kValidation = 2, kNotConverged = 3 };

struct RunConfig {
  std::string subcommand;
  std::vector<int> subdomain_list;  // counterexample
  std::vector<int> ratio_list;      // poincare
  std::vector<int> values;          // scaling
  int subdomains = 4;
  int ratio = 4;
  std::string operator_tag = "F";
  std::string fix = "subdomains";
  double tol = 1e-8;
  std::string format = "csv";
  std::string output;
  std::string plot;
  std::string dump_prefix;
};

namespace detail {

inline void require(bool ok, const std::string& msg) {
  if (!ok) throw InvalidArgument(msg);
}

inline void require_distinct(std::vector<int> v, const std::string& what) {
  std::sort(v.begin(), v.end());
  require(std::adjacent_find(v.begin(), v.end()) == v.end(), what + " contains duplicates");
}

inline void validate(const RunConfig& c) {
  require(c.tol > 0.0 && c.tol < 1.0, "--tol must lie in (0, 1)");
  if (c.subcommand == "counterexample") {
    require(!c.subdomain_list.empty(), "--N-list is empty");
    for (int n : c.subdomain_list) require(n >= 3, "counterexample needs every N >= 3 (got " + std::to_string(n) + ")");
    require(c.ratio >= 2, "counterexample needs m >= 2");
    require_distinct(c.subdomain_list, "--N-list");
  } else if (c.subcommand == "spectrum") {
    parse_operator_tag(c.operator_tag);
    require(c.subdomains >= 2 && c.ratio >= 2, "spectrum needs N >= 2 and m >= 2");
  } else if (c.subcommand == "scaling") {
    parse_operator_tag(c.operator_tag);
    parse_scaling_axis(c.fix);
    require(c.values.size() >= 3, "scaling needs at least 3 --values");
    for (int v : c.values) require(v >= 2, "scaling values must be >= 2");
    require_distinct(c.values, "--values");
    require((c.fix == "ratio" ? c.ratio : c.subdomains) >= 2, "the fixed parameter must be >= 2");
  } else if (c.subcommand == "poincare") {
    require(!c.ratio_list.empty(), "--m-list is empty");
    for (int m : c.ratio_list) require(m >= 2, "poincare needs every m >= 2 (got " + std::to_string(m) + ")");
    require_distinct(c.ratio_list, "--m-list");
  }
}

inline std::ofstream open_or_throw(const std::string& path) {
  std::ofstream f(path);
  if (!f) throw InvalidArgument("cannot write to '" + path + "'");
  return f;
}

inline Table spectrum_table(const std::vector<SpectralReport>& reports) {
  Table t;
  t.columns = {"operator", "N", "m", "lambda_min", "lambda_max", "kappa", "bound_ratio", "iters", "residual"};
  for (const auto& r : reports)
    t.add_row({std::string(to_string(r.tag)), static_cast<long long>(r.subdomains), static_cast<long long>(r.ratio),
               r.lambda_min, r.lambda_max, r.kappa, r.bound_ratio, static_cast<long long>(r.iterations), r.residual});
  return t;
}

inline void dump_operators(const std::string& prefix, int subdomains, int ratio) {
  const auto problem = FetiProblem::create({subdomains, ratio});
  const auto dump = [&](const std::string& name, const auto& matrix) {
    auto f = open_or_throw(prefix + name + ".coo");
    write_coordinate(f, matrix);
  };
  dump("A_rr", problem.blocks().rr);
  dump("A_rd", problem.blocks().rd);
  dump("A_dd", problem.blocks().dd);
  dump("B", problem.jump().matrix);
  if (problem.schur().size() <= kDenseCap) dump("S", problem.schur().dense());
}

}  // namespace detail

/// Executes one validated configuration, writing the table to `out`.
inline void execute(const RunConfig& c, std::ostream& out) {
  Table table;
  std::optional<LogLogPlot> plot;

  if (c.subcommand == "counterexample") {
    const auto reports = parallel_map(static_cast<int>(c.subdomain_list.size()),
                                      [&](int i) { return counterexample_report(c.subdomain_list[i], c.ratio); });
    table.columns = {"N",          "m",          "a_cc",          "a_dd",           "gamma_sq",   "gamma",
                     "case_i_energy", "case_ii_energy", "floating_energy", "residual_cc", "residual_dd"};
    plot = LogLogPlot{"strengthened Cauchy-Schwarz constant", "N = 1/H", "1 - gamma^2", {}, {}, {-1.0}};
    for (const auto& r : reports) {
      table.add_row({static_cast<long long>(r.subdomains), static_cast<long long>(r.ratio), r.a_cc, r.a_dd, r.gamma_sq,
                     r.gamma, r.case_i.energy, r.case_ii.energy, r.floating.energy, r.residual_cc, r.residual_dd});
      plot->x.push_back(r.subdomains);
      plot->y.push_back(1.0 - r.gamma_sq);
    }
  } else if (c.subcommand == "spectrum") {
    const OperatorTag tag = parse_operator_tag(c.operator_tag);
    if (!c.dump_prefix.empty()) detail::dump_operators(c.dump_prefix, c.subdomains, c.ratio);
    table = detail::spectrum_table({condition_number(tag, c.subdomains, c.ratio, c.tol)});
  } else if (c.subcommand == "scaling") {
    const OperatorTag tag = parse_operator_tag(c.operator_tag);
    const ScalingAxis axis = parse_scaling_axis(c.fix);
    const int fixed = axis == ScalingAxis::FixRatio ? c.ratio : c.subdomains;
    const ScalingStudy study = scaling_study(tag, axis, c.values, fixed, c.tol);
    table = detail::spectrum_table(study.table);
    table.summary = {{"kappa_slope", study.kappa_slope},
                     {"lambda_min_slope", study.lambda_min_slope},
                     {"lambda_max_slope", study.lambda_max_slope}};
    plot = LogLogPlot{std::string("condition number of ") + to_string(tag),
                      axis == ScalingAxis::FixRatio ? "N = 1/H" : "m = H/h", "kappa", {}, {}, {1.0}};
    for (const auto& r : study.table) {
      plot->x.push_back(study.varied(r));
      plot->y.push_back(r.kappa);
    }
  } else if (c.subcommand == "poincare") {
    const auto reports =
        parallel_map(static_cast<int>(c.ratio_list.size()), [&](int i) { return poincare_constant(c.ratio_list[i]); });
    table.columns = {"m", "c_star", "ratio_log"};
    plot = LogLogPlot{"coarse interpolation trace constant", "m = H/h", "c*", {}, {}, {}};
    for (const auto& r : reports) {
      table.add_row({static_cast<long long>(r.ratio), r.c_star, r.ratio_log});
      plot->x.push_back(r.ratio);
      plot->y.push_back(r.c_star);
    }
  }

  if (c.format == "json") write_json(out, table, c.subcommand);
  else write_csv(out, table);

  if (!c.plot.empty()) {
    auto f = detail::open_or_throw(c.plot);
    if (plot) write_svg(f, *plot);
  }
}

/// Command-line entry point. Exit codes: 0 success, 2 validation error, 3 solver
/// non-convergence, 1 anything else.
inline int run(int argc, const char* const* argv, std::ostream& out = std::cout, std::ostream& err = std::cerr) {
  RunConfig c;
  // CLI11 writes defaults into the bound variable at declaration, so each subcommand gets its own.
  int ce_ratio = 3, sp_subdomains = 0, sp_ratio = 0, sc_subdomains = 4, sc_ratio = 4;
  double sp_tol = 1e-8, sc_tol = 1e-8;
  CLI::App app{"FETI-DP substructuring laboratory", "feti_lab"};
  app.require_subcommand(1);

  const auto add_common = [&](CLI::App* sub) {
    sub->add_option("--format", c.format, "Output format")->check(CLI::IsMember({"csv", "json"}));
    sub->add_option("--output,-o", c.output, "Output file (default: stdout)");
    sub->add_option("--plot", c.plot, "Write an SVG log-log plot to this path");
  };

  auto* ce = app.add_subcommand("counterexample", "Energies of the test function w and the gamma sequence");
  ce->add_option("--N-list", c.subdomain_list, "Subdomains per side, comma separated")->delimiter(',')->required();
  ce->add_option("--m", ce_ratio, "Cells per subdomain side")->default_val(3);
  add_common(ce);

  auto* sp = app.add_subcommand("spectrum", "Extremal eigenvalues and condition number of S or F");
  sp->add_option("--operator", c.operator_tag, "S or F")->required();
  sp->add_option("--N", sp_subdomains, "Subdomains per side")->required();
  sp->add_option("--m", sp_ratio, "Cells per subdomain side")->required();
  sp->add_option("--tol", sp_tol, "Lanczos relative residual tolerance")->default_val(1e-8);
  sp->add_option("--dump-prefix", c.dump_prefix, "Dump A_rr, A_rd, A_dd, B and dense S as coordinate files");
  add_common(sp);

  auto* sc = app.add_subcommand("scaling", "Condition number scaling study");
  sc->add_option("--operator", c.operator_tag, "S or F")->required();
  sc->add_option("--fix", c.fix, "Which parameter stays fixed: ratio (m) or subdomains (N)")->required();
  sc->add_option("--values", c.values, "Values of the varied parameter")->delimiter(',')->required();
  sc->add_option("--N", sc_subdomains, "Fixed N when --fix subdomains")->default_val(4);
  sc->add_option("--m", sc_ratio, "Fixed m when --fix ratio")->default_val(4);
  sc->add_option("--tol", sc_tol, "Lanczos relative residual tolerance")->default_val(1e-8);
  add_common(sc);

  auto* pc = app.add_subcommand("poincare", "Sharp constant of the coarse-interpolation trace inequality");
  pc->add_option("--m-list", c.ratio_list, "Cells per subdomain side, comma separated")->delimiter(',')->required();
  add_common(pc);

  try {
    app.parse(argc, argv);
  } catch (const CLI::CallForHelp& e) {
    return app.exit(e, out, err);
  } catch (const CLI::ParseError& e) {
    app.exit(e, out, err);
    return kValidation;
  }
  for (auto* sub : {ce, sp, sc, pc})
    if (sub->parsed()) c.subcommand = sub->get_name();
  if (ce->parsed()) c.ratio = ce_ratio;
  if (sp->parsed()) {
    c.subdomains = sp_subdomains;
    c.ratio = sp_ratio;
    c.tol = sp_tol;
  }
  if (sc->parsed()) {
    c.subdomains = sc_subdomains;
    c.ratio = sc_ratio;
    c.tol = sc_tol;
  }

  try {
    detail::validate(c);
    if (!c.plot.empty()) detail::open_or_throw(c.plot);
    if (c.output.empty()) {
      execute(c, out);
    } else {
      auto f = detail::open_or_throw(c.output);
      execute(c, f);
      if (!f) throw std::runtime_error("write to '" + c.output + "' failed");
    }
  } catch (const InvalidArgument& e) {
    err << "error: " << e.what() << '\n';
    return kValidation;
  } catch (const ConvergenceError& e) {
    err << "error: " << e.what() << '\n';
    return kNotConverged;
  } catch (const std::exception& e) {
    err << "error: " << e.what() << '\n';
    return kFailure;
  }
  return kOk;
}

}  // namespace feti_lab::cli
