#include <CLI11.hpp>
#include <fstream>
#include <iostream>
#include <memory>
#include <sstream>

#include "json.hpp"
#include "saddleglt/experiments.hpp"
#include "saddleglt/fem.hpp"
#include "saddleglt/saddle.hpp"
#include "saddleglt/spectra.hpp"
#include "saddleglt/symbol.hpp"

namespace {

using namespace saddleglt;

std::unique_ptr<std::ofstream> file_sink;

std::ostream& out_stream(const std::string& path) {
  if (path.empty() || path == "-") return std::cout;
  file_sink = std::make_unique<std::ofstream>(path);
  if (!*file_sink) throw std::runtime_error("cannot open output file " + path);
  return *file_sink;
}

nlohmann::json bounds_json(const std::vector<std::pair<double, double>>& bounds) {
  nlohmann::json doc;
  for (std::size_t l = 0; l < bounds.size(); ++l) {
    doc["m" + std::to_string(l + 1)] = bounds[l].first;
    doc["M" + std::to_string(l + 1)] = bounds[l].second;
  }
  return doc;
}

int cmd_bounds(double alpha, int grid, const std::string& symbol_path,
               const std::string& out_path, const std::string& format) {
  SymbolSampling sampling;
  if (!symbol_path.empty()) {
    std::ifstream is(symbol_path);
    if (!is) throw std::runtime_error("cannot open symbol file " + symbol_path);
    std::stringstream buf;
    buf << is.rdbuf();
    sampling = sample_symbol(MatrixSymbol::from_json(buf.str()), grid);
  } else {
    sampling = sample_symbol(alpha, grid);
  }
  const auto bounds = interval_bounds(sampling);
  std::ostream& os = out_stream(out_path);
  if (format == "csv") {
    os << "level,m,M\n";
    os.precision(17);
    for (std::size_t l = 0; l < bounds.size(); ++l)
      os << l + 1 << "," << bounds[l].first << "," << bounds[l].second << "\n";
  } else {
    nlohmann::json doc = bounds_json(bounds);
    doc["alpha"] = alpha;
    doc["grid"] = grid;
    os << doc.dump(2) << "\n";
  }
  return 0;
}

int cmd_count(const std::vector<int>& ns, double alpha, int grid,
              const std::string& out_path) {
  const auto bounds = interval_bounds(alpha, grid);
  std::ostream& os = out_stream(out_path);
  write_count_csv_header(os);
  for (int n : ns) {
    const auto [y_d, z] = problem_fields(ConstraintKind::poisson);
    const SaddleSystem sys = build_system(n, alpha, ConstraintKind::poisson, y_d, z);
    const SparseMatrixCSR b_n = permute_to_block_toeplitz(sys);
    const SpectralReport rep = spectral_report(b_n, n, bounds);
    write_count_csv_row(os, n, rep);
    os.flush();
  }
  return 0;
}

int cmd_match(int n, double alpha, const std::string& out_path, Index dense_limit) {
  const auto [y_d, z] = problem_fields(ConstraintKind::poisson);
  const SaddleSystem sys = build_system(n, alpha, ConstraintKind::poisson, y_d, z);
  const SparseMatrixCSR b_n = permute_to_block_toeplitz(sys);
  const std::vector<double> spectrum = full_spectrum(b_n, dense_limit);
  const SymbolSampling sampling = sample_symbol(alpha, n);

  std::ostream& os = out_stream(out_path);
  const Index nn = sys.block_order();
  for (int l = 0; l < 3; ++l) {
    const std::span<const double> block(spectrum.data() + l * nn, static_cast<std::size_t>(nn));
    const std::vector<GridSample> samples = level_samples(sampling, l);
    const std::vector<MatchedPair> pairs = match_eigenvalues(block, samples);
    write_match_csv(os, l + 1, pairs, l == 0);
  }
  return 0;
}

int cmd_solve(const std::string& problem, const std::vector<int>& ns,
              const std::vector<double>& alphas, const std::vector<std::string>& precs,
              const std::string& solver, const std::string& inner, double inner_tol,
              double tol, int maxit, std::array<double, 2> c, double r,
              const std::string& out_path) {
  std::ostream& os = out_stream(out_path);
  write_solve_csv_header(os);
  for (double alpha : alphas)
    for (int n : ns)
      for (const std::string& prec : precs) {
        SolveCase sc;
        sc.problem = parse_problem(problem);
        sc.n = n;
        sc.alpha = alpha;
        sc.prec = parse_prec(prec);
        sc.solver = parse_solver(solver);
        sc.inner = inner == "iterative" ? InnerMode::iterative : InnerMode::direct;
        sc.inner_tol = inner_tol;
        sc.tol = tol;
        sc.maxit = maxit;
        sc.c = c;
        sc.r = r;
        write_solve_csv_row(os, run_solve_case(sc));
        os.flush();
      }
  return 0;
}

int cmd_precheck(int n, double alpha, const std::string& prec, Index dense_limit,
                 const std::string& out_path) {
  const auto [y_d, z] = problem_fields(ConstraintKind::poisson);
  const SaddleSystem sys = build_system(n, alpha, ConstraintKind::poisson, y_d, z);
  const PrecSpectrumReport rep =
      preconditioned_spectrum_check(sys, parse_prec(prec), dense_limit);
  nlohmann::json doc;
  doc["n"] = n;
  doc["alpha"] = alpha;
  doc["preconditioner"] = prec;
  doc["unit_count"] = rep.unit_count;
  doc["unit_tol"] = rep.unit_tol;
  doc["nonunit_count"] = rep.nonunit.size();
  if (!rep.nonunit.empty()) {
    doc["nonunit_min"] = rep.nonunit.front();
    doc["nonunit_max"] = rep.nonunit.back();
  }
  if (!rep.oracle.empty()) {
    doc["oracle_min"] = rep.oracle.front();
    doc["oracle_max"] = rep.oracle.back();
  }
  doc["max_match_error"] = rep.max_match_error;
  doc["max_abs_imag"] = rep.max_abs_imag;
  out_stream(out_path) << doc.dump(2) << "\n";
  return 0;
}

int cmd_symbol(double alpha, const std::string& out_path) {
  const PredefinedSymbols syms = predefined_symbols(alpha);
  nlohmann::json doc;
  doc["alpha"] = alpha;
  doc["m"] = nlohmann::json::parse(syms.m.to_json());
  doc["kappa"] = nlohmann::json::parse(syms.kappa.to_json());
  doc["f"] = nlohmann::json::parse(syms.f.to_json());
  out_stream(out_path) << doc.dump(2) << "\n";
  return 0;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Spectral analysis and preconditioned solvers for saddle-point systems "
               "from elliptic optimal control"};
  app.require_subcommand(1);

  std::vector<int> ns;  // empty list -> header-only tables
  std::vector<double> alphas{1e-3};
  double alpha = 1e-4;
  int grid = 3000;
  int n = 40;
  std::string problem = "poisson";
  std::vector<std::string> precs{"pn"};
  std::string prec = "pn";
  std::string solver = "gmres";
  std::string inner = "direct";
  double inner_tol = 1e-8;
  double tol = 1e-6;
  int maxit = 100;
  std::array<double, 2> c = {2.0, 3.0};
  double r = 1.0;
  std::string out_path;
  std::string format = "json";
  std::string symbol_path;
  Index dense_limit = 6000;

  auto* bounds = app.add_subcommand("bounds", "Extremes of the sampled eigenvalue functions");
  bounds->add_option("--alpha", alpha, "regularization parameter")->check(CLI::PositiveNumber);
  bounds->add_option("--grid", grid, "samples per direction")->check(CLI::Range(2, 100000));
  bounds->add_option("--symbol", symbol_path, "JSON file with a custom symbol");
  bounds->add_option("--out", out_path, "output path (default stdout)");
  bounds->add_option("--format", format)->check(CLI::IsMember({"csv", "json"}));

  auto* count = app.add_subcommand("count", "Per-interval eigenvalue counts (inertia)");
  count->add_option("--n", ns, "grid sizes")->delimiter(',');
  count->add_option("--alpha", alpha)->check(CLI::PositiveNumber);
  count->add_option("--grid", grid)->check(CLI::Range(2, 100000));
  count->add_option("--out", out_path);

  auto* match = app.add_subcommand("match", "Eigenvalue-to-sample matching per block");
  match->add_option("--n", n)->check(CLI::PositiveNumber);
  match->add_option("--alpha", alpha)->check(CLI::PositiveNumber);
  match->add_option("--dense-limit", dense_limit);
  match->add_option("--out", out_path);

  auto* solve = app.add_subcommand("solve", "Preconditioned solver iteration table");
  solve->add_option("--problem", problem)->check(CLI::IsMember({"poisson", "advection"}));
  solve->add_option("--n", ns)->delimiter(',');
  solve->add_option("--alpha", alphas)->delimiter(',');
  solve->add_option("--prec", precs)->delimiter(',')
      ->check(CLI::IsMember({"none", "pn", "pbct", "pd", "ptilde"}));
  solve->add_option("--solver", solver)->check(CLI::IsMember({"gmres", "fgmres"}));
  solve->add_option("--inner", inner)->check(CLI::IsMember({"direct", "iterative"}));
  solve->add_option("--inner-tol", inner_tol)->check(CLI::PositiveNumber);
  solve->add_option("--tol", tol)->check(CLI::PositiveNumber);
  solve->add_option("--maxit", maxit)->check(CLI::PositiveNumber);
  solve->add_option("--c", c, "advection velocity (two components)");
  solve->add_option("--r", r, "reaction coefficient");
  solve->add_option("--out", out_path);

  auto* precheck = app.add_subcommand("precheck", "Spectrum of the preconditioned matrix");
  precheck->add_option("--n", n)->check(CLI::PositiveNumber);
  precheck->add_option("--alpha", alpha)->check(CLI::PositiveNumber);
  precheck->add_option("--prec", prec)
      ->check(CLI::IsMember({"none", "pn", "pbct", "pd", "ptilde"}));
  precheck->add_option("--dense-limit", dense_limit);
  precheck->add_option("--out", out_path);

  auto* symbol = app.add_subcommand("symbol", "Predefined symbols as JSON");
  symbol->add_option("--alpha", alpha)->check(CLI::PositiveNumber);
  symbol->add_option("--out", out_path);

  CLI11_PARSE(app, argc, argv);

  try {
    if (bounds->parsed()) return cmd_bounds(alpha, grid, symbol_path, out_path, format);
    if (count->parsed()) return cmd_count(ns, alpha, grid, out_path);
    if (match->parsed()) return cmd_match(n, alpha, out_path, dense_limit);
    if (solve->parsed())
      return cmd_solve(problem, ns, alphas, precs, solver, inner, inner_tol, tol, maxit, c, r,
                       out_path);
    if (precheck->parsed()) return cmd_precheck(n, alpha, prec, dense_limit, out_path);
    if (symbol->parsed()) return cmd_symbol(alpha, out_path);
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 1;
  }
  return 0;
}
