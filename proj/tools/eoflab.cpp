// Command-line front end: state ingestion, experiment configuration, report
// emission. Reports go to stdout with a stable field order; timing goes to
// stderr so identical (input, seed, flags) runs produce byte-identical
// payloads.

#include <chrono>
#include <cstdlib>
#include <fstream>
#include <iostream>
#include <sstream>
#include <string>
#include <vector>

#include <CLI11.hpp>

#include "eoflab/additivity.hpp"
#include "eoflab/errors.hpp"
#include "eoflab/oracle.hpp"
#include "eoflab/report.hpp"
#include "eoflab/solver.hpp"
#include "eoflab/state_file.hpp"

namespace {

using namespace eoflab;

constexpr int kExitOk = 0;
constexpr int kExitParse = 2;
constexpr int kExitNoConvergence = 3;
constexpr int kExitDegenerate = 4;
constexpr int kExitSizeCap = 5;

struct CommonOptions {
  std::uint64_t seed = 0;
  bool seed_given = false;
  int restarts = 16;
  int max_iters = 160;
  double tol = 1e-7;
  int max_members = 0;
  std::string restrict_spec;
  std::string dims_spec;
  int gamma_grid = 16;
  int gamma_random = 64;
  std::string csv_out;
};

void add_common(CLI::App* cmd, CommonOptions& opt) {
  cmd->add_option("--seed", opt.seed, "Random seed (wins over EOFLAB_SEED)")
      ->each([&opt](const std::string&) { opt.seed_given = true; });
  cmd->add_option("--restarts", opt.restarts, "Optimizer restarts");
  cmd->add_option("--max-iters", opt.max_iters,
                  "Gradient-refinement iterations per restart");
  cmd->add_option("--tol", opt.tol, "Optimizer convergence tolerance");
  cmd->add_option("--max-members", opt.max_members,
                  "Decomposition-size cap (0 = rank^2)");
  cmd->add_option("--restrict", opt.restrict_spec,
                  "Comma-separated 1-based factor indices to keep");
  cmd->add_option("--dims", opt.dims_spec,
                  "Comma-separated factor dimensions (overrides the file)");
  cmd->add_option("--gamma-grid", opt.gamma_grid,
                  "Phase count of the gamma sampling grid");
  cmd->add_option("--gamma-random", opt.gamma_random,
                  "Seeded random gamma samples");
  cmd->add_option("--csv-out", opt.csv_out, "CSV side channel for sweep data");
}

std::uint64_t resolve_seed(const CommonOptions& opt) {
  if (opt.seed_given) return opt.seed;
  if (const char* env = std::getenv("EOFLAB_SEED")) {
    return std::strtoull(env, nullptr, 10);
  }
  return SolverConfig{}.seed;
}

std::vector<int> parse_int_list(const std::string& spec) {
  std::vector<int> out;
  std::stringstream ss(spec);
  std::string item;
  while (std::getline(ss, item, ',')) {
    if (item.empty()) continue;
    out.push_back(std::stoi(item));
  }
  return out;
}

std::vector<double> parse_double_list(const std::string& spec) {
  std::vector<double> out;
  std::stringstream ss(spec);
  std::string item;
  while (std::getline(ss, item, ',')) {
    if (item.empty()) continue;
    out.push_back(std::stod(item));
  }
  return out;
}

FactorLayout layout_from(const StateFile& file, const CommonOptions& opt) {
  std::vector<int> dims =
      opt.dims_spec.empty() ? file.dims : parse_int_list(opt.dims_spec);
  std::vector<int> keep;
  if (opt.restrict_spec.empty()) {
    keep = {0};
  } else {
    for (int one_based : parse_int_list(opt.restrict_spec)) {
      keep.push_back(one_based - 1);
    }
  }
  return FactorLayout(dims, keep);
}

SolverConfig solver_config(const CommonOptions& opt) {
  SolverConfig cfg;
  cfg.seed = resolve_seed(opt);
  cfg.restarts = opt.restarts;
  cfg.max_iters = opt.max_iters;
  cfg.tol = opt.tol;
  cfg.max_members = opt.max_members;
  return cfg;
}

GammaGridConfig gamma_config(const CommonOptions& opt) {
  GammaGridConfig cfg;
  cfg.phases = opt.gamma_grid;
  cfg.random_samples = opt.gamma_random;
  cfg.seed = resolve_seed(opt);
  return cfg;
}

void echo_config(RunReport& report, const std::string& command,
                 const CommonOptions& opt) {
  report.add("command", command);
  report.add("seed", static_cast<long>(resolve_seed(opt)));
  report.add("restarts", opt.restarts);
  report.add("max_iters", opt.max_iters);
  report.add("tol", opt.tol);
  report.add("max_members", opt.max_members);
  report.add("gamma_grid", opt.gamma_grid);
  report.add("gamma_random", opt.gamma_random);
  report.add("restrict", opt.restrict_spec.empty() ? "1" : opt.restrict_spec);
}

void add_layout(RunReport& report, const FactorLayout& layout) {
  std::string dims, keep;
  for (std::size_t i = 0; i < layout.dims.size(); ++i) {
    dims += (i ? "," : "") + std::to_string(layout.dims[i]);
  }
  for (std::size_t i = 0; i < layout.keep.size(); ++i) {
    keep += (i ? "," : "") +
            std::to_string(layout.keep[i] + 1);
  }
  report.add("dims", dims);
  report.add("kept_factors", keep);
}

void add_solver_result(RunReport& report, const std::string& prefix,
                       const EofResult& res) {
  report.add(prefix + "_value", res.value);
  report.add(prefix + "_converged", res.converged);
  report.add(prefix + "_members", res.argmin.size());
  report.add(prefix + "_best_member_count", res.best_member_count);
  report.add(prefix + "_best_restart", res.best_restart);
  report.add(prefix + "_evals", res.trace.total_evals);
  report.add(prefix + "_hit_member_cap", res.hit_member_cap);
}

void add_decomposition(RunReport& report, const std::string& prefix,
                       const PureDecomposition& d) {
  for (int i = 0; i < d.size(); ++i) {
    report.add(prefix + "_weight_" + std::to_string(i),
               d.weights[static_cast<std::size_t>(i)]);
    std::string amps;
    const Vec& v = d.kets[static_cast<std::size_t>(i)].amps;
    for (Eigen::Index k = 0; k < v.size(); ++k) {
      if (k) amps += " ";
      amps += format_double(v[k].real()) + (v[k].imag() < 0 ? "" : "+") +
              format_double(v[k].imag()) + "i";
    }
    report.add(prefix + "_ket_" + std::to_string(i), amps);
  }
}

int emit(const RunReport& report, int code,
         std::chrono::steady_clock::time_point start) {
  std::cout << report.to_text();
  double ms = std::chrono::duration<double, std::milli>(
                  std::chrono::steady_clock::now() - start)
                  .count();
  std::cerr << "timing_ms: " << ms << "\n";
  return code;
}

int cmd_eof(const std::string& path, const CommonOptions& opt) {
  auto start = std::chrono::steady_clock::now();
  StateFile file = parse_state_file(path);
  if (!file.matrix) throw ParseError("eof needs a matrix block");
  FactorLayout layout = layout_from(file, opt);
  EofResult res = eof(*file.matrix, layout, solver_config(opt));

  RunReport report;
  echo_config(report, "eof", opt);
  add_layout(report, layout);
  add_solver_result(report, "eof", res);
  add_decomposition(report, "argmin", res.argmin);
  return emit(report, res.converged ? kExitOk : kExitNoConvergence, start);
}

int cmd_certify(const std::string& path, const CommonOptions& opt) {
  auto start = std::chrono::steady_clock::now();
  StateFile file = parse_state_file(path);
  if (file.kets.size() < 2) throw ParseError("certify needs two kets");
  FactorLayout layout = layout_from(file, opt);
  PairCertificate cert =
      check_pair(file.kets[0], file.kets[1], layout, gamma_config(opt));

  RunReport report;
  echo_config(report, "certify", opt);
  add_layout(report, layout);
  report.add("pass", cert.pass);
  report.add("min_margin", cert.min_margin);
  report.add("worst_gamma", cert.worst_gamma);
  report.add("samples", static_cast<long>(cert.samples.size()));
  report.add("vacuous_samples", cert.vacuous_count);
  report.add("note",
             "pass is a sampled verdict over the listed gammas, not a proof");
  for (std::size_t i = 0; i < cert.samples.size(); ++i) {
    const GammaSample& s = cert.samples[i];
    std::string line = "gamma=" + format_double(s.gamma.real()) +
                       (s.gamma.imag() < 0 ? "" : "+") +
                       format_double(s.gamma.imag()) + "i";
    line += s.vacuous ? " vacuous" : (" margin=" + format_double(s.margin));
    report.add("sample_" + std::to_string(i), line);
  }
  return emit(report, kExitOk, start);
}

int cmd_oracle(const std::string& path, bool decomposition,
               const CommonOptions& opt) {
  auto start = std::chrono::steady_clock::now();
  StateFile file = parse_state_file(path);
  if (!file.matrix) throw ParseError("oracle needs a matrix block");
  OracleResult res = two_qubit_eof(*file.matrix);

  RunReport report;
  echo_config(report, "oracle", opt);
  report.add("value", res.value);
  report.add("concurrence", res.concurrence);
  report.add("method", "closed-form");
  if (decomposition) {
    PureDecomposition d = two_qubit_optimal_decomposition(*file.matrix);
    report.add("decomposition_members", d.size());
    add_decomposition(report, "optimal", d);
  }
  return emit(report, kExitOk, start);
}

int cmd_gap(const std::string& path_a, const std::string& path_b,
            const CommonOptions& opt) {
  auto start = std::chrono::steady_clock::now();
  StateFile fa = parse_state_file(path_a);
  StateFile fb = parse_state_file(path_b);
  if (!fa.matrix || !fb.matrix) throw ParseError("gap needs two matrix files");
  FactorLayout layout_a = layout_from(fa, opt);
  CommonOptions opt_b = opt;
  opt_b.dims_spec.clear();
  FactorLayout layout_b = layout_from(fb, opt_b);
  AdditivityReport rep = additivity_gap(*fa.matrix, layout_a, *fb.matrix,
                                        layout_b, solver_config(opt));

  RunReport report;
  echo_config(report, "gap", opt);
  report.add("lhs", rep.lhs);
  report.add("rhs", rep.rhs);
  report.add("gap", rep.gap);
  add_solver_result(report, "joint", rep.joint);
  add_solver_result(report, "left", rep.left);
  add_solver_result(report, "right", *rep.right);
  bool candidate = rep.gap < -3.0 * SolverConfig{}.tol;
  report.add("candidate_additivity_violation", candidate);
  bool ok = rep.joint.converged && rep.left.converged && rep.right->converged;
  return emit(report, ok ? kExitOk : kExitNoConvergence, start);
}

int cmd_case1(const std::string& path, const std::string& env3_path,
              const std::string& env4_path, const CommonOptions& opt) {
  auto start = std::chrono::steady_clock::now();
  StateFile file = parse_state_file(path);
  if (!file.matrix) throw ParseError("case1 needs a matrix block");
  if (file.dims.size() != 2) {
    throw ParseError("case1 state must declare two factors");
  }
  auto env_state = [](const std::string& p) {
    if (p.empty()) {
      Vec v = Vec::Zero(2);
      v[0] = 1.0;
      return DensityOperator::pure(Ket(v));
    }
    StateFile f = parse_state_file(p);
    if (!f.matrix) throw ParseError("environment file needs a matrix block");
    return *f.matrix;
  };
  CaseOneScenario scenario(*file.matrix, FactorLayout(file.dims, {0}),
                           env_state(env3_path), env_state(env4_path));
  CaseOneReport rep = run_case1(scenario, solver_config(opt));

  RunReport report;
  echo_config(report, "case1", opt);
  report.add("lhs", rep.base.lhs);
  report.add("rhs", rep.base.rhs);
  report.add("gap", rep.base.gap);
  report.add("all_members_product", rep.all_members_product);
  report.add("product_threshold", rep.product_threshold);
  for (const MemberProductCheck& mc : rep.member_analysis) {
    report.add("member_" + std::to_string(mc.member) + "_schmidt_rank",
               mc.rank_above_threshold);
  }
  add_solver_result(report, "joint", rep.base.joint);
  add_solver_result(report, "left", rep.base.left);
  return emit(report, rep.base.joint.converged ? kExitOk : kExitNoConvergence,
              start);
}

int cmd_case2(const std::string& path, const std::string& lambda_spec,
              double overlap_b, double overlap_d, const CommonOptions& opt) {
  auto start = std::chrono::steady_clock::now();
  StateFile file = parse_state_file(path);
  if (file.dims.size() != 2) {
    throw ParseError("case2 pair state must declare two factors");
  }
  Ket phi12(Vec::Ones(1)), phi12_hat(Vec::Ones(1));
  if (file.kets.size() >= 2) {
    phi12 = file.kets[0];
    phi12_hat = file.kets[1];
  } else if (file.matrix && file.matrix->dim() == 4) {
    // canonical pair: two members of the closed-form optimal decomposition
    PureDecomposition d = two_qubit_optimal_decomposition(*file.matrix);
    if (d.size() < 2) throw ParseError("state is pure, no pair available");
    phi12 = d.kets[0];
    phi12_hat = d.kets[1];
  } else {
    throw ParseError("case2 needs two kets or a two-qubit matrix");
  }

  std::vector<double> lambdas = parse_double_list(lambda_spec);
  if (lambdas.empty()) lambdas = {0.5};

  RunReport report;
  echo_config(report, "case2", opt);
  report.add("overlap_b", overlap_b);
  report.add("overlap_d", overlap_d);
  std::string csv = "lambda,lhs,rhs\n";
  double worst = 0.0;
  bool converged = true;
  for (std::size_t i = 0; i < lambdas.size(); ++i) {
    CaseTwoScenario scenario =
        CaseTwoScenario::canonical(phi12, phi12_hat, file.dims, lambdas[i],
                                   overlap_d, overlap_b, gamma_config(opt));
    CaseTwoReport rep = run_case2(scenario, solver_config(opt));
    std::string tag = "row_" + std::to_string(i);
    report.add(tag + "_lambda", lambdas[i]);
    report.add(tag + "_lhs", rep.lhs);
    report.add(tag + "_rhs", rep.e_lambda);
    report.add(tag + "_gap", rep.gap);
    csv += format_double(lambdas[i]) + "," + format_double(rep.lhs) + "," +
           format_double(rep.e_lambda) + "\n";
    worst = std::max(worst, std::abs(rep.gap));
    converged = converged && rep.joint.converged;
  }
  report.add("worst_abs_gap", worst);
  if (!opt.csv_out.empty()) {
    std::ofstream out(opt.csv_out);
    out << csv;
  }
  return emit(report, converged ? kExitOk : kExitNoConvergence, start);
}

int cmd_accinfo(const std::string& path, const CommonOptions& opt) {
  auto start = std::chrono::steady_clock::now();
  StateFile file = parse_state_file(path);
  if (!file.ensemble) throw ParseError("accinfo needs an ensemble block");
  AccessibleInfoResult res =
      accessible_information(*file.ensemble, solver_config(opt));

  RunReport report;
  echo_config(report, "accinfo", opt);
  report.add("value", res.value);
  report.add("label_entropy", res.label_entropy);
  add_solver_result(report, "minimization", res.minimization);
  // decomposition-induced measurement as a consistency companion; the gap
  // against the decomposition optimum is reported, not asserted to vanish
  Povm induced = povm_from_decomposition(file.ensemble->mixture,
                                         res.minimization.argmin.weights,
                                         res.minimization.argmin.kets);
  double via_povm = povm_information(*file.ensemble, induced);
  report.add("induced_povm_information", via_povm);
  report.add("povm_gap", via_povm - res.value);
  return emit(report,
              res.minimization.converged ? kExitOk : kExitNoConvergence,
              start);
}

int dispatch(int argc, char** argv) {
  CLI::App app{
      "eoflab: formation-entanglement and accessible-information toolkit"};
  app.require_subcommand(1);

  CommonOptions opt;
  std::string state_path, second_path, env3_path, env4_path;
  std::string lambda_spec;
  double overlap_b = 0.0, overlap_d = 0.0;
  bool oracle_decomposition = false;

  CLI::App* eof_cmd = app.add_subcommand("eof", "Entanglement of formation");
  eof_cmd->add_option("state", state_path, "State file")->required();
  add_common(eof_cmd, opt);

  CLI::App* certify_cmd =
      app.add_subcommand("certify", "Pair optimality certificate");
  certify_cmd->add_option("state", state_path, "State file with two kets")
      ->required();
  add_common(certify_cmd, opt);

  CLI::App* oracle_cmd =
      app.add_subcommand("oracle", "Two-qubit closed-form reference");
  oracle_cmd->add_option("state", state_path, "State file")->required();
  oracle_cmd->add_flag("--decomposition", oracle_decomposition,
                       "Also emit the optimal decomposition");
  add_common(oracle_cmd, opt);

  CLI::App* gap_cmd =
      app.add_subcommand("gap", "Joint-versus-marginal comparison");
  gap_cmd->add_option("state_a", state_path, "First state file")->required();
  gap_cmd->add_option("state_b", second_path, "Second state file")->required();
  add_common(gap_cmd, opt);

  CLI::App* case1_cmd =
      app.add_subcommand("case1", "Product-environment experiment");
  case1_cmd->add_option("state", state_path, "Two-factor state file")
      ->required();
  case1_cmd->add_option("--env3", env3_path, "Third-factor state file");
  case1_cmd->add_option("--env4", env4_path, "Fourth-factor state file");
  add_common(case1_cmd, opt);

  CLI::App* case2_cmd =
      app.add_subcommand("case2", "Paired-optimal-vectors experiment");
  case2_cmd->add_option("state", state_path, "Pair file (kets or matrix)")
      ->required();
  case2_cmd->add_option("--lambda-sweep", lambda_spec,
                        "Comma-separated lambda values");
  case2_cmd->add_option("--overlap-b", overlap_b,
                        "Fourth-factor environment overlap");
  case2_cmd->add_option("--overlap-d", overlap_d,
                        "Third-factor environment overlap");
  add_common(case2_cmd, opt);

  CLI::App* accinfo_cmd =
      app.add_subcommand("accinfo", "Accessible information of an ensemble");
  accinfo_cmd->add_option("state", state_path, "State file with an ensemble")
      ->required();
  add_common(accinfo_cmd, opt);

  CLI11_PARSE(app, argc, argv);

  if (eof_cmd->parsed()) return cmd_eof(state_path, opt);
  if (certify_cmd->parsed()) return cmd_certify(state_path, opt);
  if (oracle_cmd->parsed()) {
    return cmd_oracle(state_path, oracle_decomposition, opt);
  }
  if (gap_cmd->parsed()) return cmd_gap(state_path, second_path, opt);
  if (case1_cmd->parsed()) {
    return cmd_case1(state_path, env3_path, env4_path, opt);
  }
  if (case2_cmd->parsed()) {
    return cmd_case2(state_path, lambda_spec, overlap_b, overlap_d, opt);
  }
  if (accinfo_cmd->parsed()) return cmd_accinfo(state_path, opt);
  return kExitOk;
}

}  // namespace

int main(int argc, char** argv) {
  try {
    return dispatch(argc, argv);
  } catch (const ParseError& e) {
    std::cerr << "parse error: " << e.what() << "\n";
    return kExitParse;
  } catch (const DegeneracyError& e) {
    std::cerr << "degenerate input: " << e.what() << "\n";
    return kExitDegenerate;
  } catch (const CertificateError& e) {
    std::cerr << "certificate precondition: " << e.what() << "\n";
    return kExitDegenerate;
  } catch (const SizeError& e) {
    std::cerr << "size cap: " << e.what() << "\n";
    return kExitSizeCap;
  } catch (const Error& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 1;
  } catch (const std::exception& e) {
    std::cerr << "unexpected error: " << e.what() << "\n";
    return 1;
  }
}
