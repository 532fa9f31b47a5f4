// Command-line front end: figure experiments plus design/evaluate/verify on
// saved solution files.

#include <cstdio>
#include <iostream>
#include <sstream>

#include "CLI11.hpp"
#include "dfrc/experiments.hpp"
#include "dfrc/verify.hpp"

using namespace dfrc;

namespace {

struct Common {
  std::string config_path;
  std::string experiment;
  std::uint64_t seed = 0;
  int trials = -1;
  std::string out;
  std::string format;
  unsigned threads = 0;
};

void add_common(CLI::App& app, Common& c) {
  app.add_option("--config", c.config_path, "JSON experiment config");
  app.add_option("--experiment", c.experiment, "fig2|fig3|fig4|fig5|fig6|fig7|custom");
  app.add_option("--seed", c.seed, "master seed");
  app.add_option("--trials", c.trials, "Monte Carlo trials");
  app.add_option("--out", c.out, "output path (stdout when omitted)");
  app.add_option("--format", c.format, "csv|json")->check(CLI::IsMember({"csv", "json"}));
  app.add_option("--threads", c.threads, "worker threads (0: all cores)");
}

ExperimentConfig build_config(const Common& o, const CLI::App& app) {
  ExperimentConfig c = o.config_path.empty() ? ExperimentConfig{} : load_config(o.config_path);
  if (!o.experiment.empty()) c.experiment = o.experiment;
  if (app.count("--seed")) c.seed = o.seed;
  if (o.trials >= 0) c.trials = o.trials;
  if (!o.out.empty()) c.output = o.out;
  if (!o.format.empty()) c.format = o.format;
  if (app.count("--threads")) c.threads = o.threads;
  c.validate();
  return c;
}

void emit(const std::string& text, const std::string& path) {
  if (path.empty()) std::cout << text;
  else write_file(path, text);
}

std::string render(const ResultTable& t, const std::string& format) {
  return format == "json" ? t.to_json() : t.to_csv();
}

int exit_code(ErrorCode c) {
  switch (c) {
    case ErrorCode::Infeasible:
      return 2;
    case ErrorCode::SolverFailure:
      return 3;
    case ErrorCode::ConfigError:
    case ErrorCode::InvalidArgument:
      return 4;
    default:
      return 1;
  }
}

std::string extended_report(const ExtendedKktReport& r) {
  std::ostringstream os;
  os.precision(6);
  os << std::scientific;
  os << "lambda_h " << r.lambda_h << "\n";
  os << "mu " << r.mu << "\nomega " << r.omega << "\n";
  os << "stationarity " << r.stationarity << "\n";
  os << "power_residual " << r.power_residual << "\n";
  os << "complementarity " << r.complementarity << "\n";
  os << "dual_sign " << r.dual_sign << "\n";
  os << "primal_sinr " << r.primal_sinr << "\n";
  os << "max_residual " << r.max_residual() << "\n";
  os << "status " << (r.max_residual() <= 1e-8 ? "PASS" : "FAIL") << "\n";
  return os.str();
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"CRB-minimizing dual-function radar-communication beamforming toolkit"};
  app.set_version_flag("--version", kToolVersion);
  Common main_opts;
  add_common(app, main_opts);

  CLI::App* run = app.add_subcommand("run", "run a figure experiment (default)");
  Common run_opts;
  add_common(*run, run_opts);

  CLI::App* design = app.add_subcommand("design", "design beamformers and save them as JSON");
  Common design_opts;
  add_common(*design, design_opts);
  bool point = false, extended = false, force_sdp = false;
  int k_users = 0;
  double sinr_db = std::numeric_limits<double>::quiet_NaN();
  auto* kind = design->add_option_group("target");
  kind->add_flag("--point", point, "point target");
  kind->add_flag("--extended", extended, "extended target");
  kind->require_option(1);
  design->add_option("--k", k_users, "number of users (default: config)");
  design->add_option("--sinr-db", sinr_db, "common SINR threshold (default: config)");
  design->add_flag("--sdp", force_sdp, "use the relaxation even for a single user");

  CLI::App* evaluate = app.add_subcommand("evaluate", "evaluate a saved solution");
  std::string eval_solution, eval_out, eval_format = "csv";
  double eval_step = 0.5;
  bool eval_pattern = false, eval_crb = false;
  evaluate->add_option("--solution", eval_solution, "saved solution JSON")->required();
  auto* what = evaluate->add_option_group("quantity");
  what->add_flag("--beampattern", eval_pattern, "transmit beampattern over [-90, 90] deg");
  what->add_flag("--crb", eval_crb, "CRB values of the saved covariance");
  what->require_option(1);
  evaluate->add_option("--grid-step", eval_step, "beampattern grid step in degrees");
  evaluate->add_option("--out", eval_out, "output path");
  evaluate->add_option("--format", eval_format, "csv|json")->check(CLI::IsMember({"csv", "json"}));

  CLI::App* verify = app.add_subcommand("verify", "independent optimality checks on a saved solution");
  std::string ver_solution;
  bool ver_kkt = false, ver_schur = false, ver_rank = false;
  verify->add_option("--solution", ver_solution, "saved solution JSON")->required();
  auto* checks = verify->add_option_group("check");
  checks->add_flag("--kkt", ver_kkt, "KKT residuals");
  checks->add_flag("--schur", ver_schur, "LMI vs closed-form Schur complement");
  checks->add_flag("--theorem2", ver_rank, "column rank of H [a, a']");
  checks->require_option(1);

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int rc = app.exit(e);
    return rc == 0 ? 0 : 4;
  }

  try {
    if (*design) {
      ExperimentConfig c = build_config(design_opts, *design);
      const int K = k_users > 0 ? k_users : c.users;
      const double g = std::isnan(sinr_db) ? c.sinr_db : sinr_db;
      const Scenario s = make_scenario(c, K, g);
      DesignSolution sol;
      if (point) sol = (K == 1 && !force_sdp) ? design_point_single(s) : design_point_multi(s);
      else sol = (K == 1 && !force_sdp) ? design_extended_single(s) : design_extended_multi(s);
      emit(solution_to_json(s, sol, point ? "point" : "extended"), c.output);
      return 0;
    }
    if (*evaluate) {
      const SavedSolution saved = solution_from_json(read_file(eval_solution));
      const Scenario& s = saved.scenario;
      const CMatrix& R = saved.solution.covariance;
      ResultTable t;
      t.set_meta("tool", kToolVersion);
      t.set_meta("solution", eval_solution);
      if (eval_pattern) {
        t.columns = {"theta_deg", "pattern", "pattern_db"};
        const int n = static_cast<int>(std::floor(180.0 / eval_step + 1e-9)) + 1;
        std::vector<double> grid;
        for (int i = 0; i < n; ++i) grid.push_back(deg_to_rad(-90.0 + i * eval_step));
        const RVector p = beampattern(R, grid, s.geometry);
        for (int i = 0; i < n; ++i) t.add_row({-90.0 + i * eval_step, p(i), 10.0 * std::log10(p(i))});
        t.set_meta("grid_step_deg", std::to_string(eval_step));
      } else {
        t.columns = {"crb_theta", "crb_alpha", "crb_extended", "trace_inverse", "power"};
        auto safe = [](auto f) {
          try {
            return f();
          } catch (const Error&) {
            return std::numeric_limits<double>::quiet_NaN();
          }
        };
        t.add_row({safe([&] { return crb_point_theta(R, s.point.theta, s.point.alpha, s); }),
                   safe([&] { return crb_point_alpha(R, s.point.theta, s.point.alpha, s); }),
                   safe([&] { return crb_extended(R, s); }), safe([&] { return trace_inverse(R); }),
                   R.trace().real()});
      }
      emit(eval_format == "json" ? t.to_json() : t.to_csv(), eval_out);
      return 0;
    }
    if (*verify) {
      const SavedSolution saved = solution_from_json(read_file(ver_solution));
      const Scenario& s = saved.scenario;
      const DesignSolution& sol = saved.solution;
      if (ver_kkt) {
        if (saved.kind == "point") {
          if (!sol.duals)
            throw Error(ErrorCode::ConfigError, "solution carries no multipliers; design it with --sdp");
          std::cout << format_report(check_kkt_point(sol, *sol.duals, s));
        } else {
          if (s.users() != 1) throw Error(ErrorCode::ConfigError, "extended KKT check covers the single-user case");
          std::cout << extended_report(check_kkt_extended_single(sol.covariance, s.channel(0), s.sinr_thresholds[0],
                                                                 s.power_budget, s.noise_comm));
        }
      } else if (ver_schur) {
        const SchurCheck r = check_schur(sol.covariance, s.point.theta, s.geometry);
        std::printf("t_lmi %.12e\nt_closed %.12e\nrelative_difference %.3e\nstatus %s\n", r.t_lmi, r.t_closed,
                    r.relative_difference(), r.relative_difference() <= 1e-8 ? "PASS" : "FAIL");
      } else {
        const RankReport r = check_theorem2_condition(s.channels, s.point.theta, s.geometry);
        std::printf("rank %d\nfull_column_rank %s\n", r.rank, r.full_column_rank ? "true" : "false");
        for (Eigen::Index i = 0; i < r.singular_values.size(); ++i)
          std::printf("singular_value[%ld] %.6e\n", static_cast<long>(i), r.singular_values(i));
      }
      return 0;
    }
    const Common& o = *run ? run_opts : main_opts;
    ExperimentConfig c = build_config(o, *run ? *run : app);
    emit(render(run_experiment(c), c.format), c.output);
    return 0;
  } catch (const Error& e) {
    std::fprintf(stderr, "error [%s]: %s\n", to_string(e.code()), e.what());
    return exit_code(e.code());
  } catch (const std::exception& e) {
    std::fprintf(stderr, "error: %s\n", e.what());
    return 1;
  }
}
