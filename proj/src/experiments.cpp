#include "dfrc/experiments.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <fstream>
#include <limits>
#include <set>
#include <sstream>

#include "json.hpp"

namespace dfrc {

using nlohmann::json;

namespace {

constexpr double kNaN = std::numeric_limits<double>::quiet_NaN();

std::vector<double> linspace_step(double lo, double hi, double step) {
  std::vector<double> v;
  const int n = static_cast<int>(std::floor((hi - lo) / step + 1e-9)) + 1;
  for (int i = 0; i < n; ++i) v.push_back(lo + i * step);
  return v;
}

std::string fmt_num(double x) {
  if (std::isnan(x)) return "nan";
  if (std::isinf(x)) return x > 0 ? "inf" : "-inf";
  char buf[40];
  std::snprintf(buf, sizeof buf, "%.10e", x);
  return buf;
}

std::string hex64(std::uint64_t v) {
  char buf[20];
  std::snprintf(buf, sizeof buf, "%016llx", static_cast<unsigned long long>(v));
  return buf;
}

template <class T>
std::string join(const std::vector<T>& v) {
  std::ostringstream os;
  for (std::size_t i = 0; i < v.size(); ++i) os << (i ? "," : "") << v[i];
  return os.str();
}

json config_numbers(const ExperimentConfig& c) {
  return json{{"experiment", c.experiment},
              {"n_tx", c.n_tx},
              {"n_rx", c.n_rx},
              {"users", c.users},
              {"power_dbm", c.power_dbm},
              {"noise_comm_dbm", c.noise_comm_dbm},
              {"noise_radar_dbm", c.noise_radar_dbm},
              {"frame_len", c.frame_len},
              {"target_angle_deg", c.target_angle_deg},
              {"sinr_db", c.sinr_db},
              {"radar_snr_db", c.radar_snr_db},
              {"sinr_sweep_db", c.sinr_sweep_db},
              {"snr_sweep_db", c.snr_sweep_db},
              {"users_sweep", c.users_sweep},
              {"users_levels", c.users_levels},
              {"sinr_levels_db", c.sinr_levels_db},
              {"grid_step_deg", c.grid_step_deg},
              {"mle_step_deg", c.mle_step_deg},
              {"mle_half_width_deg", c.mle_half_width_deg},
              {"trials", c.trials},
              {"seed", c.seed}};
}

ResultTable new_table(const ExperimentConfig& c, std::vector<std::string> columns) {
  ResultTable t;
  t.columns = std::move(columns);
  t.set_meta("tool", kToolVersion);
  t.set_meta("experiment", c.experiment);
  t.set_meta("config_hash", hex64(config_hash(c)));
  t.set_meta("seed", std::to_string(c.seed));
  t.set_meta("n_tx", std::to_string(c.n_tx));
  t.set_meta("n_rx", std::to_string(c.n_rx));
  t.set_meta("power_dbm", fmt_num(c.power_dbm));
  t.set_meta("noise_comm_dbm", fmt_num(c.noise_comm_dbm));
  t.set_meta("noise_radar_dbm", fmt_num(c.noise_radar_dbm));
  t.set_meta("frame_len", std::to_string(c.frame_len));
  t.set_meta("target_angle_deg", fmt_num(c.target_angle_deg));
  return t;
}

// Designs that may legitimately fail at a sweep point yield NaN; the failure
// kind is counted so the table records it.
struct Failures {
  std::vector<int> infeasible, solver;
  explicit Failures(std::size_t n) : infeasible(n, 0), solver(n, 0) {}
  void note(ResultTable& t) const {
    int a = 0, b = 0;
    for (int v : infeasible) a += v;
    for (int v : solver) b += v;
    t.set_meta("infeasible_points", std::to_string(a));
    t.set_meta("solver_failures", std::to_string(b));
  }
};

template <class F>
double guarded(F&& f, int& infeasible, int& solver) {
  try {
    return f();
  } catch (const Error& e) {
    if (e.code() == ErrorCode::Infeasible) {
      ++infeasible;
      return kNaN;
    }
    if (e.code() == ErrorCode::SolverFailure) {
      ++solver;
      return kNaN;
    }
    throw;
  }
}

double rad2deg_sqrt(double crb) { return rad_to_deg(std::sqrt(crb)); }

double min_sinr_margin_db(const DesignSolution& sol, const Scenario& s) {
  double m = std::numeric_limits<double>::infinity();
  for (int k = 0; k < s.users(); ++k) m = std::min(m, linear_to_db(sol.achieved_sinrs[k] / s.sinr_thresholds[k]));
  return m;
}

std::uint64_t fnv1a(const std::string& s) {
  std::uint64_t h = 1469598103934665603ULL;
  for (unsigned char ch : s) {
    h ^= ch;
    h *= 1099511628211ULL;
  }
  return h;
}

json matrix_json(const CMatrix& m) {
  json re = json::array(), im = json::array();
  for (Eigen::Index r = 0; r < m.rows(); ++r) {
    json rr = json::array(), ri = json::array();
    for (Eigen::Index c = 0; c < m.cols(); ++c) {
      rr.push_back(m(r, c).real());
      ri.push_back(m(r, c).imag());
    }
    re.push_back(rr);
    im.push_back(ri);
  }
  return json{{"rows", m.rows()}, {"cols", m.cols()}, {"re", re}, {"im", im}};
}

CMatrix matrix_from_json(const json& j) {
  const Eigen::Index rows = j.at("rows").get<Eigen::Index>(), cols = j.at("cols").get<Eigen::Index>();
  CMatrix m(rows, cols);
  for (Eigen::Index r = 0; r < rows; ++r)
    for (Eigen::Index c = 0; c < cols; ++c)
      m(r, c) = Complex(j.at("re").at(r).at(c).get<double>(), j.at("im").at(r).at(c).get<double>());
  return m;
}

}  // namespace

// ---------------------------------------------------------------- config

ExperimentConfig ExperimentConfig::resolved() const {
  ExperimentConfig c = *this;
  const std::string& e = c.experiment;
  if (e == "fig2") {
    c.users = 1;
    if (c.sinr_sweep_db.empty()) c.sinr_sweep_db = linspace_step(0.0, 40.0, 2.0);
  } else if (e == "fig4") {
    if (c.snr_sweep_db.empty()) c.snr_sweep_db = linspace_step(-20.0, 40.0, 2.0);
    if (c.trials == 0) c.trials = 1000;
  } else if (e == "fig5" || e == "fig6") {
    if (c.sinr_sweep_db.empty()) c.sinr_sweep_db = linspace_step(0.0, 30.0, 2.0);
    if (c.users_levels.empty()) c.users_levels = {6, 12};
  } else if (e == "fig7") {
    if (c.users_sweep.empty()) c.users_sweep = {2, 4, 6, 8, 10, 12, 14};
    if (c.sinr_levels_db.empty()) c.sinr_levels_db = {10.0, 20.0};
  }
  return c;
}

void ExperimentConfig::validate() const {
  static const std::set<std::string> known{"fig2", "fig3", "fig4", "fig5", "fig6", "fig7", "custom"};
  auto fail = [](const std::string& m) { throw Error(ErrorCode::ConfigError, m); };
  if (!known.count(experiment)) fail("unknown experiment '" + experiment + "'");
  if (n_tx < 2 || n_rx < 2) fail("arrays need at least two antennas");
  if (users < 1) fail("users must be positive");
  if (frame_len < 1) fail("frame_len must be positive");
  if (trials < 0) fail("trials must be nonnegative");
  if (!(grid_step_deg > 0.0) || !(mle_step_deg > 0.0) || !(mle_half_width_deg >= 0.0)) fail("grid steps must be positive");
  if (format != "csv" && format != "json") fail("format must be csv or json");
  for (int k : users_sweep)
    if (k < 1) fail("users_sweep entries must be positive");
  for (int k : users_levels)
    if (k < 1) fail("users_levels entries must be positive");
  for (double v : {power_dbm, noise_comm_dbm, noise_radar_dbm, target_angle_deg, sinr_db, radar_snr_db})
    if (!std::isfinite(v)) fail("numeric settings must be finite");
  if (std::abs(target_angle_deg) >= 90.0) fail("target angle must lie in (-90, 90) degrees");
}

ExperimentConfig config_from_json(const std::string& text) {
  json j;
  try {
    j = json::parse(text);
  } catch (const json::exception& e) {
    throw Error(ErrorCode::ConfigError, std::string("config is not valid JSON: ") + e.what());
  }
  if (!j.is_object()) throw Error(ErrorCode::ConfigError, "config must be a JSON object");
  ExperimentConfig c;
  try {
    for (auto it = j.begin(); it != j.end(); ++it) {
      const std::string& k = it.key();
      const json& v = it.value();
      if (k == "experiment") c.experiment = v.get<std::string>();
      else if (k == "n_tx") c.n_tx = v.get<int>();
      else if (k == "n_rx") c.n_rx = v.get<int>();
      else if (k == "users") c.users = v.get<int>();
      else if (k == "power_dbm") c.power_dbm = v.get<double>();
      else if (k == "noise_comm_dbm") c.noise_comm_dbm = v.get<double>();
      else if (k == "noise_radar_dbm") c.noise_radar_dbm = v.get<double>();
      else if (k == "frame_len") c.frame_len = v.get<int>();
      else if (k == "target_angle_deg") c.target_angle_deg = v.get<double>();
      else if (k == "sinr_db") c.sinr_db = v.get<double>();
      else if (k == "radar_snr_db") c.radar_snr_db = v.get<double>();
      else if (k == "sinr_sweep_db") c.sinr_sweep_db = v.get<std::vector<double>>();
      else if (k == "snr_sweep_db") c.snr_sweep_db = v.get<std::vector<double>>();
      else if (k == "users_sweep") c.users_sweep = v.get<std::vector<int>>();
      else if (k == "users_levels") c.users_levels = v.get<std::vector<int>>();
      else if (k == "sinr_levels_db") c.sinr_levels_db = v.get<std::vector<double>>();
      else if (k == "grid_step_deg") c.grid_step_deg = v.get<double>();
      else if (k == "mle_step_deg") c.mle_step_deg = v.get<double>();
      else if (k == "mle_half_width_deg") c.mle_half_width_deg = v.get<double>();
      else if (k == "trials") c.trials = v.get<int>();
      else if (k == "seed") c.seed = v.get<std::uint64_t>();
      else if (k == "threads") c.threads = v.get<unsigned>();
      else if (k == "output") c.output = v.get<std::string>();
      else if (k == "format") c.format = v.get<std::string>();
      else throw Error(ErrorCode::ConfigError, "unknown config key '" + k + "'");
    }
  } catch (const json::exception& e) {
    throw Error(ErrorCode::ConfigError, std::string("bad config value: ") + e.what());
  }
  c.validate();
  return c;
}

ExperimentConfig load_config(const std::string& path) {
  try {
    return config_from_json(read_file(path));
  } catch (const Error& e) {
    if (e.code() == ErrorCode::InvalidArgument) throw Error(ErrorCode::ConfigError, e.what());
    throw;
  }
}

std::string config_to_json(const ExperimentConfig& c) {
  json j = config_numbers(c);
  j["threads"] = c.threads;
  j["output"] = c.output;
  j["format"] = c.format;
  return j.dump(2);
}

std::uint64_t config_hash(const ExperimentConfig& c) { return fnv1a(config_numbers(c).dump()); }

Scenario make_scenario(const ExperimentConfig& c, int users, double sinr_db) {
  Scenario s;
  s.geometry = ArrayGeometry(c.n_tx, c.n_rx);
  s.channels = CMatrix(users, c.n_tx);
  for (int k = 0; k < users; ++k) {
    Rng rng(derive_seed(c.seed, 0x636861ULL, static_cast<std::uint64_t>(k)));
    s.channels.row(k) = complex_gaussian(1, c.n_tx, 1.0, rng);
  }
  s.sinr_thresholds.assign(users, db_to_linear(sinr_db));
  s.power_budget = dbm_to_mw(c.power_dbm);
  s.noise_comm = dbm_to_mw(c.noise_comm_dbm);
  s.noise_radar = dbm_to_mw(c.noise_radar_dbm);
  s.frame_len = c.frame_len;
  s.point.theta = deg_to_rad(c.target_angle_deg);
  s.point.alpha = Complex(alpha_for_snr(c.radar_snr_db, s), 0.0);
  s.validate();
  return s;
}

// ---------------------------------------------------------------- tables

void ResultTable::add_row(std::vector<double> row) {
  if (row.size() != columns.size())
    throw Error(ErrorCode::DimensionMismatch, "row has " + std::to_string(row.size()) + " entries, table has " +
                                                  std::to_string(columns.size()) + " columns");
  rows.push_back(std::move(row));
}

void ResultTable::set_meta(const std::string& key, const std::string& value) {
  for (auto& kv : metadata)
    if (kv.first == key) {
      kv.second = value;
      return;
    }
  metadata.emplace_back(key, value);
}

std::size_t ResultTable::column(const std::string& name) const {
  auto it = std::find(columns.begin(), columns.end(), name);
  if (it == columns.end()) throw Error(ErrorCode::InvalidArgument, "no column '" + name + "'");
  return static_cast<std::size_t>(it - columns.begin());
}

std::string ResultTable::to_csv() const {
  std::ostringstream os;
  for (const auto& kv : metadata) os << "# " << kv.first << ": " << kv.second << '\n';
  for (std::size_t i = 0; i < columns.size(); ++i) os << (i ? "," : "") << columns[i];
  os << '\n';
  for (const auto& r : rows) {
    for (std::size_t i = 0; i < r.size(); ++i) os << (i ? "," : "") << fmt_num(r[i]);
    os << '\n';
  }
  return os.str();
}

std::string ResultTable::to_json() const {
  json meta = json::object();
  for (const auto& kv : metadata) meta[kv.first] = kv.second;
  json rs = json::array();
  for (const auto& r : rows) {
    json jr = json::array();
    // same rounding as the CSV so both formats carry identical numbers
    for (double x : r) jr.push_back(std::isfinite(x) ? json(std::stod(fmt_num(x))) : json(nullptr));
    rs.push_back(jr);
  }
  return json{{"metadata", meta}, {"columns", columns}, {"rows", rs}}.dump(2) + "\n";
}

// ---------------------------------------------------------------- figures

ResultTable run_fig2(const ExperimentConfig& c) {
  ResultTable t = new_table(c, {"gamma_db", "rcrb_closed_deg", "rcrb_sdp_deg", "rel_diff_point", "mse_closed",
                                "mse_sdp", "rel_diff_extended"});
  const auto& gs = c.sinr_sweep_db;
  std::vector<std::vector<double>> rows(gs.size());
  Failures f(gs.size());
  parallel_for(
      gs.size(),
      [&](std::size_t i) {
        const Scenario s = make_scenario(c, 1, gs[i]);
        int& inf = f.infeasible[i];
        int& sf = f.solver[i];
        const double pc = guarded([&] { return design_point_single(s).objective; }, inf, sf);
        const double ps = guarded([&] { return design_point_multi(s).objective; }, inf, sf);
        const double ec = guarded([&] { return design_extended_single(s).objective; }, inf, sf);
        const double es = guarded([&] { return design_extended_multi(s).objective; }, inf, sf);
        rows[i] = {gs[i], rad2deg_sqrt(pc), rad2deg_sqrt(ps), std::abs(pc - ps) / pc, ec, es, std::abs(ec - es) / ec};
      },
      c.threads);
  for (auto& r : rows) t.add_row(std::move(r));
  t.set_meta("sinr_sweep_db", join(gs));
  t.set_meta("radar_snr_db", fmt_num(c.radar_snr_db));
  f.note(t);
  return t;
}

ResultTable run_fig3(const ExperimentConfig& c) {
  ResultTable t = new_table(c, {"theta_deg", "pattern", "pattern_db"});
  const Scenario s = make_scenario(c, c.users, c.sinr_db);
  const DesignSolution sol = design_point_multi(s);
  std::vector<double> grid_deg = linspace_step(-90.0, 90.0, c.grid_step_deg);
  std::vector<double> grid;
  for (double d : grid_deg) grid.push_back(deg_to_rad(d));
  const RVector p = beampattern(sol.covariance, grid, s.geometry);
  for (std::size_t i = 0; i < grid.size(); ++i)
    t.add_row({grid_deg[i], p(static_cast<Eigen::Index>(i)), linear_to_db(p(static_cast<Eigen::Index>(i)))});
  t.set_meta("users", std::to_string(c.users));
  t.set_meta("sinr_db", fmt_num(c.sinr_db));
  t.set_meta("grid_step_deg", fmt_num(c.grid_step_deg));
  return t;
}

ResultTable run_fig4(const ExperimentConfig& c) {
  ResultTable t = new_table(c, {"snr_db", "rmse_deg", "rcrb_deg", "ratio", "trials"});
  const Scenario s = make_scenario(c, c.users, c.sinr_db);
  const DesignSolution sol = design_point_multi(s);
  if (sol.diagnostics.status != DesignStatus::Optimal)
    throw Error(ErrorCode::SolverFailure, "point design returned no rank-one beamformers");
  GridSpec grid;
  grid.half_width = deg_to_rad(c.mle_half_width_deg);
  grid.step = deg_to_rad(c.mle_step_deg);
  McConfig mc{c.trials, c.seed, c.threads};
  for (const McRow& r : monte_carlo_point(s, sol.comm_beamformers, c.snr_sweep_db, grid, mc))
    t.add_row({r.parameter, rad_to_deg(r.empirical), rad_to_deg(r.bound), r.ratio(), static_cast<double>(r.trials)});
  t.set_meta("users", std::to_string(c.users));
  t.set_meta("sinr_db", fmt_num(c.sinr_db));
  t.set_meta("snr_sweep_db", join(c.snr_sweep_db));
  t.set_meta("trials", std::to_string(c.trials));
  t.set_meta("mle_grid", fmt_num(c.mle_step_deg) + " deg over +-" + fmt_num(c.mle_half_width_deg) + " deg");
  return t;
}

ResultTable run_fig5(const ExperimentConfig& c) {
  ResultTable t = new_table(c, {"users", "gamma_db", "rcrb_deg", "max_rank_ratio"});
  struct Job {
    int k;
    double g;
  };
  std::vector<Job> jobs;
  for (int k : c.users_levels)
    for (double g : c.sinr_sweep_db) jobs.push_back({k, g});
  std::vector<std::vector<double>> rows(jobs.size());
  Failures f(jobs.size());
  parallel_for(
      jobs.size(),
      [&](std::size_t i) {
        const Scenario s = make_scenario(c, jobs[i].k, jobs[i].g);
        double ratio = kNaN;
        const double crb = guarded(
            [&] {
              DesignSolution sol = design_point_multi(s);
              ratio = *std::max_element(sol.diagnostics.rank_ratios.begin(), sol.diagnostics.rank_ratios.end());
              return sol.objective;
            },
            f.infeasible[i], f.solver[i]);
        rows[i] = {static_cast<double>(jobs[i].k), jobs[i].g, rad2deg_sqrt(crb), ratio};
      },
      c.threads);
  for (auto& r : rows) t.add_row(std::move(r));
  t.set_meta("users_levels", join(c.users_levels));
  t.set_meta("sinr_sweep_db", join(c.sinr_sweep_db));
  t.set_meta("radar_snr_db", fmt_num(c.radar_snr_db));
  f.note(t);
  return t;
}

namespace {

// Rank-one extraction and eigen-truncation baseline for one (K, Gamma) point.
std::vector<double> extended_point(const ExperimentConfig& c, int k, double g, int& inf, int& sf) {
  const Scenario s = make_scenario(c, k, g);
  double mse_eig = kNaN, margin = kNaN;
  const double mse = guarded(
      [&] {
        DesignSolution sol = design_extended_multi(s);
        DesignSolution base = eig_truncation_baseline(sol, s);
        mse_eig = base.objective;
        margin = min_sinr_margin_db(base, s);
        return sol.objective;
      },
      inf, sf);
  return {static_cast<double>(k), g, mse, mse_eig, margin};
}

}  // namespace

ResultTable run_fig6(const ExperimentConfig& c) {
  ResultTable t = new_table(c, {"users", "gamma_db", "mse_extracted", "mse_eig_baseline", "eig_min_sinr_margin_db"});
  std::vector<std::pair<int, double>> jobs;
  for (int k : c.users_levels)
    for (double g : c.sinr_sweep_db) jobs.emplace_back(k, g);
  std::vector<std::vector<double>> rows(jobs.size());
  Failures f(jobs.size());
  parallel_for(
      jobs.size(),
      [&](std::size_t i) { rows[i] = extended_point(c, jobs[i].first, jobs[i].second, f.infeasible[i], f.solver[i]); },
      c.threads);
  for (auto& r : rows) t.add_row(std::move(r));
  t.set_meta("users_levels", join(c.users_levels));
  t.set_meta("sinr_sweep_db", join(c.sinr_sweep_db));
  f.note(t);
  return t;
}

ResultTable run_fig7(const ExperimentConfig& c) {
  ResultTable t = new_table(c, {"users", "gamma_db", "mse_extracted", "mse_eig_baseline", "eig_min_sinr_margin_db"});
  std::vector<std::pair<int, double>> jobs;
  for (double g : c.sinr_levels_db)
    for (int k : c.users_sweep) jobs.emplace_back(k, g);
  std::vector<std::vector<double>> rows(jobs.size());
  Failures f(jobs.size());
  parallel_for(
      jobs.size(),
      [&](std::size_t i) { rows[i] = extended_point(c, jobs[i].first, jobs[i].second, f.infeasible[i], f.solver[i]); },
      c.threads);
  for (auto& r : rows) t.add_row(std::move(r));
  t.set_meta("users_sweep", join(c.users_sweep));
  t.set_meta("sinr_levels_db", join(c.sinr_levels_db));
  f.note(t);
  return t;
}

ResultTable run_custom(const ExperimentConfig& c) {
  ResultTable t = new_table(c, {"users", "gamma_db", "rcrb_deg", "mse_crb", "rmse_mc_deg", "mse_mc"});
  const Scenario s = make_scenario(c, c.users, c.sinr_db);
  const DesignSolution pt = design_point_multi(s);
  const DesignSolution ex = design_extended_multi(s);
  double rmse = kNaN, mse = kNaN;
  if (c.trials > 0) {
    McConfig mc{c.trials, c.seed, c.threads};
    if (pt.diagnostics.status == DesignStatus::Optimal) {
      GridSpec grid;
      grid.half_width = deg_to_rad(c.mle_half_width_deg);
      grid.step = deg_to_rad(c.mle_step_deg);
      rmse = rad_to_deg(monte_carlo_point(s, pt.comm_beamformers, {c.radar_snr_db}, grid, mc).front().empirical);
    }
    CMatrix W(s.geometry.n_tx, s.users() + s.geometry.n_tx);
    W << ex.comm_beamformers, *ex.aux_beamformer;
    mse = monte_carlo_extended(s, W, mc).empirical;
  }
  t.add_row({static_cast<double>(c.users), c.sinr_db, rad2deg_sqrt(pt.objective), ex.objective, rmse, mse});
  t.set_meta("radar_snr_db", fmt_num(c.radar_snr_db));
  t.set_meta("trials", std::to_string(c.trials));
  return t;
}

ResultTable run_experiment(const ExperimentConfig& config) {
  const ExperimentConfig c = config.resolved();
  c.validate();
  if (c.experiment == "fig2") return run_fig2(c);
  if (c.experiment == "fig3") return run_fig3(c);
  if (c.experiment == "fig4") return run_fig4(c);
  if (c.experiment == "fig5") return run_fig5(c);
  if (c.experiment == "fig6") return run_fig6(c);
  if (c.experiment == "fig7") return run_fig7(c);
  return run_custom(c);
}

// ---------------------------------------------------------------- solution files

std::string solution_to_json(const Scenario& s, const DesignSolution& sol, const std::string& kind) {
  json sc{{"n_tx", s.geometry.n_tx},
          {"n_rx", s.geometry.n_rx},
          {"channels", matrix_json(s.channels)},
          {"sinr_thresholds", s.sinr_thresholds},
          {"power_budget", s.power_budget},
          {"noise_comm", s.noise_comm},
          {"noise_radar", s.noise_radar},
          {"frame_len", s.frame_len},
          {"theta", s.point.theta},
          {"alpha_re", s.point.alpha.real()},
          {"alpha_im", s.point.alpha.imag()}};
  json so{{"comm_beamformers", matrix_json(sol.comm_beamformers)},
          {"covariance", matrix_json(sol.covariance)},
          {"achieved_sinrs", sol.achieved_sinrs},
          {"objective", sol.objective},
          {"surrogate", sol.surrogate},
          {"status", sol.diagnostics.status == DesignStatus::Optimal ? "optimal" : "rank_excess"},
          {"solver_status", sol.diagnostics.solver_status},
          {"rank_ratios", sol.diagnostics.rank_ratios}};
  if (sol.aux_beamformer) so["aux_beamformer"] = matrix_json(*sol.aux_beamformer);
  json rb = json::array();
  for (const auto& w : sol.relaxed_blocks) rb.push_back(matrix_json(w));
  so["relaxed_blocks"] = rb;
  if (sol.duals) {
    const PointDuals& d = *sol.duals;
    json z = json::array();
    for (const auto& m : d.Z) z.push_back(matrix_json(m));
    so["duals"] = json{{"mu", d.mu},          {"mu_T", d.mu_T},
                       {"phi", d.phi},        {"beta_re", d.beta.real()},
                       {"beta_im", d.beta.imag()}, {"gamma", d.gamma},
                       {"Z_P", matrix_json(d.Z_P)}, {"Z", z}};
  }
  return json{{"kind", kind}, {"tool", kToolVersion}, {"scenario", sc}, {"solution", so}}.dump(1) + "\n";
}

SavedSolution solution_from_json(const std::string& text) {
  SavedSolution out;
  try {
    const json j = json::parse(text);
    out.kind = j.at("kind").get<std::string>();
    const json& sc = j.at("scenario");
    Scenario& s = out.scenario;
    s.geometry = ArrayGeometry(sc.at("n_tx").get<int>(), sc.at("n_rx").get<int>());
    s.channels = matrix_from_json(sc.at("channels"));
    s.sinr_thresholds = sc.at("sinr_thresholds").get<std::vector<double>>();
    s.power_budget = sc.at("power_budget").get<double>();
    s.noise_comm = sc.at("noise_comm").get<double>();
    s.noise_radar = sc.at("noise_radar").get<double>();
    s.frame_len = sc.at("frame_len").get<int>();
    s.point.theta = sc.at("theta").get<double>();
    s.point.alpha = Complex(sc.at("alpha_re").get<double>(), sc.at("alpha_im").get<double>());
    s.validate();

    const json& so = j.at("solution");
    DesignSolution& sol = out.solution;
    sol.comm_beamformers = matrix_from_json(so.at("comm_beamformers"));
    sol.covariance = matrix_from_json(so.at("covariance"));
    sol.achieved_sinrs = so.at("achieved_sinrs").get<std::vector<double>>();
    sol.objective = so.at("objective").is_null() ? kNaN : so.at("objective").get<double>();
    sol.surrogate = so.at("surrogate").is_null() ? kNaN : so.at("surrogate").get<double>();
    sol.diagnostics.status =
        so.at("status").get<std::string>() == "optimal" ? DesignStatus::Optimal : DesignStatus::RankExcess;
    sol.diagnostics.solver_status = so.at("solver_status").get<std::string>();
    sol.diagnostics.rank_ratios = so.at("rank_ratios").get<std::vector<double>>();
    if (so.contains("aux_beamformer")) sol.aux_beamformer = matrix_from_json(so.at("aux_beamformer"));
    for (const auto& m : so.at("relaxed_blocks")) sol.relaxed_blocks.push_back(matrix_from_json(m));
    if (so.contains("duals")) {
      const json& dj = so.at("duals");
      PointDuals d;
      d.mu = dj.at("mu").get<std::vector<double>>();
      d.mu_T = dj.at("mu_T").get<double>();
      d.phi = dj.at("phi").get<double>();
      d.beta = Complex(dj.at("beta_re").get<double>(), dj.at("beta_im").get<double>());
      d.gamma = dj.at("gamma").get<double>();
      d.Z_P = matrix_from_json(dj.at("Z_P"));
      for (const auto& m : dj.at("Z")) d.Z.push_back(matrix_from_json(m));
      sol.duals = d;
    }
  } catch (const json::exception& e) {
    throw Error(ErrorCode::ConfigError, std::string("malformed solution file: ") + e.what());
  }
  return out;
}

std::string read_file(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw Error(ErrorCode::ConfigError, "cannot open '" + path + "'");
  std::ostringstream os;
  os << in.rdbuf();
  return os.str();
}

void write_file(const std::string& path, const std::string& text) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw Error(ErrorCode::ConfigError, "cannot write '" + path + "'");
  out << text;
}

}  // namespace dfrc
