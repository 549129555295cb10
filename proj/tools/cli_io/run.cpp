#include <Eigen/Core>
#include <boost/version.hpp>
#include <chrono>
#include <cmath>
#include <ctime>
#include <filesystem>
#include <fstream>
#include <functional>
#include <iomanip>
#include <numbers>
#include <sstream>

#include "cli_io.hpp"
#include "spherefield/analytic.hpp"
#include "spherefield/chung.hpp"
#include "spherefield/conditioning.hpp"
#include "spherefield/errors.hpp"
#include "spherefield/geometry.hpp"
#include "spherefield/legendre.hpp"
#include "spherefield/rng.hpp"
#include "spherefield/smallball.hpp"
#include "spherefield/synthesis.hpp"

#ifndef SPHEREFIELD_VERSION
#define SPHEREFIELD_VERSION "unknown"
#endif

namespace spherefield::cli {
namespace {

using nlohmann::json;
namespace fs = std::filesystem;

// Table writer: '#' header lines, then a CSV body with full-precision doubles.
class Csv {
 public:
  explicit Csv(const std::string& hash) { out_ << "# manifest_hash=" << hash << "\n"; }
  Csv& header(std::initializer_list<const char*> cols) {
    bool first = true;
    for (const char* c : cols) {
      out_ << (first ? "" : ",") << c;
      first = false;
    }
    out_ << "\n";
    return *this;
  }
  template <class... T>
  void row(const T&... v) {
    bool first = true;
    ((out_ << (first ? "" : ","), cell(v), first = false), ...);
    out_ << "\n";
  }
  std::string str() const { return out_.str(); }

 private:
  void cell(double v) {
    if (std::isnan(v)) out_ << "nan";
    else if (std::isinf(v)) out_ << (v > 0 ? "inf" : "-inf");
    else out_ << std::setprecision(17) << v;
  }
  void cell(const std::string& s) { out_ << s; }
  void cell(const char* s) { out_ << s; }
  void cell(bool b) { out_ << (b ? "pass" : "fail"); }
  template <class I>
    requires std::is_integral_v<I>
  void cell(I v) { out_ << v; }
  std::ostringstream out_;
};

void write_file(const fs::path& path, const std::string& body) {
  std::ofstream out(path, std::ios::binary | std::ios::trunc);
  if (!out) throw IoError("cannot write " + path.string());
  out << body;
  out.close();
  if (!out) throw IoError("write failed for " + path.string());
}

std::string utc_timestamp() {
  const std::time_t now = std::time(nullptr);
  std::tm tm{};
  gmtime_r(&now, &tm);
  char buf[32];
  std::strftime(buf, sizeof buf, "%Y-%m-%dT%H:%M:%SZ", &tm);
  return buf;
}

json versions() {
  return {{"spherefield", SPHEREFIELD_VERSION},
          {"eigen", std::to_string(EIGEN_WORLD_VERSION) + "." + std::to_string(EIGEN_MAJOR_VERSION) + "." +
                        std::to_string(EIGEN_MINOR_VERSION)},
          {"boost", BOOST_LIB_VERSION}};
}

CovarianceModel model_of(const ExperimentManifest& m) {
  const SpectrumParams params = spectrum_of(m);
  if (m.ell_max > 0) return CovarianceModel(params, m.ell_max);
  return select_truncation(params, m.tol);
}

// Quasi-uniform directions on the sphere; deterministic, no seed.
std::vector<Vec3> fibonacci_directions(int n) {
  std::vector<Vec3> dirs;
  dirs.reserve(n);
  const double golden = std::numbers::pi * (3.0 - std::sqrt(5.0));
  for (int i = 0; i < n; ++i) {
    const double z = 1.0 - (2.0 * i + 1.0) / n;
    const double s = std::sqrt(std::max(0.0, 1.0 - z * z));
    dirs.push_back({s * std::cos(golden * i), s * std::sin(golden * i), z});
  }
  return dirs;
}

const SpacetimePoint kCenter{};  // north pole, t = 0

// What a command produces for one seed.
struct SeedOutput {
  std::string csv;
  json extra;  // written as <cmd>_<extra_name>_seed<N>.json when non-null
  std::string extra_name;
  double clipped_mass = 0.0;
  json aux;  // in-memory only, for cross-seed summaries
};

SeedOutput run_simulate(const ExperimentManifest& m, const CovarianceModel& model, std::uint64_t seed,
                        const std::string& hash) {
  const auto dirs = fibonacci_directions(m.sphere_points);
  const TimeGrid grid = TimeGrid::make(m.times);
  FieldRealization f;
  if (backend_from_string(m.backend) == Backend::kKl) {
    f = synthesize_field(model, dirs, grid, seed);
  } else {
    const auto points = lattice(dirs, grid);
    const GaussianSampler sampler(model, points);
    f.mesh = points;
    f.values.resize(points.size());
    sampler.draw(seed, 0, f.values);
    f.clipped_mass = sampler.clipped_mass();
  }
  Csv csv(hash);
  csv.header({"theta", "phi", "t", "value"});
  for (std::size_t i = 0; i < f.mesh.size(); ++i) {
    const auto [theta, phi] = angles_from_direction(f.mesh[i].dir);
    csv.row(theta, phi, f.mesh[i].time, f.values[i]);
  }
  return {csv.str(), nullptr, "", f.clipped_mass, nullptr};
}

SeedOutput run_covariance(const ExperimentManifest& m, const CovarianceModel& model, std::uint64_t seed,
                          const std::string& hash) {
  const auto points = lattice(fibonacci_directions(m.sphere_points), TimeGrid::make(m.times));
  const Backend backend = backend_from_string(m.backend);
  const auto check = empirical_cov_check(model, points, static_cast<std::size_t>(m.n_samples), seed, backend);
  const auto env = equivalence_ratio_scan(model, 1000, 0.5, 0.5, seed);
  Csv csv(hash);
  csv.header({"quantity", "value"});
  csv.row("n_points", points.size());
  csv.row("n_samples", check.n_samples);
  csv.row("max_abs_error", check.max_abs_error);
  csv.row("max_se_units", check.max_se_units);
  csv.row("ratio_min", env.min_ratio);
  csv.row("ratio_max", env.max_ratio);
  csv.row("ratio_pairs", env.n_pairs);
  csv.row("tail_bound", model.tail_bound());
  return {csv.str(), nullptr, "", 0.0, nullptr};
}

SeedOutput run_smallball(const ExperimentManifest& m, const CovarianceModel& model, std::uint64_t seed,
                         const std::string& hash) {
  const auto eps = eps_ladder(m.eps_hi, m.eps_lo, m.eps_count);
  const auto curve = estimate_small_ball(model, kCenter, m.r, eps, m.n_samples, m.mesh_space, m.mesh_time, seed);
  const auto& params = model.params();
  const auto rp = RateParams::from(params);
  Csv csv(hash);
  csv.header({"eps", "p_hat", "ci_lo", "ci_hi", "neg_log_p", "psi", "normalized_kappa"});
  for (std::size_t i = 0; i < eps.size(); ++i) {
    const double nlp = curve.p_hat[i] > 0.0 ? -std::log(curve.p_hat[i]) : std::numeric_limits<double>::infinity();
    const double psi = psi_rate(rp, m.r, eps[i]);
    csv.row(eps[i], curve.p_hat[i], curve.ci_lo[i], curve.ci_hi[i], nlp, psi, nlp / psi);
  }
  json fit = {{"manifest_hash", hash}};
  try {
    const auto f = fit_exponent(curve, params);
    const auto b = bounds_consistency(curve, params);
    fit["slope"] = f.slope;
    fit["intercept"] = f.intercept;
    fit["r_squared"] = f.r_squared;
    fit["implied_p"] = f.implied_p;
    fit["theory_p"] = f.theory_p;
    fit["n_points"] = f.n_points;
    fit["A1_hat"] = b.a1_hat;
    fit["A2_hat"] = b.a2_hat;
    fit["bounds_consistent"] = b.consistent;
  } catch (const DomainError& e) {
    // too few usable eps for a fit: report it instead of failing the run
    fit["fit_error"] = e.what();
  }
  return {csv.str(), fit, "fit", curve.clipped_mass, nullptr};
}

SeedOutput run_sln_check(const ExperimentManifest& m, const CovarianceModel& model, std::uint64_t seed,
                         const std::string& hash) {
  const SlnRegime regime{m.theta_min, m.theta_max};
  const auto sweep = sln_sweep(model, m.n_configs, m.max_points, m.max_lag, seed, regime);
  Csv csv(hash);
  csv.header({"config_id", "n", "var", "comparator", "ratio", "in_regime"});
  for (std::size_t i = 0; i < sweep.reports.size(); ++i) {
    const auto& r = sweep.reports[i];
    csv.row(i, r.n, r.var, r.comparator, r.ratio, r.in_regime ? 1 : 0);
  }
  std::vector<double> ladder;
  constexpr int kLadder = 8;
  for (int i = 0; i < kLadder; ++i) {
    ladder.push_back(std::min(m.theta_max, m.theta_min * std::pow(m.theta_max / m.theta_min, i / (kLadder - 1.0))));
  }
  const auto fit = sln_exponent_fit(model, ladder, m.t_lag, regime);
  json summary = {{"manifest_hash", hash},
                  {"min_ratio", sweep.min_ratio},
                  {"n_degenerate", sweep.n_degenerate},
                  {"fitted_exponent", fit.slope},
                  {"expected_exponent", model.params().alpha - 2.0},
                  {"fit_r_squared", fit.r_squared}};
  return {csv.str(), summary, "summary", 0.0, nullptr};
}

SeedOutput run_chung(const ExperimentManifest& m, const CovarianceModel& model, std::uint64_t seed,
                     const std::string& hash) {
  const auto traces = empirical_liminf(model, kCenter, m.ladder_base, m.n_levels, m.mesh_space, m.mesh_time, {seed});
  const auto& t = traces.front();
  Csv csv(hash);
  csv.header({"n", "r_n", "phi", "M_hat", "phi_M_hat", "running_min"});
  for (std::size_t i = 0; i < t.radii.size(); ++i) {
    csv.row(i + 1, t.radii[i], t.phi[i], t.m_hat[i], t.values[i], t.running_min[i]);
  }
  SeedOutput out{csv.str(), nullptr, "", 0.0, nullptr};
  out.aux = {{"radii", t.radii}, {"values", t.values}, {"running_min", t.running_min}};
  return out;
}

SeedOutput run_covering(const ExperimentManifest& m, const CovarianceModel& model, std::uint64_t seed,
                        const std::string& hash) {
  const auto eps = eps_ladder(m.eps_hi, m.eps_lo, m.eps_count);
  Csv csv(hash);
  csv.header({"metric", "eps", "value", "std_err"});
  for (const auto& [metric, name] : {std::pair{NetMetric::kMu, "mu"}, std::pair{NetMetric::kCanonical, "canonical"}}) {
    for (double e : eps) {
      const auto c = covering_number(model, kCenter, m.r, e, metric, seed, m.n_probe);
      csv.row(name, e, c.net_size, 0.0);
    }
  }
  return {csv.str(), nullptr, "", 0.0, nullptr};
}

SeedOutput run_volume(const ExperimentManifest& m, const CovarianceModel& model, std::uint64_t seed,
                      const std::string& hash) {
  const auto eps = eps_ladder(m.eps_hi, m.eps_lo, m.eps_count);
  const auto& params = model.params();
  const double expo = volume_exponent(params);
  Csv csv(hash);
  csv.header({"eps", "value", "std_err", "prefactor_law"});
  for (double e : eps) {
    const auto v = mu_ball_volume_mc(params, e, static_cast<int>(m.n_samples), seed);
    const double law = e < 1.0 ? volume_prefactor(params, e) * std::pow(e, expo) : std::numeric_limits<double>::quiet_NaN();
    csv.row(e, v.volume, v.std_err, law);
  }
  return {csv.str(), nullptr, "", 0.0, nullptr};
}

SeedOutput run_lemmas(const ExperimentManifest& m, const CovarianceModel& model, std::uint64_t seed,
                      const std::string& hash) {
  Csv csv(hash);
  csv.header({"lemma", "case", "lhs", "rhs", "ratio", "result"});
  constexpr double kDelta = 0.5;
  for (int i = 1; i <= 9; ++i) {
    const double q = 0.1 * i;
    for (double a : {0.4, 0.2, 0.1, 0.01}) {
      const auto c = integral_bound_check(q, kDelta, a);
      std::ostringstream id;
      id << "q=" << q << ";a=" << a;
      csv.row("integral_bound", id.str(), c.lhs, c.rhs, c.lhs / c.rhs, c.holds);
    }
  }
  for (int ell : {1, 2, 5, 10, 50, 100, 200, 1000}) {
    for (double theta : {1e-3, 1e-2, 0.1, 0.5}) {
      const auto c = taylor_bound_check(ell, theta);
      std::ostringstream id;
      id << "l=" << ell << ";theta=" << theta;
      csv.row("taylor_bound", id.str(), c.lhs, c.rhs, c.ratio, c.lhs >= 0.0 && c.lhs <= 2.0 && c.ratio <= 1.0);
    }
  }
  const auto pts = sample_ball(kCenter, 0.5, static_cast<int>(kPosdefMaxPoints), seed);
  for (int ell : {1, 2, 5, 10, 50}) {
    const auto r = posdef_check(model.params(), kCenter, pts, ell);
    csv.row("posdef", "l=" + std::to_string(ell), r.min_eigenvalue, -1e-8 * r.scale,
            r.scale > 0.0 ? r.min_eigenvalue / r.scale : 0.0, r.passed);
  }
  (void)m;
  return {csv.str(), nullptr, "", 0.0, nullptr};
}

using Runner = std::function<SeedOutput(const ExperimentManifest&, const CovarianceModel&, std::uint64_t,
                                        const std::string&)>;

Runner runner_for(const std::string& command) {
  if (command == "simulate") return run_simulate;
  if (command == "covariance") return run_covariance;
  if (command == "smallball") return run_smallball;
  if (command == "sln-check") return run_sln_check;
  if (command == "chung") return run_chung;
  if (command == "covering") return run_covering;
  if (command == "volume") return run_volume;
  if (command == "lemmas") return run_lemmas;
  throw ValidationError({"unknown command '" + command + "'"});
}

}  // namespace

RunResult run(const ExperimentManifest& m) {
  if (auto v = validate(m); !v.empty()) throw ValidationError(std::move(v));
  const Runner runner = runner_for(m.command);
  const CovarianceModel model = model_of(m);

  const fs::path dir(m.output_dir);
  std::error_code ec;
  fs::create_directories(dir, ec);
  if (ec) throw IoError("cannot create output directory " + dir.string() + ": " + ec.message());

  RunResult result;
  json chung_summary = json::array();
  std::vector<json> chung_traces;
  for (const std::uint64_t seed : m.seeds) {
    const ExperimentManifest one = single_seed(m, seed);
    const std::string hash = manifest_hash(one);
    const auto t0 = std::chrono::steady_clock::now();
    SeedOutput out = runner(one, model, seed, hash);
    const double seconds = std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();

    const std::string stem = m.command + "_seed" + std::to_string(seed);
    write_file(dir / (stem + ".csv"), out.csv);
    result.files.push_back(dir / (stem + ".csv"));
    if (!out.extra.is_null()) {
      const fs::path p = dir / (m.command + "_" + out.extra_name + "_seed" + std::to_string(seed) + ".json");
      write_file(p, out.extra.dump(2) + "\n");
      result.files.push_back(p);
    }
    json sidecar = {{"manifest", to_json(one)},
                    {"hash", hash},
                    {"versions", versions()},
                    {"ell_max", model.ell_max()},
                    {"clipped_mass", out.clipped_mass},
                    {"runtimes", {{"seconds", seconds}}},
                    {"timestamp", utc_timestamp()}};
    write_file(dir / (stem + ".json"), sidecar.dump(2) + "\n");
    result.files.push_back(dir / (stem + ".json"));

    if (m.command == "chung") {
      chung_summary.push_back({{"seed", seed}, {"hash", hash}, {"csv", stem + ".csv"}});
      chung_traces.push_back(std::move(out.aux));
    }
  }

  if (m.command == "chung") {
    // cross-seed view: the per-level minimum over seeds of phi(r_n) M_hat
    const auto& radii = chung_traces.front()["radii"];
    std::vector<double> level_min(radii.size(), std::numeric_limits<double>::infinity());
    std::vector<double> final_min;
    for (const auto& t : chung_traces) {
      const auto values = t["values"].get<std::vector<double>>();
      for (std::size_t i = 0; i < values.size(); ++i) level_min[i] = std::min(level_min[i], values[i]);
      final_min.push_back(t["running_min"].back().get<double>());
    }
    json summary = {{"manifest_hash", manifest_hash(m)},
                    {"seeds", chung_summary},
                    {"radii", radii},
                    {"level_min_over_seeds", level_min},
                    {"final_running_min", final_min},
                    {"timestamp", utc_timestamp()}};
    const fs::path p = dir / "chung_summary.json";
    write_file(p, summary.dump(2) + "\n");
    result.files.push_back(p);
  }
  return result;
}

int exit_code_for(const std::exception& e) {
  if (dynamic_cast<const ValidationError*>(&e) || dynamic_cast<const DomainError*>(&e) ||
      dynamic_cast<const std::invalid_argument*>(&e)) {
    return kExitValidation;
  }
  if (dynamic_cast<const IoError*>(&e) || dynamic_cast<const fs::filesystem_error*>(&e)) return kExitIo;
  return kExitNumerical;
}

nlohmann::json error_report(const std::exception& e) {
  json j;
  const int code = exit_code_for(e);
  j["error"] = code == kExitValidation ? "validation" : code == kExitIo ? "io" : "numerical";
  j["exit_code"] = code;
  j["message"] = e.what();
  j["violations"] = json::array();
  if (const auto* v = dynamic_cast<const ValidationError*>(&e)) j["violations"] = v->violations();
  return j;
}

}  // namespace spherefield::cli
