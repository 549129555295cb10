#include <algorithm>
#include <cmath>
#include <fstream>
#include <iomanip>
#include <sstream>

#include "cli_io.hpp"
#include "spherefield/errors.hpp"
#include "spherefield/legendre.hpp"

namespace spherefield::cli {
namespace {

using nlohmann::json;

std::string trim(const std::string& s) {
  const auto b = s.find_first_not_of(" \t\r");
  if (b == std::string::npos) return "";
  const auto e = s.find_last_not_of(" \t\r");
  return s.substr(b, e - b + 1);
}

std::vector<std::string> split(const std::string& s, char sep) {
  std::vector<std::string> out;
  std::stringstream in(s);
  std::string item;
  while (std::getline(in, item, sep)) {
    item = trim(item);
    if (!item.empty()) out.push_back(item);
  }
  return out;
}

// Shortest text that parses back to the same double.
std::string fmt(double v) {
  std::ostringstream o;
  o << std::setprecision(17) << v;
  return o.str();
}

template <class T>
T parse_number(const std::string& key, const std::string& v) {
  std::istringstream in(v);
  T out{};
  in >> out;
  if (in.fail() || !in.eof()) throw DomainError("config key '" + key + "': cannot parse '" + v + "'");
  return out;
}

}  // namespace

ValidationError::ValidationError(std::vector<std::string> violations)
    : std::invalid_argument([&] {
        std::string msg = "manifest validation failed:";
        for (const auto& v : violations) msg += " " + v + ";";
        return msg;
      }()),
      violations_(std::move(violations)) {}

const std::vector<std::string>& known_commands() {
  static const std::vector<std::string> cmds{"simulate",  "covariance", "smallball", "sln-check",
                                             "chung",     "covering",   "volume",    "lemmas"};
  return cmds;
}

json to_json(const ExperimentManifest& m) {
  json j;
  j["schema_version"] = m.schema_version;
  j["command"] = m.command;
  j["params"] = {{"alpha", m.alpha}, {"beta", m.beta}, {"c0", m.c0}, {"c1", m.c1}, {"g_profile", m.g_profile}};
  j["r"] = m.r;
  j["eps_hi"] = m.eps_hi;
  j["eps_lo"] = m.eps_lo;
  j["eps_count"] = m.eps_count;
  j["n_samples"] = m.n_samples;
  j["mesh_space"] = m.mesh_space;
  j["mesh_time"] = m.mesh_time;
  j["seeds"] = m.seeds;
  j["tol"] = m.tol;
  j["ell_max"] = m.ell_max;
  j["times"] = m.times;
  j["sphere_points"] = m.sphere_points;
  j["backend"] = m.backend;
  j["n_configs"] = m.n_configs;
  j["max_points"] = m.max_points;
  j["max_lag"] = m.max_lag;
  j["theta_min"] = m.theta_min;
  j["theta_max"] = m.theta_max;
  j["t_lag"] = m.t_lag;
  j["ladder_base"] = m.ladder_base;
  j["n_levels"] = m.n_levels;
  j["n_probe"] = m.n_probe;
  j["output_dir"] = m.output_dir;
  return j;
}

ExperimentManifest manifest_from_json(const json& j) {
  if (!j.is_object()) throw DomainError("manifest must be a JSON object");
  ExperimentManifest m;
  auto get = [&](const json& obj, const char* key, auto& field) {
    if (obj.contains(key)) {
      try {
        obj.at(key).get_to(field);
      } catch (const json::exception& e) {
        throw DomainError(std::string("manifest key '") + key + "': " + e.what());
      }
    }
  };
  get(j, "schema_version", m.schema_version);
  get(j, "command", m.command);
  const json params = j.contains("params") ? j.at("params") : json::object();
  get(params, "alpha", m.alpha);
  get(params, "beta", m.beta);
  get(params, "c0", m.c0);
  get(params, "c1", m.c1);
  get(params, "g_profile", m.g_profile);
  get(j, "r", m.r);
  get(j, "eps_hi", m.eps_hi);
  get(j, "eps_lo", m.eps_lo);
  get(j, "eps_count", m.eps_count);
  get(j, "n_samples", m.n_samples);
  get(j, "mesh_space", m.mesh_space);
  get(j, "mesh_time", m.mesh_time);
  get(j, "seeds", m.seeds);
  get(j, "tol", m.tol);
  get(j, "ell_max", m.ell_max);
  get(j, "times", m.times);
  get(j, "sphere_points", m.sphere_points);
  get(j, "backend", m.backend);
  get(j, "n_configs", m.n_configs);
  get(j, "max_points", m.max_points);
  get(j, "max_lag", m.max_lag);
  get(j, "theta_min", m.theta_min);
  get(j, "theta_max", m.theta_max);
  get(j, "t_lag", m.t_lag);
  get(j, "ladder_base", m.ladder_base);
  get(j, "n_levels", m.n_levels);
  get(j, "n_probe", m.n_probe);
  get(j, "output_dir", m.output_dir);
  return m;
}

std::string to_key_value(const ExperimentManifest& m) {
  std::ostringstream o;
  auto list = [](const auto& v) {
    std::ostringstream s;
    for (std::size_t i = 0; i < v.size(); ++i) {
      if (i) s << ",";
      if constexpr (std::is_floating_point_v<std::decay_t<decltype(v[i])>>) s << fmt(v[i]);
      else s << v[i];
    }
    return s.str();
  };
  o << "schema_version = " << m.schema_version << "\n"
    << "command = " << m.command << "\n"
    << "alpha = " << fmt(m.alpha) << "\n"
    << "beta = " << fmt(m.beta) << "\n"
    << "c0 = " << fmt(m.c0) << "\n"
    << "c1 = " << fmt(m.c1) << "\n"
    << "g_profile = " << m.g_profile << "\n"
    << "r = " << fmt(m.r) << "\n"
    << "eps_hi = " << fmt(m.eps_hi) << "\n"
    << "eps_lo = " << fmt(m.eps_lo) << "\n"
    << "eps_count = " << m.eps_count << "\n"
    << "n_samples = " << m.n_samples << "\n"
    << "mesh = " << m.mesh_space << "x" << m.mesh_time << "\n"
    << "seeds = " << list(m.seeds) << "\n"
    << "tol = " << fmt(m.tol) << "\n"
    << "ell_max = " << m.ell_max << "\n"
    << "times = " << list(m.times) << "\n"
    << "sphere_points = " << m.sphere_points << "\n"
    << "backend = " << m.backend << "\n"
    << "n_configs = " << m.n_configs << "\n"
    << "max_points = " << m.max_points << "\n"
    << "max_lag = " << fmt(m.max_lag) << "\n"
    << "theta_min = " << fmt(m.theta_min) << "\n"
    << "theta_max = " << fmt(m.theta_max) << "\n"
    << "t_lag = " << fmt(m.t_lag) << "\n"
    << "ladder_base = " << fmt(m.ladder_base) << "\n"
    << "n_levels = " << m.n_levels << "\n"
    << "n_probe = " << m.n_probe << "\n"
    << "output_dir = " << m.output_dir << "\n";
  return o.str();
}

ExperimentManifest manifest_from_key_value(const std::string& text) {
  ExperimentManifest m;
  std::istringstream in(text);
  std::string line;
  int lineno = 0;
  while (std::getline(in, line)) {
    ++lineno;
    const auto hash = line.find('#');
    if (hash != std::string::npos) line.erase(hash);
    line = trim(line);
    if (line.empty()) continue;
    const auto eq = line.find('=');
    if (eq == std::string::npos) {
      throw DomainError("config line " + std::to_string(lineno) + ": expected key = value");
    }
    const std::string key = trim(line.substr(0, eq));
    const std::string v = trim(line.substr(eq + 1));
    auto num = [&](auto& field) { field = parse_number<std::decay_t<decltype(field)>>(key, v); };
    if (key == "schema_version") num(m.schema_version);
    else if (key == "command") m.command = v;
    else if (key == "alpha") num(m.alpha);
    else if (key == "beta") num(m.beta);
    else if (key == "c0") num(m.c0);
    else if (key == "c1") num(m.c1);
    else if (key == "g_profile") m.g_profile = v;
    else if (key == "r") num(m.r);
    else if (key == "eps_hi") num(m.eps_hi);
    else if (key == "eps_lo") num(m.eps_lo);
    else if (key == "eps_count") num(m.eps_count);
    else if (key == "n_samples") num(m.n_samples);
    else if (key == "mesh") {
      const auto x = v.find('x');
      if (x == std::string::npos) throw DomainError("config key 'mesh': expected <space>x<time>");
      m.mesh_space = parse_number<int>(key, trim(v.substr(0, x)));
      m.mesh_time = parse_number<int>(key, trim(v.substr(x + 1)));
    } else if (key == "seeds") {
      m.seeds.clear();
      for (const auto& s : split(v, ',')) m.seeds.push_back(parse_number<std::uint64_t>(key, s));
    } else if (key == "tol") num(m.tol);
    else if (key == "ell_max") num(m.ell_max);
    else if (key == "times") {
      m.times.clear();
      for (const auto& s : split(v, ',')) m.times.push_back(parse_number<double>(key, s));
    } else if (key == "sphere_points") num(m.sphere_points);
    else if (key == "backend") m.backend = v;
    else if (key == "n_configs") num(m.n_configs);
    else if (key == "max_points") num(m.max_points);
    else if (key == "max_lag") num(m.max_lag);
    else if (key == "theta_min") num(m.theta_min);
    else if (key == "theta_max") num(m.theta_max);
    else if (key == "t_lag") num(m.t_lag);
    else if (key == "ladder_base") num(m.ladder_base);
    else if (key == "n_levels") num(m.n_levels);
    else if (key == "n_probe") num(m.n_probe);
    else if (key == "output_dir") m.output_dir = v;
    else throw DomainError("config line " + std::to_string(lineno) + ": unknown key '" + key + "'");
  }
  return m;
}

ExperimentManifest load_manifest(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) throw IoError("cannot open config " + path.string());
  std::stringstream buf;
  buf << in.rdbuf();
  if (path.extension() == ".json") {
    json j;
    try {
      j = json::parse(buf.str());
    } catch (const json::parse_error& e) {
      throw DomainError("config " + path.string() + ": " + e.what());
    }
    return manifest_from_json(j);
  }
  return manifest_from_key_value(buf.str());
}

std::vector<std::string> validate(const ExperimentManifest& m) {
  std::vector<std::string> v;
  if (m.schema_version != kSchemaVersion) v.emplace_back("unsupported schema_version");
  const auto& cmds = known_commands();
  if (std::find(cmds.begin(), cmds.end(), m.command) == cmds.end()) v.emplace_back("unknown command '" + m.command + "'");

  SpectrumParams p;
  p.alpha = m.alpha;
  p.beta = m.beta;
  p.c0 = m.c0;
  p.c1 = m.c1;
  try {
    p.g_profile = load_g_profile(m.g_profile);
  } catch (const std::exception& e) {
    v.emplace_back(std::string("g_profile: ") + e.what());
  }
  for (auto& s : p.violations()) v.push_back(std::move(s));

  if (m.times.empty()) {
    v.emplace_back("times is empty");
  } else {
    const auto [lo, hi] = std::minmax_element(m.times.begin(), m.times.end());
    if (!(*hi - *lo < 1.0)) v.emplace_back("window ≥ 1");
    for (std::size_t i = 1; i < m.times.size(); ++i) {
      if (!(m.times[i] > m.times[i - 1])) {
        v.emplace_back("times must increase strictly");
        break;
      }
    }
  }
  if (!(m.r > 0.0 && m.r <= 0.5)) v.emplace_back("r out of (0,0.5]");
  if (!(m.eps_hi > m.eps_lo && m.eps_lo > 0.0) || m.eps_count < 2) {
    v.emplace_back("eps ladder needs eps_hi > eps_lo > 0 and eps_count >= 2");
  }
  if (m.n_samples < 1) v.emplace_back("n_samples < 1");
  if (m.mesh_space < 1 || m.mesh_time < 1) v.emplace_back("mesh resolution < 1");
  if (m.seeds.empty()) v.emplace_back("no seeds");
  if (!(m.tol > 0.0)) v.emplace_back("tol <= 0");
  if (m.ell_max < 0 || m.ell_max > kMaxDegree) v.emplace_back("ell_max out of [0, 10000]");
  if (m.sphere_points < 1) v.emplace_back("sphere_points < 1");
  if (m.backend != "kl" && m.backend != "direct") v.emplace_back("backend must be kl or direct");
  if (m.n_configs < 1 || m.max_points < 1) v.emplace_back("sln sweep needs n_configs >= 1 and max_points >= 1");
  if (!(m.max_lag >= 0.0 && m.max_lag < 0.5)) v.emplace_back("max_lag out of [0,0.5)");
  if (!(m.theta_min > 0.0 && m.theta_min < m.theta_max && m.theta_max <= 0.3)) {
    v.emplace_back("sln regime needs 0 < theta_min < theta_max <= 0.3");
  }
  if (!(std::abs(m.t_lag) < 1.0)) v.emplace_back("t_lag outside (-1,1)");
  if (!(m.ladder_base > 1.0)) v.emplace_back("ladder_base <= 1");
  if (m.n_levels < 1) v.emplace_back("n_levels < 1");
  else if (m.ladder_base > 1.0) {
    int offset = 0;
    while (std::pow(m.ladder_base, -(1.0 + offset)) > 0.3) ++offset;
    if (std::pow(m.ladder_base, -(m.n_levels + offset)) < 1e-3) v.emplace_back("ladder radii fall below 1e-3");
  }
  if (m.n_probe < 1) v.emplace_back("n_probe < 1");
  if (m.output_dir.empty()) v.emplace_back("output_dir is empty");
  return v;
}

GProfile load_g_profile(const std::string& source) {
  if (source == "const:1") return GProfile::constant_one();
  std::ifstream in(source);
  if (!in) throw IoError("cannot open g_profile table " + source);
  std::vector<double> values;
  std::string line;
  while (std::getline(in, line)) {
    line = trim(line);
    if (line.empty() || line[0] == '#') continue;
    const auto cols = split(line, ',');
    if (cols.size() != 2) throw DomainError("g_profile table: expected two columns l,G");
    int ell = 0;
    try {
      ell = std::stoi(cols[0]);
    } catch (const std::exception&) {
      if (values.empty()) continue;  // header row
      throw DomainError("g_profile table: bad degree '" + cols[0] + "'");
    }
    if (ell != static_cast<int>(values.size()) + 1) throw DomainError("g_profile table: degrees must run 1, 2, 3, ...");
    values.push_back(parse_number<double>("g_profile", cols[1]));
  }
  return GProfile::tabulated(std::move(values));
}

SpectrumParams spectrum_of(const ExperimentManifest& m) {
  return SpectrumParams::make(m.alpha, m.beta, m.c0, m.c1, load_g_profile(m.g_profile));
}

std::string manifest_hash(const ExperimentManifest& m) {
  json j = to_json(m);
  j.erase("output_dir");  // where results land does not change them
  const std::string text = j.dump();
  std::uint64_t h = 0xcbf29ce484222325ull;
  for (unsigned char c : text) {
    h ^= c;
    h *= 0x100000001b3ull;
  }
  std::ostringstream o;
  o << std::hex << std::setw(16) << std::setfill('0') << h;
  return o.str();
}

ExperimentManifest single_seed(const ExperimentManifest& m, std::uint64_t seed) {
  ExperimentManifest out = m;
  out.seeds = {seed};
  return out;
}

}  // namespace spherefield::cli
