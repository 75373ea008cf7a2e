#include "aaoreg/settings.hpp"

#include <algorithm>
#include <charconv>
#include <cmath>
#include <fstream>
#include <istream>
#include <tuple>

namespace aaoreg {

namespace {

const std::vector<std::string> kExperimentKeys = {
    "xi", "tau_sq", "seed", "n_interior", "noise_level", "truth_amplitude", "truth_linear", "manufactured_amplitude",
    "jobs", "record_timing", "output_dir"};

const std::vector<std::string> kSolverKeys = {
    "method", "reg_target", "rho", "alpha0", "alpha_decay", "alpha_rule", "sigma_lo", "sigma_hi",
    "mu_policy", "mu", "mu_refresh", "norm_iterations", "max_outer", "max_inner", "newton_tol", "max_newton",
    "state_norm", "trace_stride"};

bool contains(const std::vector<std::string>& v, const std::string& k) {
  return std::find(v.begin(), v.end(), k) != v.end();
}

std::string trim(const std::string& s) {
  const auto b = s.find_first_not_of(" \t\r");
  if (b == std::string::npos) return "";
  const auto e = s.find_last_not_of(" \t\r");
  return s.substr(b, e - b + 1);
}

std::string joined_keys() {
  std::string out;
  for (const auto& k : valid_setting_keys()) {
    if (!out.empty()) out += ", ";
    out += k;
  }
  return out;
}

double to_real(const std::string& key, const std::string& v) {
  double out = 0.0;
  const auto* end = v.data() + v.size();
  const auto [ptr, ec] = std::from_chars(v.data(), end, out);
  if (ec != std::errc() || ptr != end) throw SettingsError(key + ": expected a number, got '" + v + "'");
  return out;
}

std::uint64_t to_count(const std::string& key, const std::string& v) {
  // accept 1e5-style counts as long as they are integral
  const double d = to_real(key, v);
  if (!(d >= 0.0) || d != std::floor(d) || d > 1e15) {
    throw SettingsError(key + ": expected a non-negative integer, got '" + v + "'");
  }
  return static_cast<std::uint64_t>(d);
}

bool to_bool(const std::string& key, const std::string& v) {
  if (v == "true" || v == "1" || v == "yes" || v == "on") return true;
  if (v == "false" || v == "0" || v == "no" || v == "off") return false;
  throw SettingsError(key + ": expected true or false, got '" + v + "'");
}

std::vector<double> to_reals(const std::string& key, const std::string& v) {
  std::vector<double> out;
  std::size_t start = 0;
  while (start <= v.size()) {
    const auto comma = v.find(',', start);
    const std::string item = trim(v.substr(start, comma == std::string::npos ? std::string::npos : comma - start));
    if (item.empty()) throw SettingsError(key + ": empty entry in list '" + v + "'");
    out.push_back(to_real(key, item));
    if (comma == std::string::npos) break;
    start = comma + 1;
  }
  return out;
}

template <class E>
E choose(const std::string& key, const std::string& v, std::initializer_list<std::pair<const char*, E>> options) {
  std::string names;
  for (const auto& [name, value] : options) {
    if (v == name) return value;
    names += names.empty() ? name : std::string("|") + name;
  }
  throw SettingsError(key + ": expected one of " + names + ", got '" + v + "'");
}

Paradigm parse_paradigm(const std::string& v) {
  return choose<Paradigm>("method", v,
                          {{"irgnm", Paradigm::irgnm}, {"landweber", Paradigm::landweber},
                           {"tikhonov", Paradigm::tikhonov}});
}

void apply_solver_key(const std::string& k, const std::string& v, SolverConfig& cfg) {
  if (k == "reg_target") {
    cfg.reg_target = choose<RegTarget>(k, v, {{"x_only", RegTarget::x_only}, {"x_and_u", RegTarget::x_and_u}});
  } else if (k == "rho") {
    cfg.rho = to_real(k, v);
  } else if (k == "alpha0") {
    cfg.alpha0 = to_real(k, v);
  } else if (k == "alpha_decay") {
    cfg.alpha_decay = to_real(k, v);
  } else if (k == "alpha_rule") {
    cfg.alpha_rule = choose<AlphaRule>(k, v, {{"a_priori", AlphaRule::a_priori}, {"sigma", AlphaRule::sigma_rule}});
  } else if (k == "sigma_lo") {
    cfg.sigma_lo = to_real(k, v);
  } else if (k == "sigma_hi") {
    cfg.sigma_hi = to_real(k, v);
  } else if (k == "mu_policy") {
    cfg.mu_policy = choose<MuPolicy>(k, v, {{"fixed", MuPolicy::fixed}, {"safeguarded", MuPolicy::safeguarded}});
  } else if (k == "mu") {
    cfg.mu = to_real(k, v);
  } else if (k == "mu_refresh") {
    cfg.mu_refresh = to_count(k, v);
  } else if (k == "norm_iterations") {
    cfg.norm_iterations = to_count(k, v);
  } else if (k == "max_outer") {
    cfg.max_outer = to_count(k, v);
  } else if (k == "max_inner") {
    cfg.max_inner = to_count(k, v);
  } else if (k == "newton_tol") {
    cfg.newton_tol = to_real(k, v);
  } else if (k == "max_newton") {
    cfg.max_newton = to_count(k, v);
  } else if (k == "state_norm") {
    cfg.state_norm = choose<StateNorm>(k, v, {{"l2", StateNorm::l2}, {"h2", StateNorm::h2}});
  } else if (k == "trace_stride") {
    cfg.trace_stride = to_count(k, v);
  }
}

void validated(const SolverConfig& cfg) {
  try {
    cfg.validate();
  } catch (const std::invalid_argument& e) {
    throw SettingsError(e.what());
  }
}

}  // namespace

const std::vector<std::string>& valid_setting_keys() {
  static const std::vector<std::string> keys = [] {
    std::vector<std::string> all = kExperimentKeys;
    all.insert(all.end(), kSolverKeys.begin(), kSolverKeys.end());
    return all;
  }();
  return keys;
}

void Settings::set(const std::string& key, const std::string& value) {
  if (!contains(valid_setting_keys(), key)) {
    throw SettingsError("unknown key '" + key + "'; valid keys: " + joined_keys());
  }
  entries_.emplace_back(key, value);
}

std::optional<std::string> Settings::get(const std::string& key) const {
  for (auto it = entries_.rbegin(); it != entries_.rend(); ++it) {
    if (it->first == key) return it->second;
  }
  return std::nullopt;
}

void Settings::merge(const Settings& other) {
  entries_.insert(entries_.end(), other.entries_.begin(), other.entries_.end());
}

Settings parse_settings(std::istream& in, const std::string& source) {
  Settings out;
  std::string line;
  for (std::size_t lineno = 1; std::getline(in, line); ++lineno) {
    const auto hash = line.find('#');
    if (hash != std::string::npos) line.erase(hash);
    line = trim(line);
    if (line.empty()) continue;
    const auto eq = line.find('=');
    if (eq == std::string::npos) {
      throw SettingsError(source + ":" + std::to_string(lineno) + ": expected 'key = value'");
    }
    const std::string key = trim(line.substr(0, eq));
    const std::string value = trim(line.substr(eq + 1));
    if (key.empty() || value.empty()) {
      throw SettingsError(source + ":" + std::to_string(lineno) + ": empty key or value");
    }
    try {
      out.set(key, value);
    } catch (const SettingsError& e) {
      throw SettingsError(source + ":" + std::to_string(lineno) + ": " + e.what());
    }
  }
  return out;
}

Settings parse_settings_file(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) throw SettingsError("cannot open config file '" + path.string() + "'");
  return parse_settings(in, path.string());
}

std::pair<Paradigm, Formulation> parse_method(const std::string& name) {
  const auto dash = name.rfind('-');
  if (dash == std::string::npos) {
    throw SettingsError("method: expected <irgnm|landweber|tikhonov>-<aao|reduced>, got '" + name + "'");
  }
  const Paradigm p = parse_paradigm(name.substr(0, dash));
  const Formulation f = choose<Formulation>("method", name.substr(dash + 1),
                                            {{"aao", Formulation::aao}, {"reduced", Formulation::reduced},
                                             {"red", Formulation::reduced}});
  return {p, f};
}

void apply_settings(const Settings& s, SolverConfig& cfg) {
  for (const auto& [k, v] : s.entries()) {
    if (k == "method") {
      std::tie(cfg.paradigm, cfg.formulation) = parse_method(v);
    } else if (contains(kSolverKeys, k)) {
      apply_solver_key(k, v, cfg);
    } else if (k == "tau_sq") {
      const auto values = to_reals(k, v);
      if (values.size() != 1) throw SettingsError("tau_sq: a single run takes one value");
      cfg.tau_sq = values.front();
    }
  }
  validated(cfg);
}

void apply_settings(const Settings& s, ExperimentSpec& spec) {
  const std::vector<double> old_xis = spec.xis;
  const ExperimentSpec before = spec;
  for (const auto& [k, v] : s.entries()) {
    if (k == "xi") {
      spec.xis = to_reals(k, v);
    } else if (k == "tau_sq") {
      spec.tau_sqs = to_reals(k, v);
    } else if (k == "seed") {
      spec.seed = to_count(k, v);
    } else if (k == "n_interior") {
      spec.n_interior = to_count(k, v);
    } else if (k == "noise_level") {
      spec.noise_level = to_real(k, v);
    } else if (k == "truth_amplitude") {
      spec.truth.amplitude = to_real(k, v);
    } else if (k == "truth_linear") {
      spec.truth.linear = to_real(k, v);
    } else if (k == "manufactured_amplitude") {
      spec.truth.manufactured_amplitude = to_real(k, v);
    } else if (k == "jobs") {
      spec.jobs = to_count(k, v);
    } else if (k == "record_timing") {
      spec.record_timing = to_bool(k, v);
    } else if (k == "method") {
      const Paradigm p = parse_paradigm(v);
      for (auto& cfg : spec.solver_matrix) cfg.paradigm = p;
    } else if (contains(kSolverKeys, k)) {
      for (auto& cfg : spec.solver_matrix) apply_solver_key(k, v, cfg);
    }
  }
  // New xi list without new tau_sq: keep each known xi's tau_sq, default the rest.
  if (s.get("xi") && !s.get("tau_sq") && before.tau_sqs.size() != 1) {
    spec.tau_sqs.clear();
    for (double xi : spec.xis) {
      const auto it = std::find(old_xis.begin(), old_xis.end(), xi);
      spec.tau_sqs.push_back(it == old_xis.end() ? SolverConfig{}.tau_sq
                                                 : before.tau_sq_for(static_cast<std::size_t>(it - old_xis.begin())));
    }
  }
  if (spec.tau_sqs.size() != 1 && spec.tau_sqs.size() != spec.xis.size()) {
    throw SettingsError("tau_sq: give one value or one per xi (" + std::to_string(spec.xis.size()) + ")");
  }
  try {
    spec.validate();
  } catch (const std::invalid_argument& e) {
    throw SettingsError(e.what());
  }
}

}  // namespace aaoreg
