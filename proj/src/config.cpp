#include "lsvr/config.hpp"

#include <charconv>
#include <cmath>
#include <fstream>
#include <limits>
#include <sstream>

namespace lsvr {

namespace {

std::string trim(const std::string& s) {
  const auto b = s.find_first_not_of(" \t\r");
  if (b == std::string::npos) return {};
  const auto e = s.find_last_not_of(" \t\r");
  return s.substr(b, e - b + 1);
}

std::optional<double> parse_double(const std::string& s) {
  double v = 0.0;
  const auto* end = s.data() + s.size();
  const auto [ptr, ec] = std::from_chars(s.data(), end, v);
  if (ec != std::errc() || ptr != end || !std::isfinite(v)) return std::nullopt;
  return v;
}

// Integers may be written as 4e6; they must be exact.
std::optional<std::int64_t> parse_int(const std::string& s) {
  const auto v = parse_double(s);
  if (!v || *v != std::floor(*v) || std::abs(*v) > 9.0e15) return std::nullopt;
  return static_cast<std::int64_t>(*v);
}

std::optional<Mode> parse_mode(const std::string& s) {
  for (Mode m : {Mode::density, Mode::response, Mode::validate, Mode::diagnose})
    if (s == to_string(m)) return m;
  return std::nullopt;
}

std::string normalize_key(std::string k) {
  for (auto& c : k)
    if (c == '-') c = '_';
  return k;
}

}  // namespace

std::string to_string(Mode m) {
  switch (m) {
    case Mode::density: return "density";
    case Mode::response: return "response";
    case Mode::validate: return "validate";
    case Mode::diagnose: return "diagnose";
  }
  return "?";
}

std::string format_double(double v) {
  char buf[32];
  const auto [ptr, ec] = std::to_chars(buf, buf + sizeof buf, v);
  return std::string(buf, ptr);
}

const std::vector<std::string>& config_keys() {
  static const std::vector<std::string> keys{
      "alpha",        "gamma",           "cheb",
      "tail_tol",     "max_branches",    "grid_min_exp",
      "grid_per_octave", "grid_delta_points", "eps",
      "ulam_bins",    "mode",            "out_dir"};
  return keys;
}

double RunConfig::resolved_gamma() const {
  return gamma ? *gamma : default_gamma(alpha);
}

MapParams RunConfig::params() const {
  MapParams p;
  p.alpha = alpha;
  p.gamma = resolved_gamma();
  p.branch_tail_tol = tail_tol;
  p.max_branches = max_branches;
  return p;
}

std::vector<std::string> RunConfig::violations() const {
  const MapParams p = params();
  auto out = p.violations();
  if (mode != Mode::diagnose && out.empty()) {
    auto w = p.weight_violations();
    out.insert(out.end(), w.begin(), w.end());
  }
  if (cheb < 4 || cheb > 1024) out.emplace_back("cheb must be in [4, 1024]");
  if (grid_min_exp < 2 || grid_min_exp > 1000)
    out.emplace_back("grid_min_exp must be in [2, 1000]");
  if (grid_per_octave < 1 || grid_per_octave > 64)
    out.emplace_back("grid_per_octave must be in [1, 64]");
  if (grid_delta_points < 12 || grid_delta_points > 100000)
    out.emplace_back("grid_delta_points must be in [12, 100000]");
  if (ulam_bins < 2 || ulam_bins > (1 << 20) || (ulam_bins & (ulam_bins - 1)))
    out.emplace_back("ulam_bins must be a power of two in [2, 2^20]");
  if (eps.empty()) out.emplace_back("eps must list at least one step");
  for (std::size_t k = 0; k < eps.size(); ++k) {
    if (!(eps[k] > 0.0)) {
      out.emplace_back("eps entries must be > 0");
      break;
    }
    if (k > 0 && !(eps[k] < eps[k - 1])) {
      out.emplace_back("eps must be strictly decreasing");
      break;
    }
  }
  if (mode == Mode::validate && !eps.empty() && !(alpha - eps.front() > 0.0))
    out.emplace_back("validate mode needs alpha - eps > 0 for every eps");
  if (mode == Mode::diagnose && max_branches < 16)
    out.emplace_back("diagnose mode needs max_branches >= 16");
  return out;
}

Settings read_config_file(const std::string& path,
                          std::vector<std::string>& errors) {
  Settings s;
  std::ifstream in(path);
  if (!in) {
    errors.push_back("cannot read config file " + path);
    return s;
  }
  std::string line;
  for (int lineno = 1; std::getline(in, line); ++lineno) {
    if (const auto hash = line.find('#'); hash != std::string::npos)
      line.resize(hash);
    line = trim(line);
    if (line.empty()) continue;
    const auto eq = line.find('=');
    const std::string where = path + ":" + std::to_string(lineno) + ": ";
    if (eq == std::string::npos) {
      errors.push_back(where + "expected key = value");
      continue;
    }
    const std::string key = normalize_key(trim(line.substr(0, eq)));
    if (s.count(key)) errors.push_back(where + "duplicate key " + key);
    s[key] = trim(line.substr(eq + 1));
  }
  return s;
}

RunConfig apply_settings(RunConfig cfg, const Settings& settings,
                         std::vector<std::string>& errors) {
  for (const auto& [raw_key, value] : settings) {
    const std::string key = normalize_key(raw_key);
    auto bad = [&] {
      errors.push_back("invalid value for " + key + ": '" + value + "'");
    };
    auto set_double = [&](double& dst) {
      if (auto v = parse_double(value)) dst = *v; else bad();
    };
    auto set_int = [&](auto& dst) {
      using T = std::remove_reference_t<decltype(dst)>;
      const auto v = parse_int(value);
      if (v && *v >= std::numeric_limits<T>::min() &&
          *v <= std::numeric_limits<T>::max())
        dst = static_cast<T>(*v);
      else
        bad();
    };
    if (key == "alpha") {
      set_double(cfg.alpha);
    } else if (key == "gamma") {
      if (value == "auto") {
        cfg.gamma.reset();
      } else if (auto v = parse_double(value)) {
        cfg.gamma = *v;
      } else {
        bad();
      }
    } else if (key == "cheb") {
      set_int(cfg.cheb);
    } else if (key == "tail_tol") {
      set_double(cfg.tail_tol);
    } else if (key == "max_branches") {
      set_int(cfg.max_branches);
    } else if (key == "grid_min_exp") {
      set_int(cfg.grid_min_exp);
    } else if (key == "grid_per_octave") {
      set_int(cfg.grid_per_octave);
    } else if (key == "grid_delta_points") {
      set_int(cfg.grid_delta_points);
    } else if (key == "eps") {
      std::vector<double> list;
      std::stringstream ss(value);
      std::string item;
      bool ok = true;
      while (std::getline(ss, item, ',')) {
        if (auto v = parse_double(trim(item))) list.push_back(*v); else ok = false;
      }
      if (ok && !list.empty()) cfg.eps = list; else bad();
    } else if (key == "ulam_bins") {
      set_int(cfg.ulam_bins);
    } else if (key == "mode") {
      if (auto m = parse_mode(value)) cfg.mode = *m; else bad();
    } else if (key == "out_dir") {
      if (value.empty()) bad(); else cfg.out_dir = value;
    } else {
      errors.push_back("unknown config key: " + raw_key);
    }
  }
  return cfg;
}

RunConfig build_config(const std::optional<std::string>& config_path,
                       const Settings& flags) {
  std::vector<std::string> errors;
  Settings merged;
  if (config_path) merged = read_config_file(*config_path, errors);
  for (const auto& [k, v] : flags) merged[normalize_key(k)] = v;
  const RunConfig cfg = apply_settings(RunConfig{}, merged, errors);
  auto v = cfg.violations();
  errors.insert(errors.end(), v.begin(), v.end());
  if (!errors.empty()) {
    std::string msg;
    for (const auto& e : errors) msg += e + "\n";
    msg.pop_back();
    throw ConfigError(msg);
  }
  return cfg;
}

Settings to_settings(const RunConfig& cfg) {
  Settings s;
  s["alpha"] = format_double(cfg.alpha);
  s["gamma"] = cfg.gamma ? format_double(*cfg.gamma) : "auto";
  s["cheb"] = std::to_string(cfg.cheb);
  s["tail_tol"] = format_double(cfg.tail_tol);
  s["max_branches"] = std::to_string(cfg.max_branches);
  s["grid_min_exp"] = std::to_string(cfg.grid_min_exp);
  s["grid_per_octave"] = std::to_string(cfg.grid_per_octave);
  s["grid_delta_points"] = std::to_string(cfg.grid_delta_points);
  std::string eps;
  for (double e : cfg.eps) eps += (eps.empty() ? "" : ",") + format_double(e);
  s["eps"] = eps;
  s["ulam_bins"] = std::to_string(cfg.ulam_bins);
  s["mode"] = to_string(cfg.mode);
  s["out_dir"] = cfg.out_dir;
  return s;
}

}  // namespace lsvr
