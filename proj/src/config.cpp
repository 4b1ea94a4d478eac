#include "sdelab/config.hpp"

#include <charconv>
#include <cmath>
#include <fstream>
#include <numbers>
#include <string>

namespace sdelab {

namespace {

std::string trim(std::string_view s) {
  const auto b = s.find_first_not_of(" \t\n\r");
  if (b == std::string_view::npos) return {};
  const auto e = s.find_last_not_of(" \t\n\r");
  return std::string(s.substr(b, e - b + 1));
}

double parse_number(std::string_view s) {
  double x = 0.0;
  const auto* first = s.data();
  const auto* last = s.data() + s.size();
  if (!s.empty() && *first == '+') ++first;
  const auto [ptr, ec] = std::from_chars(first, last, x);
  if (ec != std::errc() || ptr != last) throw ConfigError("not a number: '" + std::string(s) + "'");
  return x;
}

// term := number | e | pi | e^number | exp(number)
double parse_term(std::string_view raw) {
  const std::string s = trim(raw);
  if (s.empty()) throw ConfigError("empty numeric term");
  double sign = 1.0;
  std::string_view body = s;
  if (body.front() == '-') {
    sign = -1.0;
    body.remove_prefix(1);
  }
  if (body == "e") return sign * std::numbers::e;
  if (body == "pi") return sign * std::numbers::pi;
  if (body.starts_with("e^")) return sign * std::exp(parse_number(trim(body.substr(2))));
  if (body.starts_with("exp(") && body.ends_with(")"))
    return sign * std::exp(parse_number(trim(body.substr(4, body.size() - 5))));
  return sign * parse_number(body);
}

template <class T>
T get_as(const nlohmann::json& v, const char* key) {
  try {
    return v.get<T>();
  } catch (const nlohmann::json::exception&) {
    throw ConfigError(std::string("config key '") + key + "' has the wrong type");
  }
}

double get_real(const nlohmann::json& v, const char* key) {
  if (v.is_string()) return parse_real(v.get<std::string>());
  return get_as<double>(v, key);
}

std::vector<double> get_reals(const nlohmann::json& v, const char* key) {
  if (v.is_string()) return parse_real_list(v.get<std::string>());
  if (!v.is_array()) throw ConfigError(std::string("config key '") + key + "' must be a list");
  std::vector<double> out;
  for (const auto& x : v) out.push_back(get_real(x, key));
  return out;
}

std::size_t get_count(const nlohmann::json& v, const char* key) {
  const double x = get_real(v, key);
  if (!(x >= 0.0) || x != std::floor(x)) throw ConfigError(std::string("config key '") + key + "' must be a count");
  return static_cast<std::size_t>(x);
}

}  // namespace

double parse_real(std::string_view text) {
  const std::string s = trim(text);
  const auto slash = s.find('/');
  if (slash == std::string::npos) return parse_term(s);
  return parse_term(std::string_view(s).substr(0, slash)) / parse_term(std::string_view(s).substr(slash + 1));
}

std::vector<double> parse_real_list(std::string_view text) {
  std::vector<double> out;
  std::size_t start = 0;
  while (start <= text.size()) {
    const auto comma = text.find(',', start);
    const auto piece = text.substr(start, comma == std::string_view::npos ? std::string_view::npos : comma - start);
    if (!trim(piece).empty()) out.push_back(parse_real(piece));
    if (comma == std::string_view::npos) break;
    start = comma + 1;
  }
  return out;
}

Scheme parse_scheme(std::string_view text) {
  if (text == "cascade") return Scheme::Cascade;
  if (text == "em" || text == "euler-maruyama") return Scheme::EulerMaruyama;
  throw ConfigError("unknown scheme '" + std::string(text) + "' (expected cascade or em)");
}

std::string_view scheme_name(Scheme s) { return s == Scheme::Cascade ? "cascade" : "em"; }

std::vector<double> eps_grid_from_exponents(double start_exponent, double stop_exponent, double per_unit) {
  if (!(per_unit > 0.0)) throw ConfigError("eps grid: per_decade must be positive");
  if (!(stop_exponent >= start_exponent)) throw ConfigError("eps grid: stop_exponent must not precede start_exponent");
  const auto count = static_cast<std::size_t>(std::floor((stop_exponent - start_exponent) * per_unit + 1e-9)) + 1;
  std::vector<double> out;
  for (std::size_t i = 0; i < count; ++i)
    out.push_back(std::exp(-(start_exponent + static_cast<double>(i) / per_unit)));
  return out;
}

std::size_t ExperimentConfig::steps() const {
  const double s = model.T / dt;
  const double r = std::round(s);
  if (!(dt > 0.0) || r < 1.0 || std::abs(s - r) > 1e-9 * r)
    throw ConfigError("dt must divide T into a whole number of steps");
  return static_cast<std::size_t>(r);
}

MonteCarloOptions ExperimentConfig::mc_options() const {
  MonteCarloOptions o;
  steps();
  o.dt = dt;
  o.scheme = scheme;
  o.taming = taming;
  o.threads = threads;
  return o;
}

void ExperimentConfig::validate() const {
  ModelParams copy = model;
  try {
    copy.validate();
  } catch (const InvalidArgument& e) {
    throw ConfigError(e.what());
  }
  steps();
  if (n_paths < 2) throw ConfigError("n_paths must be at least 2");
  if (threads < 1) throw ConfigError("threads must be at least 1");
  const double e_inv = std::exp(-1.0);
  for (double e : eps_grid)
    if (!(e > 0.0) || e > e_inv * (1.0 + 1e-14)) throw ConfigError("eps_grid values must lie in (0, 1/e]");
  if (!(q_upper > 0.0)) throw ConfigError("q_upper must be positive");
}

void apply_json(ExperimentConfig& cfg, const nlohmann::json& j) {
  if (!j.is_object()) throw ConfigError("config must be a JSON object");
  for (const auto& [key, value] : j.items()) {
    const char* k = key.c_str();
    if (key == "n") cfg.model.n = static_cast<int>(get_count(value, k));
    else if (key == "tau") cfg.model.tau = get_real(value, k);
    else if (key == "T") cfg.model.T = get_real(value, k);
    else if (key == "d") cfg.model.d = get_count(value, k);
    else if (key == "m") cfg.model.m = get_count(value, k);
    else if (key == "p") cfg.model.p = get_real(value, k);
    else if (key == "q") cfg.model.q = get_real(value, k);
    else if (key == "v") cfg.model.v = get_reals(value, k);
    else if (key == "delta") cfg.model.delta = get_reals(value, k);
    else if (key == "dt") cfg.dt = get_real(value, k);
    else if (key == "n_paths") cfg.n_paths = get_count(value, k);
    else if (key == "t_eval") cfg.t_eval = get_real(value, k);
    else if (key == "seed") cfg.seed = get_as<std::uint64_t>(value, k);
    else if (key == "output_dir") cfg.output_dir = get_as<std::string>(value, k);
    else if (key == "taming") cfg.taming = get_as<bool>(value, k);
    else if (key == "q_upper") cfg.q_upper = get_real(value, k);
    else if (key == "scheme") cfg.scheme = parse_scheme(get_as<std::string>(value, k));
    else if (key == "threads") cfg.threads = static_cast<unsigned>(get_count(value, k));
    else if (key == "eps_grid") {
      if (value.is_object()) {
        for (const auto& [gk, gv] : value.items())
          if (gk != "start_exponent" && gk != "stop_exponent" && gk != "per_decade")
            throw ConfigError("eps_grid: unknown key '" + gk + "'");
        cfg.eps_grid = eps_grid_from_exponents(get_real(value.at("start_exponent"), "start_exponent"),
                                               get_real(value.at("stop_exponent"), "stop_exponent"),
                                               value.contains("per_decade") ? get_real(value["per_decade"], "per_decade")
                                                                            : 1.0);
      } else {
        cfg.eps_grid = get_reals(value, k);
      }
    } else {
      throw ConfigError("unknown config key '" + key + "'");
    }
  }
}

ExperimentConfig load_config(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw ConfigError("cannot open config file '" + path + "'");
  nlohmann::json j;
  try {
    in >> j;
  } catch (const nlohmann::json::parse_error& e) {
    throw ConfigError("config file '" + path + "' is not valid JSON: " + e.what());
  }
  ExperimentConfig cfg;
  apply_json(cfg, j);
  return cfg;
}

}  // namespace sdelab
