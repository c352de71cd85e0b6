#include "cli/config.hpp"

#include <nsnpeak/io.hpp>

#include <charconv>
#include <cmath>
#include <fstream>

namespace nsnpeak::cli {

namespace {

std::string trim(const std::string& s) {
  const auto b = s.find_first_not_of(" \t\r");
  if (b == std::string::npos) {
    return {};
  }
  const auto e = s.find_last_not_of(" \t\r");
  return s.substr(b, e - b + 1);
}

double parse_double(const std::string& key, const std::string& text) {
  const std::string v = trim(text);
  double out = 0.0;
  const auto res = std::from_chars(v.data(), v.data() + v.size(), out);
  if (res.ec != std::errc{} || res.ptr != v.data() + v.size()) {
    throw ValidationError(key + ": expected a number, got '" + text + "'");
  }
  return out;
}

std::uint64_t parse_unsigned(const std::string& key, const std::string& text) {
  const std::string v = trim(text);
  std::uint64_t out = 0;
  const auto res = std::from_chars(v.data(), v.data() + v.size(), out);
  if (res.ec != std::errc{} || res.ptr != v.data() + v.size()) {
    throw ValidationError(key + ": expected a non-negative integer, got '" +
                          text + "'");
  }
  return out;
}

void require(bool ok, const std::string& what) {
  if (!ok) {
    throw ValidationError(what);
  }
}

} // namespace

std::vector<double> parse_number_list(const std::string& list) {
  std::vector<double> out;
  std::size_t pos = 0;
  while (pos <= list.size()) {
    const auto comma = list.find(',', pos);
    const std::string item =
        trim(list.substr(pos, comma == std::string::npos ? std::string::npos
                                                         : comma - pos));
    if (item.empty()) {
      throw ValidationError("empty item in number list '" + list + "'");
    }
    out.push_back(parse_double("list", item));
    if (comma == std::string::npos) {
      break;
    }
    pos = comma + 1;
  }
  return out;
}

OutputFormats parse_formats(const std::string& list) {
  OutputFormats f{false, false, false};
  std::size_t pos = 0;
  while (pos <= list.size()) {
    const auto comma = list.find(',', pos);
    const std::string item =
        trim(list.substr(pos, comma == std::string::npos ? std::string::npos
                                                         : comma - pos));
    if (item == "csv") {
      f.csv = true;
    } else if (item == "json") {
      f.json = true;
    } else if (item == "svg") {
      f.svg = true;
    } else if (!item.empty()) {
      throw ValidationError("format: unknown output format '" + item + "'");
    }
    if (comma == std::string::npos) {
      break;
    }
    pos = comma + 1;
  }
  return f;
}

void RunConfig::validate() const {
  params.validate();
  init.validate();
  integrator.validate();
  require(std::isfinite(q) && q >= 0.0, "q: budget must be finite and >= 0");
  require(policy == "nsn" || policy == "zero" || policy == "morris" ||
              policy == "constant",
          "policy: expected one of nsn, zero, morris, constant");
  require(constant_u >= 0.0 && constant_u <= 1.0, "u: must be in [0, 1]");
  require(duration > 0.0, "duration: must be > 0");
  require(q_min >= 0.0 && q_min < q_max, "q_min/q_max: need 0 <= q_min < q_max");
  require(n_points >= 2, "n_points: need at least 2");
  for (double d : deviations) {
    require(d > -1.0, "deviations: each deviation must be > -100%");
  }
  require(trials >= 1, "trials: need at least 1");
  for (std::size_t k = 0; k < durations.size(); ++k) {
    require(durations[k] > 0.0 && (k == 0 || durations[k] > durations[k - 1]),
            "durations: must be positive and increasing");
  }
}

void apply_setting(RunConfig& cfg, const std::string& raw_key,
                   const std::string& value) {
  const std::string key = trim(raw_key);
  if (key == "beta") {
    cfg.params.beta = parse_double(key, value);
  } else if (key == "gamma") {
    cfg.params.gamma = parse_double(key, value);
  } else if (key == "s0") {
    cfg.init.s0 = parse_double(key, value);
  } else if (key == "i0") {
    cfg.init.i0 = parse_double(key, value);
  } else if (key == "q") {
    cfg.q = parse_double(key, value);
  } else if (key == "seed") {
    cfg.seed = parse_unsigned(key, value);
  } else if (key == "out") {
    cfg.out_dir = trim(value);
  } else if (key == "format") {
    cfg.formats = parse_formats(value);
  } else if (key == "step") {
    cfg.integrator.step = parse_double(key, value);
  } else if (key == "event_tol") {
    cfg.integrator.event_tol = parse_double(key, value);
  } else if (key == "i_extinction") {
    cfg.integrator.i_extinction = parse_double(key, value);
  } else if (key == "t_max") {
    cfg.integrator.t_max = parse_double(key, value);
  } else if (key == "t_stop") {
    cfg.integrator.t_stop = parse_double(key, value);
  } else if (key == "policy") {
    cfg.policy = trim(value);
  } else if (key == "level") {
    cfg.level = parse_double(key, value);
  } else if (key == "u") {
    cfg.constant_u = parse_double(key, value);
  } else if (key == "duration") {
    cfg.duration = parse_double(key, value);
  } else if (key == "q_min") {
    cfg.q_min = parse_double(key, value);
  } else if (key == "q_max") {
    cfg.q_max = parse_double(key, value);
  } else if (key == "n_points") {
    cfg.n_points = static_cast<int>(parse_unsigned(key, value));
  } else if (key == "scale") {
    const std::string v = trim(value);
    require(v == "log" || v == "linear", "scale: expected log or linear");
    cfg.log_q = v == "log";
  } else if (key == "deviations") {
    cfg.deviations = parse_number_list(value);
  } else if (key == "trials") {
    cfg.trials = parse_unsigned(key, value);
  } else if (key == "durations") {
    cfg.durations = parse_number_list(value);
  } else {
    throw ValidationError("unknown configuration key '" + key + "'");
  }
}

void load_config_file(RunConfig& cfg, const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) {
    throw IoError("cannot read config file '" + path.string() + "'");
  }
  std::string line;
  int line_no = 0;
  while (std::getline(in, line)) {
    ++line_no;
    if (const auto hash = line.find('#'); hash != std::string::npos) {
      line.erase(hash);
    }
    if (trim(line).empty()) {
      continue;
    }
    const auto eq = line.find('=');
    if (eq == std::string::npos) {
      throw ValidationError(path.string() + ":" + std::to_string(line_no) +
                            ": expected key = value");
    }
    apply_setting(cfg, line.substr(0, eq), line.substr(eq + 1));
  }
}

nlohmann::json config_to_json(const RunConfig& cfg) {
  nlohmann::json formats = nlohmann::json::array();
  if (cfg.formats.csv) formats.push_back("csv");
  if (cfg.formats.json) formats.push_back("json");
  if (cfg.formats.svg) formats.push_back("svg");
  nlohmann::json j = {
      {"beta", cfg.params.beta},
      {"gamma", cfg.params.gamma},
      {"s0", cfg.init.s0},
      {"i0", cfg.init.i0},
      {"q", cfg.q},
      {"seed", cfg.seed},
      {"format", formats},
      {"step", cfg.integrator.step},
      {"event_tol", cfg.integrator.event_tol},
      {"i_extinction", cfg.integrator.i_extinction},
      {"t_max", cfg.integrator.t_max},
      {"policy", cfg.policy},
      {"u", cfg.constant_u},
      {"duration", cfg.duration},
      {"q_min", cfg.q_min},
      {"q_max", cfg.q_max},
      {"n_points", cfg.n_points},
      {"scale", cfg.log_q ? "log" : "linear"},
      {"deviations", cfg.deviations},
      {"trials", cfg.trials},
      {"durations", cfg.durations},
  };
  if (cfg.level) {
    j["level"] = *cfg.level;
  }
  if (cfg.integrator.t_stop) {
    j["t_stop"] = *cfg.integrator.t_stop;
  }
  return j;
}

} // namespace nsnpeak::cli
