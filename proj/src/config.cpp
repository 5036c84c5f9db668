#include "batchens/config.hpp"

#include <algorithm>
#include <cstdio>
#include <fstream>
#include <ostream>
#include <sstream>
#include <stdexcept>

namespace batchens {

namespace {

std::string trim(const std::string& s) {
  const auto begin = s.find_first_not_of(" \t\r\n");
  if (begin == std::string::npos) return "";
  const auto end = s.find_last_not_of(" \t\r\n");
  return s.substr(begin, end - begin + 1);
}

std::vector<std::string> split(const std::string& s, char sep) {
  std::vector<std::string> parts;
  std::string current;
  for (char c : s) {
    if (c == sep) {
      parts.push_back(trim(current));
      current.clear();
    } else {
      current.push_back(c);
    }
  }
  parts.push_back(trim(current));
  return parts;
}

double parse_double(const std::string& value, const std::string& context) {
  std::size_t pos = 0;
  double out = 0.0;
  try {
    out = std::stod(value, &pos);
  } catch (const std::exception&) {
    throw std::runtime_error("config parse error: bad number '" + value + "' for " + context);
  }
  if (pos != value.size())
    throw std::runtime_error("config parse error: bad number '" + value + "' for " + context);
  return out;
}

std::int64_t parse_int(const std::string& value, const std::string& context) {
  std::size_t pos = 0;
  std::int64_t out = 0;
  try {
    out = std::stoll(value, &pos);
  } catch (const std::exception&) {
    throw std::runtime_error("config parse error: bad integer '" + value + "' for " + context);
  }
  if (pos != value.size())
    throw std::runtime_error("config parse error: bad integer '" + value + "' for " + context);
  return out;
}

std::string format_g17(double v) {
  char buf[40];
  std::snprintf(buf, sizeof buf, "%.17g", v);
  return buf;
}

std::string join(const std::vector<std::string>& parts, char sep) {
  std::string out;
  for (std::size_t i = 0; i < parts.size(); ++i) {
    if (i) out.push_back(sep);
    out += parts[i];
  }
  return out;
}

bool known_preset(const std::string& name) {
  return name == "testcase1" || name == "testcase2" || name == "testcase3" ||
         name == "testcase4" || name == "testcase5" || name == "custom";
}

}  // namespace

std::vector<std::string> default_policy_names() {
  return {"ensemble", "ensemble-efficient", "ucb", "ucb-v", "kl-ucb", "mars"};
}

Arm parse_arm(const std::string& text) {
  const std::vector<std::string> parts = split(text, ':');
  const std::string& kind = parts[0];
  auto need = [&](std::size_t count) {
    if (parts.size() != count + 1)
      throw std::runtime_error("config parse error: arm '" + text + "' expects " +
                               std::to_string(count) + " parameter(s)");
  };
  if (kind == "bernoulli") {
    need(1);
    return Arm::bernoulli(parse_double(parts[1], "arm " + text));
  }
  if (kind == "gaussian") {
    need(2);
    return Arm::gaussian(parse_double(parts[1], "arm " + text),
                         parse_double(parts[2], "arm " + text));
  }
  if (kind == "exponential") {
    need(1);
    return Arm::exponential(parse_double(parts[1], "arm " + text));
  }
  if (kind == "scaled-bernoulli") {
    need(2);
    return Arm::scaled_bernoulli(parse_double(parts[1], "arm " + text),
                                 parse_double(parts[2], "arm " + text));
  }
  if (kind == "uniform") {
    need(2);
    return Arm::uniform(parse_double(parts[1], "arm " + text),
                        parse_double(parts[2], "arm " + text));
  }
  throw std::runtime_error("config parse error: unknown arm kind '" + kind + "'");
}

PolicyConfig parse_policy(const std::string& text, const ExperimentConfig& config) {
  const std::vector<std::string> parts = split(text, ':');
  const std::string& name = parts[0];
  const std::string param = parts.size() > 1 ? parts[1] : "";

  PolicyConfig pc;
  pc.delta = config.delta;
  pc.estimator_mode = config.efficient_estimator ? EstimatorMode::Efficient
                                                 : EstimatorMode::FullHistory;
  if (config.warmup_sigma > 0.0)
    pc.warmup_per_batch = warmup_size(config.warmup_sigma);

  if (name == "ensemble") {
    pc.type = PolicyConfig::Type::EnsembleAnytime;
  } else if (name == "ensemble-efficient") {
    pc.type = PolicyConfig::Type::EnsembleAnytimeEfficient;
    pc.estimator_mode = EstimatorMode::Efficient;
  } else if (name == "ensemble-fixed") {
    pc.type = PolicyConfig::Type::EnsembleFixed;
    if (!param.empty())
      pc.fixed_batches = static_cast<int>(parse_int(param, "policy " + text));
  } else if (name == "ucb") {
    pc.type = PolicyConfig::Type::Ucb;
    if (!param.empty()) pc.ucb_alpha = parse_double(param, "policy " + text);
  } else if (name == "ucb-v") {
    pc.type = PolicyConfig::Type::UcbV;
    if (!param.empty()) pc.ucbv_range = parse_double(param, "policy " + text);
  } else if (name == "kl-ucb") {
    pc.type = PolicyConfig::Type::KlUcb;
    if (param == "bernoulli" || param.empty()) {
      pc.kl_family = KlFamily::Bernoulli;
    } else if (param == "gaussian") {
      pc.kl_family = KlFamily::Gaussian;
    } else if (param == "exponential") {
      pc.kl_family = KlFamily::Exponential;
    } else {
      throw std::runtime_error("config parse error: unknown kl-ucb family '" + param + "'");
    }
    if (param.empty()) {
      // Auto-select the divergence family from the environment.
      const BanditSpec spec = config.resolve_bandit();
      if (spec.kind == BanditSpec::Kind::RandomGaussian) {
        pc.kl_family = KlFamily::Gaussian;
        pc.kl_gaussian_sigma = spec.gaussian_sigma;
      } else if (spec.kind == BanditSpec::Kind::RandomExponential) {
        pc.kl_family = KlFamily::Exponential;
      } else if (spec.kind == BanditSpec::Kind::Fixed && !spec.fixed.arms.empty()) {
        const Arm& first = spec.fixed.arms[0];
        if (first.kind == ArmKind::Gaussian) {
          pc.kl_family = KlFamily::Gaussian;
          pc.kl_gaussian_sigma = first.param_b;
        } else if (first.kind == ArmKind::Exponential) {
          pc.kl_family = KlFamily::Exponential;
        }
      }
    }
  } else if (name == "mars") {
    pc.type = PolicyConfig::Type::Mars;
    if (!param.empty()) pc.mars_subsets_scale = parse_double(param, "policy " + text);
  } else {
    throw std::runtime_error("config parse error: unknown policy '" + name + "'");
  }
  return pc;
}

std::vector<PolicyConfig> ExperimentConfig::resolve_policies() const {
  const std::vector<std::string> names =
      policy_names.empty() ? default_policy_names() : policy_names;
  std::vector<PolicyConfig> out;
  out.reserve(names.size());
  for (const std::string& name : names) out.push_back(parse_policy(name, *this));
  return out;
}

BanditSpec ExperimentConfig::resolve_bandit() const {
  BanditSpec spec;
  spec.bernoullify_scale = bernoullify_scale;
  if (preset == "testcase1") {
    Bandit b;
    for (double mean : {0.001, 0.15, 0.2, 0.25, 0.3}) b.arms.push_back(Arm::bernoulli(mean));
    spec = BanditSpec::fixed_bandit(std::move(b));
  } else if (preset == "testcase2") {
    Bandit b;
    for (int i = 90; i <= 99; ++i)
      b.arms.push_back(Arm::bernoulli(static_cast<double>(i) / 100.0));
    spec = BanditSpec::fixed_bandit(std::move(b));
  } else if (preset == "testcase3") {
    spec.kind = BanditSpec::Kind::RandomBernoulli;
    spec.random_arms = 10;
  } else if (preset == "testcase4") {
    spec.kind = BanditSpec::Kind::RandomGaussian;
    spec.random_arms = 10;
    spec.gaussian_sigma = 1.0;
  } else if (preset == "testcase5") {
    spec.kind = BanditSpec::Kind::RandomExponential;
    spec.random_arms = 10;
    spec.rate_min = 0.01;
    spec.rate_max = 1.0;
  } else if (preset == "custom") {
    if (custom_arms.empty())
      throw std::runtime_error("parameter out of range: preset 'custom' needs arms");
    Bandit b;
    for (const std::string& text : custom_arms) b.arms.push_back(parse_arm(text));
    spec = BanditSpec::fixed_bandit(std::move(b));
  } else {
    throw std::runtime_error("unknown preset: '" + preset + "'");
  }
  spec.bernoullify_scale = bernoullify_scale;
  return spec;
}

void validate_config(const ExperimentConfig& config) {
  if (!known_preset(config.preset))
    throw std::runtime_error("unknown preset: '" + config.preset + "'");
  if (config.horizon < 1)
    throw std::runtime_error("parameter out of range: T must be >= 1");
  if (config.simulations < 1)
    throw std::runtime_error("parameter out of range: sims must be >= 1");
  if (!(config.delta > 0.0) || !(config.delta < 1.0))
    throw std::runtime_error("parameter out of range: delta must lie in (0, 1)");
  if (config.parallel < 1)
    throw std::runtime_error("parameter out of range: parallel must be >= 1");
  if (config.warmup_sigma < 0.0)
    throw std::runtime_error("parameter out of range: warmup_sigma must be >= 0");
  if (config.bernoullify_scale < 0.0)
    throw std::runtime_error("parameter out of range: bernoullify must be >= 0");
  // Policy and arm specs must parse.
  (void)config.resolve_policies();
  (void)config.resolve_bandit();
}

ExperimentConfig parse_config_text(const std::string& text, const std::string& origin) {
  ExperimentConfig config;
  std::istringstream in(text);
  std::string line;
  int line_number = 0;
  while (std::getline(in, line)) {
    ++line_number;
    const auto hash = line.find('#');
    if (hash != std::string::npos) line = line.substr(0, hash);
    line = trim(line);
    if (line.empty()) continue;
    const auto eq = line.find('=');
    if (eq == std::string::npos)
      throw std::runtime_error("config parse error: " + origin + ":" +
                               std::to_string(line_number) + ": expected key = value");
    const std::string key = trim(line.substr(0, eq));
    const std::string value = trim(line.substr(eq + 1));

    if (key == "preset") {
      config.preset = value;
    } else if (key == "policies") {
      config.policy_names = split(value, ',');
    } else if (key == "T") {
      config.horizon = parse_int(value, key);
    } else if (key == "sims") {
      config.simulations = static_cast<int>(parse_int(value, key));
    } else if (key == "seed") {
      config.base_seed = static_cast<std::uint64_t>(parse_int(value, key));
    } else if (key == "delta") {
      config.delta = parse_double(value, key);
    } else if (key == "out") {
      config.out_path = value;
    } else if (key == "parallel") {
      config.parallel = static_cast<int>(parse_int(value, key));
    } else if (key == "estimator") {
      if (value == "efficient")
        config.efficient_estimator = true;
      else if (value == "full")
        config.efficient_estimator = false;
      else
        throw std::runtime_error("config parse error: estimator must be full or efficient");
    } else if (key == "warmup_sigma") {
      config.warmup_sigma = parse_double(value, key);
    } else if (key == "bernoullify") {
      config.bernoullify_scale = parse_double(value, key);
    } else if (key == "arms") {
      config.custom_arms = split(value, ',');
    } else {
      throw std::runtime_error("config parse error: " + origin + ":" +
                               std::to_string(line_number) + ": unknown key '" + key + "'");
    }
  }
  validate_config(config);
  return config;
}

ExperimentConfig load_config_file(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw std::runtime_error("config parse error: cannot open '" + path + "'");
  std::ostringstream buffer;
  buffer << in.rdbuf();
  return parse_config_text(buffer.str(), path);
}

std::string config_to_text(const ExperimentConfig& config) {
  std::ostringstream os;
  os << "preset = " << config.preset << "\n";
  const std::vector<std::string> names =
      config.policy_names.empty() ? default_policy_names() : config.policy_names;
  os << "policies = " << join(names, ',') << "\n";
  os << "T = " << config.horizon << "\n";
  os << "sims = " << config.simulations << "\n";
  os << "seed = " << config.base_seed << "\n";
  os << "delta = " << format_g17(config.delta) << "\n";
  os << "out = " << config.out_path << "\n";
  os << "parallel = " << config.parallel << "\n";
  os << "estimator = " << (config.efficient_estimator ? "efficient" : "full") << "\n";
  os << "warmup_sigma = " << format_g17(config.warmup_sigma) << "\n";
  os << "bernoullify = " << format_g17(config.bernoullify_scale) << "\n";
  if (!config.custom_arms.empty()) os << "arms = " << join(config.custom_arms, ',') << "\n";
  return os.str();
}

void write_experiment_csv(std::ostream& os, const ExperimentResult& result) {
  os << "policy,t,mean_regret,std_regret\n";
  for (const auto& series : result.series) {
    for (std::int64_t t = 1; t <= result.horizon; ++t) {
      const auto i = static_cast<std::size_t>(t - 1);
      os << series.policy << "," << t << "," << format_g17(series.mean_regret[i]) << ","
         << format_g17(series.std_regret[i]) << "\n";
    }
  }
}

void write_experiment_csv_file(const std::string& path, const ExperimentResult& result) {
  std::ofstream os(path, std::ios::binary);  // binary keeps LF endings everywhere
  if (!os) throw std::runtime_error("cannot open output file '" + path + "'");
  write_experiment_csv(os, result);
  if (!os) throw std::runtime_error("failed writing output file '" + path + "'");
}

void write_metadata_file(const std::string& path, const ExperimentConfig& config) {
  std::ofstream os(path, std::ios::binary);
  if (!os) throw std::runtime_error("cannot open metadata file '" + path + "'");
  os << "# batchens " << kLibraryVersion << "\n";
  os << "# episode seeds: " << config.base_seed << ".."
     << config.base_seed + static_cast<std::uint64_t>(config.simulations) - 1 << "\n";
  os << "# regret aggregation: population std over simulations\n";
  os << config_to_text(config);
  if (!os) throw std::runtime_error("failed writing metadata file '" + path + "'");
}

void write_chart_svg(const std::string& path, const ExperimentResult& result) {
  static const char* kColors[] = {"#1f77b4", "#ff7f0e", "#2ca02c", "#d62728",
                                  "#9467bd", "#8c564b", "#e377c2", "#7f7f7f"};
  const double width = 760.0, height = 480.0, margin = 60.0;

  double max_regret = 1e-12;
  for (const auto& series : result.series)
    for (double v : series.mean_regret) max_regret = std::max(max_regret, v);

  std::ofstream os(path, std::ios::binary);
  if (!os) throw std::runtime_error("cannot open chart file '" + path + "'");
  os << "<svg xmlns='http://www.w3.org/2000/svg' width='" << width << "' height='"
     << height << "'>\n";
  os << "<rect width='100%' height='100%' fill='white'/>\n";
  os << "<line x1='" << margin << "' y1='" << height - margin << "' x2='" << width - 20
     << "' y2='" << height - margin << "' stroke='black'/>\n";
  os << "<line x1='" << margin << "' y1='20' x2='" << margin << "' y2='"
     << height - margin << "' stroke='black'/>\n";
  os << "<text x='" << width / 2 << "' y='" << height - 15
     << "' font-size='13'>t</text>\n";
  os << "<text x='12' y='18' font-size='13'>mean pseudo-regret (max "
     << format_g17(max_regret) << ")</text>\n";

  const double plot_w = width - 20 - margin;
  const double plot_h = height - margin - 20;
  for (std::size_t p = 0; p < result.series.size(); ++p) {
    const auto& series = result.series[p];
    os << "<polyline fill='none' stroke='" << kColors[p % 8] << "' stroke-width='1.5' points='";
    const std::size_t n = series.mean_regret.size();
    const std::size_t stride = std::max<std::size_t>(1, n / 512);
    for (std::size_t i = 0; i < n; i += stride) {
      const double x = margin + plot_w * static_cast<double>(i + 1) / static_cast<double>(n);
      const double y = height - margin - plot_h * series.mean_regret[i] / max_regret;
      os << x << "," << y << " ";
    }
    os << "'/>\n";
    os << "<text x='" << margin + 8 << "' y='" << 34 + 16 * static_cast<double>(p)
       << "' font-size='12' fill='" << kColors[p % 8] << "'>" << series.policy
       << "</text>\n";
  }
  os << "</svg>\n";
}

}  // namespace batchens
