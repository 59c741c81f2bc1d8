// SPDX-License-Identifier: Apache-2.0
#include "rpoint/config.hpp"

#include <fstream>
#include <set>
#include <sstream>

#include "json.hpp"
#include "rpoint/error.hpp"

namespace rpoint {

using nlohmann::json;

std::string_view to_string(ExperimentKind kind) {
  switch (kind) {
    case ExperimentKind::Moments:
      return "moments";
    case ExperimentKind::Survival:
      return "survival";
    case ExperimentKind::Fdd:
      return "fdd";
    case ExperimentKind::Identity:
      return "identity";
    case ExperimentKind::CsbmTable:
      return "csbm-table";
  }
  return "unknown";
}

ExperimentKind parse_experiment_kind(std::string_view name) {
  for (auto kind : {ExperimentKind::Moments, ExperimentKind::Survival, ExperimentKind::Fdd,
                    ExperimentKind::Identity, ExperimentKind::CsbmTable}) {
    if (to_string(kind) == name) return kind;
  }
  throw ConfigError("unknown experiment kind '" + std::string(name) + "'");
}

Model ModelConfig::build() const {
  try {
    StepKernel step = kernel == "nearest_neighbor" ? StepKernel::nearest_neighbor(dimension)
                      : kernel == "spread_out_box"
                          ? StepKernel::spread_out_box(dimension, radius)
                          : throw ConfigError("model.kernel must be nearest_neighbor or "
                                              "spread_out_box, got '" + kernel + "'");
    if (offspring == "binary") return Model{OffspringLaw::binary(), step};
    if (offspring == "poisson") return Model{OffspringLaw::poisson_one(), step};
    if (offspring == "geometric") return Model{OffspringLaw::geometric(), step};
    if (offspring == "custom") return Model{OffspringLaw::custom(pmf), step};
    throw ConfigError("model.offspring must be binary, poisson, geometric or custom, got '" +
                      offspring + "'");
  } catch (const DomainError& e) {
    throw ConfigError(std::string("model: ") + e.what());
  }
}

namespace {

/// Reads keys from a JSON object and rejects any it was not asked about.
class ObjectReader {
 public:
  ObjectReader(const json& node, std::string where) : node_(node), where_(std::move(where)) {
    if (!node_.is_object()) throw ConfigError(where_ + " must be a JSON object");
  }

  const json* find(const std::string& key) {
    seen_.insert(key);
    const auto it = node_.find(key);
    return it == node_.end() ? nullptr : &*it;
  }

  template <class T>
  std::optional<T> get(const std::string& key) {
    const json* value = find(key);
    if (!value) return std::nullopt;
    try {
      return value->get<T>();
    } catch (const json::exception& e) {
      throw ConfigError(path(key) + ": " + e.what());
    }
  }

  template <class T>
  T require(const std::string& key) {
    auto value = get<T>(key);
    if (!value) throw ConfigError(path(key) + " is required");
    return *value;
  }

  std::string path(const std::string& key) const { return where_ + "." + key; }

  void finish() const {
    for (const auto& item : node_.items()) {
      if (!seen_.count(item.key())) throw ConfigError("unknown key " + path(item.key()));
    }
  }

 private:
  const json& node_;
  std::string where_;
  std::set<std::string> seen_;
};

csbm::MomentSpec read_spec(const json& node, const std::string& where) {
  ObjectReader reader(node, where);
  csbm::MomentSpec spec;
  spec.times = reader.require<std::vector<double>>("times");
  spec.frequencies = reader.require<std::vector<std::vector<double>>>("frequencies");
  reader.finish();
  try {
    spec.validate();
  } catch (const DomainError& e) {
    throw ConfigError(where + ": " + e.what());
  }
  return spec;
}

std::vector<csbm::MomentSpec> read_specs(const json* node, const std::string& where) {
  std::vector<csbm::MomentSpec> specs;
  if (!node) return specs;
  if (!node->is_array()) throw ConfigError(where + " must be an array");
  for (std::size_t i = 0; i < node->size(); ++i) {
    specs.push_back(read_spec((*node)[i], where + "[" + std::to_string(i) + "]"));
  }
  return specs;
}

template <class T, class Fn>
std::vector<T> read_array(const json* node, const std::string& where, Fn&& read_one) {
  std::vector<T> out;
  if (!node) return out;
  if (!node->is_array()) throw ConfigError(where + " must be an array");
  for (std::size_t i = 0; i < node->size(); ++i) {
    ObjectReader reader((*node)[i], where + "[" + std::to_string(i) + "]");
    out.push_back(read_one(reader));
    reader.finish();
  }
  return out;
}

void require_inside_horizon(double value, double horizon, const std::string& what) {
  if (!(value < horizon)) {
    throw ConfigError("horizon_time (" + std::to_string(horizon) + ") must strictly exceed " +
                      what + " (" + std::to_string(value) + ")");
  }
}

void check_spec_against(const csbm::MomentSpec& spec, const ExperimentConfig& config,
                        const std::string& where) {
  if (static_cast<int>(spec.frequencies.front().size()) != config.model.dimension) {
    throw ConfigError(where + ": frequency dimension differs from model.dimension");
  }
  for (double t : spec.times) require_inside_horizon(t, config.horizon_time, where + " time");
}

}  // namespace

void ExperimentConfig::validate() const {
  if (threads < 1) throw ConfigError("threads must be at least 1");
  if (kind == ExperimentKind::CsbmTable) {
    for (double eps : csbm.epsilons) {
      if (!(eps > 0.0)) throw ConfigError("csbm.epsilons entries must be positive");
    }
    return;
  }

  (void)model.build();
  if (n_grid.empty()) throw ConfigError("n_grid must be nonempty");
  for (std::size_t i = 0; i < n_grid.size(); ++i) {
    if (n_grid[i] < 1) throw ConfigError("n_grid entries must be positive");
    if (i > 0 && !(n_grid[i] > n_grid[i - 1])) {
      throw ConfigError("n_grid must be strictly increasing");
    }
  }
  if (replicates < 1) throw ConfigError("replicates must be at least 1");
  if (replicates > 0xFFFFFFFFull) throw ConfigError("replicates must fit in 32 bits");
  if (!(horizon_time > 0.0)) throw ConfigError("horizon_time must be positive");
  if (!(tolerance.se_multiplier >= 0.0) || !(tolerance.bias_absolute >= 0.0) ||
      !(tolerance.bias_inverse_n >= 0.0) || !(tolerance.identity_relative >= 0.0)) {
    throw ConfigError("tolerance fields must be nonnegative");
  }

  switch (kind) {
    case ExperimentKind::Moments:
    case ExperimentKind::Identity: {
      if (moments.empty()) throw ConfigError("moments must list at least one moment spec");
      for (std::size_t i = 0; i < moments.size(); ++i) {
        check_spec_against(moments[i], *this, "moments[" + std::to_string(i) + "]");
      }
      break;
    }
    case ExperimentKind::Survival: {
      if (survival_epsilons.empty()) throw ConfigError("survival.epsilons must be nonempty");
      for (double eps : survival_epsilons) {
        if (!(eps > 0.0)) throw ConfigError("survival.epsilons entries must be positive");
        require_inside_horizon(eps, horizon_time, "survival epsilon");
      }
      break;
    }
    case ExperimentKind::Fdd: {
      if (!(fdd.epsilon > 0.0)) throw ConfigError("fdd.epsilon must be positive");
      if (!(fdd.b >= fdd.epsilon)) {
        throw ConfigError("fdd.b must be at least fdd.epsilon (closed-form conditional law)");
      }
      require_inside_horizon(fdd.b, horizon_time, "fdd.b");
      if (!(fdd.ks_alpha > 0.0 && fdd.ks_alpha < 1.0)) {
        throw ConfigError("fdd.ks_alpha must lie in (0, 1)");
      }
      if (!(fdd.ks_allowance >= 0.0)) throw ConfigError("fdd.ks_allowance must be nonnegative");
      for (std::size_t i = 0; i < fdd.weighted.size(); ++i) {
        const auto where = "fdd.weighted[" + std::to_string(i) + "]";
        if (!(fdd.weighted[i].s > 0.0)) throw ConfigError(where + ".s must be positive");
        require_inside_horizon(fdd.weighted[i].s, horizon_time, where + ".s");
        if (!fdd.weighted[i].spec.times.empty()) check_spec_against(fdd.weighted[i].spec, *this, where);
      }
      for (std::size_t i = 0; i < fdd.truncated.size(); ++i) {
        const auto where = "fdd.truncated[" + std::to_string(i) + "]";
        if (!(fdd.truncated[i].s > 0.0)) throw ConfigError(where + ".s must be positive");
        if (!(fdd.truncated[i].lambda >= 0.0)) {
          throw ConfigError(where + ".lambda must be nonnegative");
        }
        require_inside_horizon(fdd.truncated[i].s, horizon_time, where + ".s");
      }
      break;
    }
    case ExperimentKind::CsbmTable:
      break;
  }
}

ExperimentConfig parse_config(std::string_view json_text) {
  json doc;
  try {
    doc = json::parse(json_text);
  } catch (const json::parse_error& e) {
    throw ConfigError(std::string("config is not valid JSON: ") + e.what());
  }
  ObjectReader root(doc, "config");
  ExperimentConfig config;

  const auto version = root.require<int>("version");
  if (version != ExperimentConfig::kSchemaVersion) {
    throw ConfigError("unsupported config version " + std::to_string(version) + " (expected " +
                      std::to_string(ExperimentConfig::kSchemaVersion) + ")");
  }
  config.kind = parse_experiment_kind(root.require<std::string>("kind"));

  if (const json* model = root.find("model")) {
    ObjectReader reader(*model, "config.model");
    config.model.offspring = reader.get<std::string>("offspring").value_or("binary");
    config.model.pmf = reader.get<std::vector<double>>("pmf").value_or(std::vector<double>{});
    config.model.kernel = reader.get<std::string>("kernel").value_or("nearest_neighbor");
    config.model.radius = reader.get<int>("radius").value_or(1);
    config.model.dimension = reader.get<int>("dimension").value_or(1);
    reader.finish();
    if (config.model.offspring != "custom" && !config.model.pmf.empty()) {
      throw ConfigError("config.model.pmf is only allowed with offspring = custom");
    }
  }

  config.n_grid = root.get<std::vector<std::uint32_t>>("n_grid").value_or(std::vector<std::uint32_t>{});
  config.replicates = root.get<std::uint64_t>("replicates").value_or(0);
  config.horizon_time = root.get<double>("horizon_time").value_or(0.0);
  config.seed = root.get<std::uint64_t>("seed").value_or(0);
  config.threads = root.get<unsigned>("threads").value_or(1);
  if (const auto convention = root.get<std::string>("convention")) {
    if (*convention == "standard") {
      config.convention = ConventionChoice::Standard;
    } else if (*convention == "moment_matched") {
      config.convention = ConventionChoice::MomentMatched;
    } else if (*convention == "both") {
      config.convention = ConventionChoice::Both;
    } else {
      throw ConfigError("config.convention must be standard, moment_matched or both");
    }
  }

  config.moments = read_specs(root.find("moments"), "config.moments");

  if (const json* survival = root.find("survival")) {
    ObjectReader reader(*survival, "config.survival");
    config.survival_epsilons = reader.require<std::vector<double>>("epsilons");
    reader.finish();
  }

  if (const json* fdd = root.find("fdd")) {
    ObjectReader reader(*fdd, "config.fdd");
    config.fdd.b = reader.get<double>("b").value_or(1.0);
    config.fdd.epsilon = reader.get<double>("epsilon").value_or(1.0);
    config.fdd.ks_alpha = reader.get<double>("ks_alpha").value_or(0.001);
    config.fdd.ks_allowance = reader.get<double>("ks_allowance").value_or(0.0);
    config.fdd.weighted = read_array<WeightedRequest>(
        reader.find("weighted"), "config.fdd.weighted", [](ObjectReader& r) {
          WeightedRequest w;
          w.s = r.require<double>("s");
          w.spec.times = r.get<std::vector<double>>("times").value_or(std::vector<double>{});
          w.spec.frequencies = r.get<std::vector<std::vector<double>>>("frequencies")
                                   .value_or(std::vector<std::vector<double>>{});
          if (!w.spec.times.empty() || !w.spec.frequencies.empty()) {
            try {
              w.spec.validate();
            } catch (const DomainError& e) {
              throw ConfigError(std::string("config.fdd.weighted: ") + e.what());
            }
          }
          return w;
        });
    config.fdd.truncated = read_array<TruncatedRequest>(
        reader.find("truncated"), "config.fdd.truncated", [](ObjectReader& r) {
          return TruncatedRequest{r.require<double>("s"), r.require<double>("lambda")};
        });
    reader.finish();
  }

  if (const json* table = root.find("csbm")) {
    ObjectReader reader(*table, "config.csbm");
    config.csbm.epsilons = reader.get<std::vector<double>>("epsilons").value_or(std::vector<double>{});
    config.csbm.tails = read_array<TailRequest>(reader.find("tails"), "config.csbm.tails",
                                                [](ObjectReader& r) {
                                                  return TailRequest{r.require<double>("b"),
                                                                     r.require<double>("lambda")};
                                                });
    config.csbm.mass_moments = read_array<MassMomentRequest>(
        reader.find("mass_moments"), "config.csbm.mass_moments", [](ObjectReader& r) {
          return MassMomentRequest{r.require<double>("b"), r.require<int>("p")};
        });
    config.csbm.exp_moments = read_array<ExpMomentRequest>(
        reader.find("exp_moments"), "config.csbm.exp_moments", [](ObjectReader& r) {
          return ExpMomentRequest{r.require<double>("epsilon"), r.require<double>("theta")};
        });
    config.csbm.moments = read_specs(reader.find("moments"), "config.csbm.moments");
    reader.finish();
  }

  if (const json* tol = root.find("tolerance")) {
    ObjectReader reader(*tol, "config.tolerance");
    config.tolerance.se_multiplier = reader.get<double>("se_multiplier").value_or(4.0);
    config.tolerance.bias_absolute = reader.get<double>("bias_absolute").value_or(0.0);
    config.tolerance.bias_inverse_n = reader.get<double>("bias_inverse_n").value_or(0.0);
    config.tolerance.identity_relative = reader.get<double>("identity_relative").value_or(1e-9);
    reader.finish();
  }

  if (const json* quad = root.find("quadrature")) {
    ObjectReader reader(*quad, "config.quadrature");
    config.quadrature.abs_tolerance = reader.get<double>("abs_tolerance").value_or(1e-8);
    config.quadrature.max_depth = reader.get<int>("max_depth").value_or(30);
    reader.finish();
    if (!(config.quadrature.abs_tolerance > 0.0) || config.quadrature.max_depth < 1) {
      throw ConfigError("config.quadrature needs abs_tolerance > 0 and max_depth >= 1");
    }
  }

  if (const auto out = root.get<std::string>("output")) config.output = *out;

  root.finish();
  config.validate();
  return config;
}

ExperimentConfig load_config(const std::filesystem::path& file) {
  std::ifstream in(file);
  if (!in) throw ConfigError("cannot open config file " + file.string());
  std::ostringstream text;
  text << in.rdbuf();
  return parse_config(text.str());
}

}  // namespace rpoint
