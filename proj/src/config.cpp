#include "galton/config.hpp"

#include <fstream>
#include <set>
#include <string>

#include "galton/errors.hpp"

namespace galton {

namespace {

void reject_unknown_keys(const nlohmann::json& j,
                         const std::set<std::string>& known,
                         const std::string& where) {
  if (!j.is_object())
    throw InvalidConfig(where + " section must be a JSON object");
  for (const auto& item : j.items())
    if (!known.count(item.key()))
      throw InvalidConfig("unknown key '" + item.key() + "' in " + where);
}

double number_at(const nlohmann::json& j, const std::string& key,
                 double fallback, bool required = false) {
  if (!j.contains(key)) {
    if (required) throw InvalidConfig("missing required key '" + key + "'");
    return fallback;
  }
  if (!j.at(key).is_number())
    throw InvalidConfig("key '" + key + "' must be a number");
  return j.at(key).get<double>();
}

}  // namespace

nlohmann::json load_json_file(const std::string& path) {
  std::ifstream is(path);
  if (!is) throw IoError("cannot open '" + path + "' for reading");
  try {
    return nlohmann::json::parse(is);
  } catch (const nlohmann::json::exception& e) {
    throw InvalidConfig("'" + path + "' is not valid JSON: " + e.what());
  }
}

SpinSystemConfig spin_config_from_json(const nlohmann::json& j) {
  reject_unknown_keys(j,
                      {"zero_field_splitting", "gyro_electron", "bias_field",
                       "rabi", "nuclei"},
                      "spin config");
  SpinSystemConfig config;
  config.zero_field_splitting = number_at(j, "zero_field_splitting",
                                          config.zero_field_splitting);
  config.gyro_electron = number_at(j, "gyro_electron", config.gyro_electron);
  config.bias_field = number_at(j, "bias_field", config.bias_field);
  config.rabi = number_at(j, "rabi", config.rabi);
  if (!j.contains("nuclei") || !j.at("nuclei").is_array() ||
      j.at("nuclei").empty())
    throw InvalidConfig("spin config needs a non-empty 'nuclei' array");
  for (const auto& nj : j.at("nuclei")) {
    reject_unknown_keys(nj, {"omega0", "omega1", "theta", "a_parallel"},
                        "nucleus entry");
    NuclearSpinParams nuc;
    nuc.omega0 = number_at(nj, "omega0", 0.0, true);
    nuc.omega1 = number_at(nj, "omega1", 0.0, true);
    nuc.theta = number_at(nj, "theta", 0.0);
    nuc.a_parallel = number_at(nj, "a_parallel", nuc.omega1 - nuc.omega0);
    config.nuclei.push_back(nuc);
  }
  config.n_nuclei = static_cast<int>(config.nuclei.size());
  config.validate();
  return config;
}

DosModel dos_from_json(const nlohmann::json& j) {
  reject_unknown_keys(j, {"kind", "center", "width", "table"}, "dos config");
  const std::string kind =
      j.contains("kind") ? j.at("kind").get<std::string>() : "gaussian";
  if (kind == "gaussian") {
    if (j.contains("table"))
      throw InvalidConfig("gaussian density takes no 'table'");
    return DosModel::make_gaussian(number_at(j, "center", 0.0, true),
                                   number_at(j, "width", 0.0, true));
  }
  if (kind == "tabulated") {
    if (j.contains("center") || j.contains("width"))
      throw InvalidConfig("tabulated density takes no 'center'/'width'");
    if (!j.contains("table") || !j.at("table").is_array())
      throw InvalidConfig("tabulated density needs a 'table' array");
    std::vector<std::pair<double, double>> rows;
    for (const auto& row : j.at("table")) {
      if (!row.is_array() || row.size() != 2 || !row[0].is_number() ||
          !row[1].is_number())
        throw InvalidConfig("table rows must be [frequency, density] pairs");
      rows.emplace_back(row[0].get<double>(), row[1].get<double>());
    }
    return DosModel::make_tabulated(std::move(rows));
  }
  throw InvalidConfig("dos kind must be 'gaussian' or 'tabulated'");
}

BoardSamplingOptions sampling_from_json(const nlohmann::json& j) {
  reject_unknown_keys(j,
                      {"gap_scale", "flip_ratio", "column_span_frac",
                       "monte_carlo", "seed", "n_states"},
                      "sampling config");
  BoardSamplingOptions options;
  options.gap_scale = number_at(j, "gap_scale", options.gap_scale);
  options.flip_ratio = number_at(j, "flip_ratio", options.flip_ratio);
  options.column_span_frac =
      number_at(j, "column_span_frac", options.column_span_frac);
  if (j.contains("monte_carlo")) {
    if (!j.at("monte_carlo").is_boolean())
      throw InvalidConfig("'monte_carlo' must be a boolean");
    options.monte_carlo = j.at("monte_carlo").get<bool>();
  }
  if (j.contains("seed")) {
    if (!j.at("seed").is_number_integer())
      throw BadSeed("'seed' must be an integer");
    options.seed = j.at("seed").get<std::int64_t>();
  }
  return options;
}

SweepSpec sweep_spec_from_json(const nlohmann::json& j) {
  reject_unknown_keys(
      j, {"f0", "delta_f", "sweep_rate", "direction", "n_sweeps"},
      "sweep config");
  SweepSpec spec;
  spec.f0 = number_at(j, "f0", spec.f0);
  spec.delta_f = number_at(j, "delta_f", 0.0, true);
  spec.sweep_rate = number_at(j, "sweep_rate", 0.0, true);
  if (j.contains("direction")) {
    const std::string dir = j.at("direction").get<std::string>();
    if (dir == "forward")
      spec.direction = SweepDirection::forward;
    else if (dir == "reverse")
      spec.direction = SweepDirection::reverse;
    else
      throw InvalidConfig("direction must be 'forward' or 'reverse'");
  }
  if (j.contains("n_sweeps")) {
    if (!j.at("n_sweeps").is_number_integer())
      throw InvalidConfig("'n_sweeps' must be an integer");
    spec.n_sweeps = j.at("n_sweeps").get<int>();
  }
  spec.validate();
  return spec;
}

BuildupModel buildup_from_json(const nlohmann::json& j) {
  reject_unknown_keys(j, {"p_max", "rate", "gamma1"}, "buildup config");
  BuildupModel model;
  model.p_max = number_at(j, "p_max", 0.0, true);
  model.rate = number_at(j, "rate", 0.0, true);
  model.gamma1 = number_at(j, "gamma1", 0.0, true);
  model.validate();
  return model;
}

nlohmann::json to_json(const PopulationVector& pops) {
  nlohmann::json j;
  j["manifold_resolved"] = pops.manifold_resolved;
  if (pops.manifold_resolved) {
    j["m0"] = pops.m0;
    j["m1"] = pops.m1;
  }
  j["totals"] = pops.totals();
  return j;
}

nlohmann::json to_json(const SpectralMapResult& map) {
  nlohmann::json j;
  j["f0"] = map.f0;
  j["polarization"] = map.polarization;
  j["delta_f"] = map.spec.delta_f;
  j["sweep_rate"] = map.spec.sweep_rate;
  j["direction"] =
      map.spec.direction == SweepDirection::forward ? "forward" : "reverse";
  j["n_sweeps"] = map.spec.n_sweeps;
  j["n_jobs_used"] = map.n_jobs_used;
  return j;
}

nlohmann::json to_json(const FitResult& fit) {
  nlohmann::json j;
  j["model"] = fit.model;
  j["param_names"] = fit.param_names;
  j["params"] = fit.params;
  j["param_errors"] = fit.param_errors;
  j["converged"] = fit.converged;
  j["n_iterations"] = fit.n_iterations;
  j["residual_norm"] = fit.residual_norm;
  j["gradient_norm"] = fit.gradient_norm;
  j["flags"] = fit.flags;
  return j;
}

}  // namespace galton
