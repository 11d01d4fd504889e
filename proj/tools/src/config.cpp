#include <charconv>
#include <cmath>
#include <fstream>
#include <sstream>
#include <system_error>

#include "tqp/parallel.hpp"
#include "tqp_cli/commands.hpp"

namespace tqp::cli {

namespace {

const double kPiValue = 3.14159265358979323846;

bool compatible(const json& def, const json& value) {
  if (def.is_null()) return value.is_null() || value.is_number_unsigned() || value.is_object();
  if (def.is_boolean()) return value.is_boolean();
  if (def.is_number_unsigned()) return value.is_number_unsigned();
  if (def.is_number()) return value.is_number();
  if (def.is_string()) return value.is_string();
  if (def.is_array()) return value.is_array();
  if (def.is_object()) return value.is_object();
  return false;
}

void merge_into(json& target, const json& user, const std::string& path) {
  if (!user.is_object()) throw UsageError("config" + path + " must be a JSON object");
  for (auto it = user.begin(); it != user.end(); ++it) {
    const std::string key = path.empty() ? it.key() : path + "." + it.key();
    if (!target.contains(it.key())) throw UsageError("unknown config key '" + key + "'");
    json& slot = target[it.key()];
    if (!compatible(slot, it.value())) throw UsageError("config key '" + key + "' has the wrong type");
    if (slot.is_object() && it.value().is_object()) {
      merge_into(slot, it.value(), key);
    } else {
      slot = it.value();
    }
  }
}

json noise_defaults() { return json{{"q", 1e6}, {"n_th", 0.0}}; }

}  // namespace

const std::vector<std::string>& command_names() {
  static const std::vector<std::string> names{"entropy-sweep", "fidelity-sweep", "algebra-check", "msuqc-demo",
                                              "ns-check"};
  return names;
}

json default_config(const std::string& command) {
  json base{{"seed", 1u}, {"threads", 1u}};
  if (command == "entropy-sweep") {
    base.update({{"n_min", 0.1}, {"n_max", 2.0}, {"n_step", 0.1}, {"tail", 1e-8}, {"cutoff", nullptr},
                 {"agreement_tolerance", 1e-6}, {"crossover_window", {0.7, 0.9}}});
  } else if (command == "fidelity-sweep") {
    base.update({{"n_min", 0.2}, {"n_max", 4.0}, {"n_step", 0.2}, {"tail", 1e-6}, {"cutoff", nullptr},
                 {"include_ideal", true}, {"monotone_slack", 1e-3}, {"ideal_tolerance", 1e-9},
                 {"noise", nullptr}});
  } else if (command == "algebra-check") {
    base.update({{"cutoffs", {6u, 12u, 20u}}, {"tolerance", 1e-10}, {"gate_tolerance", 1e-9},
                 {"ancilla_tolerance", 1e-10}, {"angles", 30u}, {"max_label", 5u}});
  } else if (command == "msuqc-demo") {
    base.update({{"circuits", 20u}, {"qubits", {1u, 2u}}, {"steps", 3u}, {"mean_excitations", {0.5, 1.0, 2.0}},
                 {"cutoff", 8u}, {"tolerance", 1e-6}, {"pure_bases", {{0u, 0u}, {1u, 0u}, {0u, 1u}, {1u, 1u}}}});
  } else if (command == "ns-check") {
    base.update({{"cutoff", 30u}, {"phis", {0.3, 0.7, kPiValue / 2.0, kPiValue}}, {"xis", {0.05, 0.1, 0.2}},
                 {"m_max", 8u}, {"tolerance", 1e-8}, {"min_singular", 1e-3}, {"negative_threshold", 0.1}});
  } else {
    throw UsageError("unknown command '" + command + "'");
  }
  return base;
}

json resolve_config(const std::string& command, const json& user, const GlobalOptions& flags) {
  json config = default_config(command);
  if (!user.is_null()) merge_into(config, user, "");
  if (config.contains("noise") && config["noise"].is_object()) {
    json noise = noise_defaults();
    merge_into(noise, config["noise"], "noise");
    config["noise"] = noise;
  }
  if (config.contains("cutoff") && config["cutoff"].is_object()) throw UsageError("config key 'cutoff' must be an integer");

  if (flags.seed) config["seed"] = *flags.seed;
  if (flags.cutoff) {
    if (*flags.cutoff < 2) throw UsageError("--cutoff must be at least 2");
    if (command == "algebra-check") {
      config["cutoffs"] = json::array({*flags.cutoff});
    } else {
      config["cutoff"] = *flags.cutoff;
    }
  }
  std::optional<std::size_t> from_config;
  if (config["threads"].get<std::size_t>() > 0) from_config = config["threads"].get<std::size_t>();
  try {
    config["threads"] = resolve_threads(flags.threads, from_config);
  } catch (const std::invalid_argument& e) {
    throw UsageError(e.what());
  }
  return config;
}

std::string format_number(double value) {
  if (std::isnan(value)) return "nan";
  if (std::isinf(value)) return value > 0 ? "inf" : "-inf";
  if (value == 0.0) value = 0.0;  // drop the sign of negative zero
  char buf[64];
  const auto res = std::to_chars(buf, buf + sizeof(buf), value, std::chars_format::general, 12);
  if (res.ec != std::errc()) throw std::runtime_error("format_number failed");
  return std::string(buf, res.ptr);
}

CommandOutput run_command(const std::string& command, const json& config) {
  if (command == "entropy-sweep") return entropy_sweep(config);
  if (command == "fidelity-sweep") return fidelity_sweep(config);
  if (command == "algebra-check") return algebra_check(config);
  if (command == "msuqc-demo") return msuqc_demo(config);
  if (command == "ns-check") return ns_check(config);
  throw UsageError("unknown command '" + command + "'");
}

int execute(const std::string& command, const GlobalOptions& options, std::ostream& out, std::ostream& err) {
  json config;
  CommandOutput result;
  try {
    json user;
    if (options.config_path) {
      std::ifstream in(*options.config_path);
      if (!in) throw UsageError("cannot open config file " + *options.config_path);
      try {
        user = json::parse(in);
      } catch (const json::parse_error& e) {
        throw UsageError("config file is not valid JSON: " + std::string(e.what()));
      }
    }
    config = resolve_config(command, user, options);
    result = run_command(command, config);
  } catch (const UsageError& e) {
    err << "tqp " << command << ": " << e.what() << '\n';
    return kExitUsage;
  } catch (const json::exception& e) {
    err << "tqp " << command << ": bad config value: " << e.what() << '\n';
    return kExitUsage;
  } catch (const std::invalid_argument& e) {
    err << "tqp " << command << ": " << e.what() << '\n';
    return kExitUsage;
  } catch (const std::exception& e) {
    err << "tqp " << command << ": " << e.what() << '\n';
    return kExitCheckFailed;
  }

  if (options.out) {
    if (result.csv) {
      std::ofstream csv(*options.out + ".csv", std::ios::binary);
      csv << *result.csv;
      if (!csv) {
        err << "tqp " << command << ": cannot write " << *options.out << ".csv\n";
        return kExitUsage;
      }
    }
    std::ofstream doc(*options.out + ".json", std::ios::binary);
    doc << result.document.dump(2) << '\n';
    if (!doc) {
      err << "tqp " << command << ": cannot write " << *options.out << ".json\n";
      return kExitUsage;
    }
  } else {
    out << result.document.dump(2) << '\n';
  }
  if (!result.passed) {
    err << "tqp " << command << ": checks failed\n";
    return kExitCheckFailed;
  }
  return kExitOk;
}

}  // namespace tqp::cli
