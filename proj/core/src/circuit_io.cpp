#include <fstream>
#include <sstream>

#include <json.hpp>

#include "tqp/msuqc.hpp"

namespace tqp {

namespace {

using nlohmann::json;

void reject_unknown(const json& obj, std::initializer_list<const char*> allowed, const std::string& where) {
  for (const auto& [key, value] : obj.items()) {
    bool ok = false;
    for (const char* a : allowed) ok = ok || key == a;
    if (!ok) throw CircuitError(where + ": unknown key '" + key + "'");
  }
}

std::vector<double> angle_list(const json& step, const char* key, std::size_t s) {
  if (!step.contains(key)) throw CircuitError("step " + std::to_string(s) + ": missing '" + key + "'");
  const json& v = step.at(key);
  if (!v.is_array()) throw CircuitError("step " + std::to_string(s) + ": '" + key + "' must be an array");
  std::vector<double> out;
  for (const auto& x : v) {
    if (!x.is_number()) throw CircuitError("step " + std::to_string(s) + ": angles must be numbers");
    out.push_back(x.get<double>());
  }
  return out;
}

}  // namespace

LogicalCircuit parse_circuit_json(const std::string& text) {
  json doc;
  try {
    doc = json::parse(text);
  } catch (const json::parse_error& e) {
    throw CircuitError(std::string("circuit file: ") + e.what());
  }
  if (!doc.is_object()) throw CircuitError("circuit file: top level must be an object");
  reject_unknown(doc, {"version", "qubits", "steps"}, "circuit file");
  if (doc.value("version", 1) != 1) throw CircuitError("circuit file: unsupported version");
  if (!doc.contains("qubits") || !doc["qubits"].is_number_unsigned()) {
    throw CircuitError("circuit file: 'qubits' must be a positive integer");
  }
  LogicalCircuit c;
  c.qubits = doc["qubits"].get<std::size_t>();
  if (doc.contains("steps")) {
    if (!doc["steps"].is_array()) throw CircuitError("circuit file: 'steps' must be an array");
    std::size_t s = 0;
    for (const auto& step : doc["steps"]) {
      if (!step.is_object()) throw CircuitError("step " + std::to_string(s) + ": must be an object");
      reject_unknown(step, {"phi", "theta", "gamma"}, "step " + std::to_string(s));
      CircuitStep st;
      st.phi = angle_list(step, "phi", s);
      st.theta = angle_list(step, "theta", s);
      st.gamma = step.contains("gamma") ? angle_list(step, "gamma", s) : std::vector<double>{};
      c.steps.push_back(std::move(st));
      ++s;
    }
  }
  c.validate();
  return c;
}

std::string circuit_to_json(const LogicalCircuit& circuit) {
  json doc;
  doc["version"] = 1;
  doc["qubits"] = circuit.qubits;
  doc["steps"] = json::array();
  for (const auto& st : circuit.steps) {
    doc["steps"].push_back({{"phi", st.phi}, {"theta", st.theta}, {"gamma", st.gamma}});
  }
  return doc.dump(2);
}

LogicalCircuit load_circuit(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw CircuitError("cannot open circuit file " + path);
  std::ostringstream ss;
  ss << in.rdbuf();
  return parse_circuit_json(ss.str());
}

void save_circuit(const LogicalCircuit& circuit, const std::string& path) {
  std::ofstream out(path);
  if (!out) throw CircuitError("cannot write circuit file " + path);
  out << circuit_to_json(circuit) << '\n';
}

}  // namespace tqp
