#include <algorithm>
#include <fstream>
#include <limits>
#include <iterator>
#include <sstream>

#include <fmt/core.h>
#include <json.hpp>

#include "esaloha/error.hpp"
#include "esaloha/lab.hpp"

namespace esaloha {

namespace {

using nlohmann::json;

std::size_t line_of(const std::string& text, std::size_t byte) {
  byte = std::min(byte, text.size());
  return 1 + static_cast<std::size_t>(std::count(text.begin(), text.begin() + byte, '\n'));
}

class FieldReader {
 public:
  explicit FieldReader(std::string_view source) : source_(source) {}

  [[noreturn]] void fail(std::string_view field, std::string_view message) const {
    throw ConfigError(fmt::format("{}: field '{}': {}", source_, field, message));
  }

  void only_keys(const json& object, std::string_view where,
                 std::initializer_list<std::string_view> allowed) const {
    for (const auto& [key, value] : object.items()) {
      if (std::find(allowed.begin(), allowed.end(), key) == allowed.end())
        fail(where.empty() ? key : fmt::format("{}.{}", where, key), "unknown field");
    }
  }

  double number(const json& object, std::string_view field, std::string_view path) const {
    const auto it = object.find(field);
    if (it == object.end()) fail(path, "missing required field");
    if (!it->is_number()) fail(path, "expected a number");
    return it->get<double>();
  }

  std::uint64_t count(const json& value, std::string_view path) const {
    if (!value.is_number_integer() || (value.is_number_integer() && !value.is_number_unsigned() &&
                                       value.get<std::int64_t>() < 0))
      fail(path, "expected a non-negative integer");
    return value.get<std::uint64_t>();
  }

 private:
  std::string_view source_;
};

}  // namespace

ScenarioConfig parse_config(std::istream& in, std::string_view source) {
  const std::string text{std::istreambuf_iterator<char>(in), std::istreambuf_iterator<char>()};
  json doc;
  try {
    doc = json::parse(text);
  } catch (const json::parse_error& e) {
    throw ConfigError(fmt::format("{}:{}: malformed document: {}", source, line_of(text, e.byte),
                                  e.what()));
  }
  const FieldReader read(source);
  if (!doc.is_object()) read.fail("<root>", "expected an object");
  read.only_keys(doc, "", {"description", "c1", "c2", "energy_budgets", "labels", "sim", "solver"});

  ScenarioConfig cfg;
  cfg.system.c1 = read.number(doc, "c1", "c1");
  cfg.system.c2 = read.number(doc, "c2", "c2");

  const auto budgets = doc.find("energy_budgets");
  if (budgets == doc.end()) read.fail("energy_budgets", "missing required field");
  if (!budgets->is_array()) read.fail("energy_budgets", "expected an array of numbers");
  if (budgets->empty()) read.fail("energy_budgets", "must list at least one user");
  for (std::size_t i = 0; i < budgets->size(); ++i) {
    const auto& v = (*budgets)[i];
    if (!v.is_number()) read.fail(fmt::format("energy_budgets[{}]", i), "expected a number");
    cfg.system.energy_budgets.push_back(v.get<double>());
  }

  try {
    cfg.system.validate();
  } catch (const ConfigError& e) {
    throw ConfigError(fmt::format("{}: {}", source, e.what()));
  }

  if (const auto labels = doc.find("labels"); labels != doc.end()) {
    if (!labels->is_array() || labels->size() != cfg.system.size())
      read.fail("labels", fmt::format("expected an array of {} strings", cfg.system.size()));
    for (std::size_t i = 0; i < labels->size(); ++i) {
      if (!(*labels)[i].is_string()) read.fail(fmt::format("labels[{}]", i), "expected a string");
      cfg.labels.push_back((*labels)[i].get<std::string>());
    }
  } else {
    for (std::size_t i = 0; i < cfg.system.size(); ++i) cfg.labels.push_back(fmt::format("u{}", i + 1));
  }

  if (const auto sim = doc.find("sim"); sim != doc.end()) {
    if (!sim->is_object()) read.fail("sim", "expected an object");
    read.only_keys(*sim, "sim", {"frames", "slots_per_frame", "seed"});
    if (sim->contains("frames")) cfg.sim.frames = read.count(sim->at("frames"), "sim.frames");
    if (sim->contains("slots_per_frame")) {
      const auto slots = read.count(sim->at("slots_per_frame"), "sim.slots_per_frame");
      if (slots > std::numeric_limits<std::uint32_t>::max()) read.fail("sim.slots_per_frame", "too large");
      cfg.sim.slots_per_frame = static_cast<std::uint32_t>(slots);
    }
    if (sim->contains("seed")) cfg.sim.seed = read.count(sim->at("seed"), "sim.seed");
    if (cfg.sim.frames < 1) read.fail("sim.frames", "must be >= 1");
    if (cfg.sim.slots_per_frame < 1) read.fail("sim.slots_per_frame", "must be >= 1");
  }

  if (const auto solver = doc.find("solver"); solver != doc.end()) {
    if (!solver->is_object()) read.fail("solver", "expected an object");
    read.only_keys(*solver, "solver", {"tol", "max_iter", "n_guard_override"});
    if (solver->contains("tol")) {
      cfg.solver.tol = read.number(*solver, "tol", "solver.tol");
      if (!(cfg.solver.tol > 0.0)) read.fail("solver.tol", "must be > 0");
    }
    if (solver->contains("max_iter")) {
      cfg.solver.max_iter = read.count(solver->at("max_iter"), "solver.max_iter");
      if (cfg.solver.max_iter < 1) read.fail("solver.max_iter", "must be >= 1");
    }
    if (solver->contains("n_guard_override")) {
      const auto& flag = solver->at("n_guard_override");
      if (!flag.is_boolean()) read.fail("solver.n_guard_override", "expected true or false");
      cfg.solver.n_guard_override = flag.get<bool>();
    }
  }
  return cfg;
}

ScenarioConfig parse_config_file(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) throw IoError(fmt::format("cannot open config file {}", path.string()));
  return parse_config(in, path.string());
}

}  // namespace esaloha
