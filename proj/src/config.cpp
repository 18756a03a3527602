#include "treebandit/config.hpp"

#include <fstream>
#include <sstream>

#include "treebandit/errors.hpp"

namespace treebandit {

namespace {

std::string trim(const std::string& s) {
  std::size_t a = s.find_first_not_of(" \t\r");
  if (a == std::string::npos) return "";
  std::size_t b = s.find_last_not_of(" \t\r");
  return s.substr(a, b - a + 1);
}

struct Cursor {
  std::string origin;
  std::size_t line = 0;

  [[noreturn]] void fail(const std::string& msg) const {
    throw ConfigError(origin + " line " + std::to_string(line) + ": " + msg);
  }
};

long long parse_int(const std::string& v, const Cursor& at) {
  try {
    std::size_t pos = 0;
    long long x = std::stoll(v, &pos);
    if (pos != v.size()) throw std::invalid_argument("trailing");
    return x;
  } catch (const std::exception&) {
    at.fail("expected an integer, got '" + v + "'");
  }
}

double parse_double(const std::string& v, const Cursor& at) {
  try {
    std::size_t pos = 0;
    double x = std::stod(v, &pos);
    if (pos != v.size()) throw std::invalid_argument("trailing");
    return x;
  } catch (const std::exception&) {
    at.fail("expected a number, got '" + v + "'");
  }
}

template <typename T, typename Parse>
std::vector<T> parse_list(const std::string& v, const Cursor& at, Parse parse) {
  std::vector<T> out;
  std::stringstream ss(v);
  std::string part;
  while (std::getline(ss, part, ',')) out.push_back(parse(trim(part), at));
  if (out.empty()) at.fail("expected a comma-separated list");
  return out;
}

}  // namespace

ExperimentConfig parse_config(std::istream& in, const std::string& origin) {
  ExperimentConfig config;
  config.policies.clear();
  config.seeds.clear();

  Cursor at{origin, 0};
  std::string section;
  PolicySpec* policy = nullptr;
  bool saw_seeds = false;

  std::string raw;
  while (std::getline(in, raw)) {
    ++at.line;
    std::string line = raw;
    if (std::size_t hash = line.find('#'); hash != std::string::npos) line.resize(hash);
    line = trim(line);
    if (line.empty()) continue;

    if (line.front() == '[') {
      if (line.back() != ']') at.fail("unterminated section header");
      section = trim(line.substr(1, line.size() - 2));
      policy = nullptr;
      if (section.rfind("policy.", 0) == 0) {
        std::string name = section.substr(7);
        if (name.empty()) at.fail("policy section needs a name: [policy.NAME]");
        config.policies.emplace_back();
        policy = &config.policies.back();
        policy->name = name;
      } else if (section != "world" && section != "tree" && section != "run" &&
                 section != "report") {
        at.fail("unknown section [" + section + "]");
      }
      continue;
    }

    std::size_t eq = line.find('=');
    if (eq == std::string::npos) at.fail("expected key = value");
    std::string key = trim(line.substr(0, eq));
    std::string value = trim(line.substr(eq + 1));
    if (key.empty() || value.empty()) at.fail("expected key = value");

    if (section == "world") {
      if (key == "kind") {
        if (value == "generate") config.world.kind = WorldSpec::Kind::Generate;
        else if (value == "import") config.world.kind = WorldSpec::Kind::Import;
        else at.fail("world kind must be generate or import");
      } else if (key == "users") config.world.num_users = static_cast<int>(parse_int(value, at));
      else if (key == "items") config.world.num_items = static_cast<int>(parse_int(value, at));
      else if (key == "dimension") config.world.dimension = static_cast<int>(parse_int(value, at));
      else if (key == "blobs") config.world.num_blobs = static_cast<int>(parse_int(value, at));
      else if (key == "embeddings") config.world.item_file = value;
      else if (key == "user_vectors") config.world.user_file = value;
      else if (key == "labels") config.world.label_file = value;
      else if (key == "reward_scale") config.world.model.scale = parse_double(value, at);
      else if (key == "reward_bias") config.world.model.bias = parse_double(value, at);
      else if (key == "noise_sigma") config.world.model.noise_sigma = parse_double(value, at);
      else at.fail("unknown key '" + key + "' in [world]");
    } else if (section == "tree") {
      if (key == "level_sizes")
        config.level_sizes = parse_list<int>(value, at, [](const std::string& s, const Cursor& c) {
          return static_cast<int>(parse_int(s, c));
        });
      else if (key == "max_iter") config.kmeans_max_iter = static_cast<int>(parse_int(value, at));
      else if (key == "file") config.tree_file = value;
      else at.fail("unknown key '" + key + "' in [tree]");
    } else if (section == "run") {
      if (key == "rounds") config.rounds = static_cast<int>(parse_int(value, at));
      else if (key == "budget") config.budget = static_cast<int>(parse_int(value, at));
      else if (key == "q") config.q = parse_double(value, at);
      else if (key == "p") config.p = parse_double(value, at);
      else if (key == "seeds") {
        config.seeds = parse_list<std::uint64_t>(
            value, at, [](const std::string& s, const Cursor& c) {
              long long x = parse_int(s, c);
              if (x < 0) c.fail("seeds must be non-negative");
              return static_cast<std::uint64_t>(x);
            });
        saw_seeds = true;
      } else if (key == "out") config.out_dir = value;
      else at.fail("unknown key '" + key + "' in [run]");
    } else if (section == "report") {
      if (key == "checkpoints")
        config.checkpoints = parse_list<int>(value, at, [](const std::string& s, const Cursor& c) {
          return static_cast<int>(parse_int(s, c));
        });
      else at.fail("unknown key '" + key + "' in [report]");
    } else if (policy != nullptr) {
      if (key == "kind") policy->kind = policy_kind_from(value);
      else if (key == "estimator") policy->estimator.kind = estimator_kind_from(value);
      else if (key == "alpha") policy->estimator.alpha = parse_double(value, at);
      else if (key == "v") policy->estimator.v = parse_double(value, at);
      else if (key == "epsilon") policy->estimator.epsilon = parse_double(value, at);
      else at.fail("unknown key '" + key + "' in [policy." + policy->name + "]");
    } else {
      at.fail("key '" + key + "' outside of any section");
    }
  }

  if (!saw_seeds) config.seeds = {1, 2, 3, 4, 5, 6, 7, 8, 9, 10};
  return config;
}

ExperimentConfig load_config(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw ConfigError("cannot open config file " + path);
  return parse_config(in, path);
}

}  // namespace treebandit
