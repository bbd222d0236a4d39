#include "lqsplit/config.hpp"

#include <fstream>
#include <sstream>

#include <yaml-cpp/yaml.h>

#include "lqsplit/errors.hpp"

namespace lqsplit {

namespace {

template <typename T>
T scalar_as(const YAML::Node& node, const std::string& key) {
  try {
    return node.as<T>();
  } catch (const YAML::Exception&) {
    throw ConfigError("config: '" + key + "' has the wrong type");
  }
}

Matrix read_matrix(const YAML::Node& node, const std::string& key) {
  if (!node.IsSequence() || node.size() == 0) {
    throw ConfigError("config: '" + key + "' must be a non-empty list of rows");
  }
  const auto rows = static_cast<Index>(node.size());
  const auto cols = static_cast<Index>(node[0].IsSequence() ? node[0].size() : 0);
  if (cols == 0) {
    throw ConfigError("config: '" + key + "' rows must be non-empty lists");
  }
  Matrix m(rows, cols);
  for (Index i = 0; i < rows; ++i) {
    const YAML::Node row = node[static_cast<std::size_t>(i)];
    if (!row.IsSequence() || static_cast<Index>(row.size()) != cols) {
      throw ConfigError("config: '" + key + "' rows have unequal lengths");
    }
    for (Index j = 0; j < cols; ++j) {
      m(i, j) = scalar_as<double>(row[static_cast<std::size_t>(j)], key);
    }
  }
  return m;
}

Vector read_vector(const YAML::Node& node, const std::string& key) {
  if (node.IsScalar()) {
    return Vector::Constant(1, scalar_as<double>(node, key));
  }
  if (!node.IsSequence() || node.size() == 0) {
    throw ConfigError("config: '" + key + "' must be a number or a non-empty list");
  }
  Vector v(static_cast<Index>(node.size()));
  for (std::size_t i = 0; i < node.size(); ++i) {
    v(static_cast<Index>(i)) = scalar_as<double>(node[i], key);
  }
  return v;
}

TimeFunction read_time_function(const YAML::Node& node, const std::string& key) {
  if (node.IsScalar()) {
    return TimeFunction::constant(scalar_as<double>(node, key));
  }
  if (!node.IsMap() || !node["kind"]) {
    throw ConfigError("config: '" + key + "' must be a number or a map with 'kind'");
  }
  const auto kind = scalar_as<std::string>(node["kind"], key + ".kind");
  auto field = [&](const char* name, double fallback) {
    return node[name] ? scalar_as<double>(node[name], key + "." + name) : fallback;
  };
  if (kind == "constant") {
    if (!node["value"]) {
      throw ConfigError("config: '" + key + "' constant needs 'value'");
    }
    return TimeFunction::constant(field("value", 0.0));
  }
  if (kind == "tanh-ramp") {
    return TimeFunction::tanh_ramp(field("base", 0.0), field("amplitude", 1.0),
                                   field("rate", 1.0), field("center", 0.0));
  }
  throw ConfigError("config: '" + key + "' has unknown kind '" + kind +
                    "', expected constant|tanh-ramp");
}

std::vector<double> read_weights(const YAML::Node& node, std::size_t players,
                                 const std::string& key) {
  if (node.IsMap()) {
    const double offset = node["offset"] ? scalar_as<double>(node["offset"], key) : 0.0;
    const double scale = node["scale"] ? scalar_as<double>(node["scale"], key) : 1.0;
    return linear_generator(players, offset, scale);
  }
  if (node.IsScalar()) {
    return std::vector<double>(players, scalar_as<double>(node, key));
  }
  const Vector v = read_vector(node, key);
  return {v.data(), v.data() + v.size()};
}

PollutionConfig read_pollution(const YAML::Node& root) {
  PollutionConfig cfg;
  if (root["preset"]) {
    cfg = pollution_preset(scalar_as<std::string>(root["preset"], "preset"));
  }
  const YAML::Node p = root["pollution"];
  if (!p) {
    return cfg;
  }
  if (!p.IsMap()) {
    throw ConfigError("config: 'pollution' must be a map");
  }
  bool players_changed = false;
  if (p["players"]) {
    const auto n = scalar_as<long>(p["players"], "pollution.players");
    if (n < 1) {
      throw ConfigError("config: 'pollution.players' must be at least 1");
    }
    players_changed = static_cast<std::size_t>(n) != cfg.players;
    cfg.players = static_cast<std::size_t>(n);
  }
  if (p["a"]) {
    cfg.a = read_time_function(p["a"], "pollution.a");
  }
  if (p["b"]) {
    cfg.b = read_time_function(p["b"], "pollution.b");
  }
  if (p["c"]) {
    cfg.c = read_weights(p["c"], cfg.players, "pollution.c");
  } else if (players_changed || cfg.c.empty()) {
    cfg.c = linear_generator(cfg.players, 10.0, 0.5);
  }
  const YAML::Node d = p["d"];
  if (!d || (d.IsScalar() && d.Scalar() == "reciprocal")) {
    cfg.d.resize(cfg.c.size());
    for (std::size_t i = 0; i < cfg.c.size(); ++i) {
      cfg.d[i] = 1.0 / cfg.c[i];
    }
  } else {
    cfg.d = read_weights(d, cfg.players, "pollution.d");
  }
  if (p["rho"]) {
    cfg.rho = scalar_as<double>(p["rho"], "pollution.rho");
  }
  if (p["horizon"]) {
    cfg.T = scalar_as<double>(p["horizon"], "pollution.horizon");
  }
  if (p["x0"]) {
    cfg.x0 = scalar_as<double>(p["x0"], "pollution.x0");
  }
  return cfg;
}

GameProblem read_lq(const YAML::Node& node) {
  if (!node.IsMap()) {
    throw ConfigError("config: 'lq' must be a map");
  }
  for (const char* key : {"A", "B", "Q", "R", "x0"}) {
    if (!node[key]) {
      throw ConfigError(std::string("config: 'lq.") + key + "' is required");
    }
  }
  GameProblem g;
  const Matrix A = read_matrix(node["A"], "lq.A");
  g.A = TimeMatrix::constant(A);
  Player p;
  p.B = TimeMatrix::constant(read_matrix(node["B"], "lq.B"));
  p.Q = TimeMatrix::constant(read_matrix(node["Q"], "lq.Q"));
  p.R = TimeMatrix::constant(read_matrix(node["R"], "lq.R"));
  p.QT = node["QT"] ? read_matrix(node["QT"], "lq.QT") : Matrix::Zero(A.rows(), A.rows());
  g.players.push_back(std::move(p));
  g.x0 = read_vector(node["x0"], "lq.x0");
  g.t0 = node["t0"] ? scalar_as<double>(node["t0"], "lq.t0") : 0.0;
  g.T = node["T"] ? scalar_as<double>(node["T"], "lq.T") : 1.0;
  return g;
}

}  // namespace

LoadedProblem parse_problem(std::string_view text) {
  YAML::Node root;
  try {
    root = YAML::Load(std::string(text));
  } catch (const YAML::Exception& e) {
    throw ConfigError(std::string("config: ") + e.what());
  }
  if (!root.IsMap()) {
    throw ConfigError("config: top level must be a map");
  }
  const bool has_lq = static_cast<bool>(root["lq"]);
  const bool has_pollution = root["pollution"] || root["preset"];
  if (has_lq == has_pollution) {
    throw ConfigError("config: give exactly one of 'lq' or 'pollution'/'preset'");
  }
  LoadedProblem out;
  if (has_lq) {
    out.game = read_lq(root["lq"]);
    if (out.game.A.is_constant()) {
      out.dominant = out.game.A(out.game.t0);
    }
  } else {
    out.pollution = read_pollution(root);
    out.game = build_pollution(*out.pollution);
    out.dominant = pollution_dominant(*out.pollution);
  }
  if (root["dominant"]) {
    out.dominant = read_matrix(root["dominant"], "dominant");
  }
  validate(out.game);
  return out;
}

LoadedProblem load_problem(const std::string& path) {
  std::ifstream f(path, std::ios::binary);
  if (!f) {
    throw ConfigError("config: cannot open " + path);
  }
  std::ostringstream ss;
  ss << f.rdbuf();
  try {
    return parse_problem(ss.str());
  } catch (const ConfigError& e) {
    throw ConfigError(path + ": " + e.what());
  }
}

}  // namespace lqsplit
