#include "rssdgeo/scenario_io.hpp"

#include <cmath>
#include <fstream>
#include <sstream>

#include <json.hpp>

#include "rssdgeo/error.hpp"

namespace rssdgeo {

namespace {

using nlohmann::json;

constexpr double kDegToRad = std::numbers::pi / 180.0;

std::string line_context(std::string_view text, std::size_t byte) {
  std::size_t line = 1, col = 1;
  for (std::size_t i = 0; i < byte && i < text.size(); ++i) {
    if (text[i] == '\n') {
      ++line;
      col = 1;
    } else {
      ++col;
    }
  }
  return "line " + std::to_string(line) + ", column " + std::to_string(col);
}

const json& field(const json& obj, const char* key, const std::string& path) {
  auto it = obj.find(key);
  if (it == obj.end()) throw ConfigError(path + key, "missing required field");
  return *it;
}

double number(const json& value, const std::string& path) {
  if (!value.is_number()) throw ConfigError(path, "expected a number");
  const double v = value.get<double>();
  if (!std::isfinite(v)) throw ConfigError(path, "must be finite");
  return v;
}

double number_field(const json& obj, const char* key, const std::string& prefix) {
  return number(field(obj, key, prefix), prefix + key);
}

}  // namespace

ScenarioDocument parse_scenario(std::string_view json_text) {
  json root;
  try {
    root = json::parse(json_text.begin(), json_text.end());
  } catch (const json::parse_error& e) {
    throw ConfigError("", "malformed JSON at " + line_context(json_text, e.byte > 0 ? e.byte - 1 : 0) +
                              ": " + e.what());
  }
  if (!root.is_object()) throw ConfigError("", "top level must be a JSON object");

  ScenarioDocument doc;
  Scenario& s = doc.scenario;

  const json& source = field(root, "source", "");
  if (source.is_object()) {
    s.source = {number_field(source, "x", "source."), number_field(source, "y", "source."), 0.0};
    if (source.contains("p0")) doc.p0 = number(source["p0"], "source.p0");
  } else if (source.is_array() && (source.size() == 2 || source.size() == 3)) {
    s.source = {number(source[0], "source[0]"), number(source[1], "source[1]"), 0.0};
    if (source.size() == 3 && number(source[2], "source[2]") != 0.0)
      throw ConfigError("source[2]", "source height must be 0");
  } else {
    throw ConfigError("source", "expected {\"x\",\"y\"} object or [x, y] array");
  }

  s.gamma = number_field(root, "gamma", "");
  if (s.gamma <= 0.0) throw ConfigError("gamma", "must be > 0");

  const json& sensors = field(root, "sensors", "");
  if (!sensors.is_array() || sensors.empty())
    throw ConfigError("sensors", "expected a non-empty array");
  const auto n = static_cast<Eigen::Index>(sensors.size());
  s.horiz_dist.resize(n);
  s.vert_dist.resize(n);
  s.noise_std.resize(n);
  for (Eigen::Index i = 0; i < n; ++i) {
    const std::string at = "sensors[" + std::to_string(i) + "].";
    const json& item = sensors[static_cast<std::size_t>(i)];
    if (!item.is_object()) throw ConfigError(at.substr(0, at.size() - 1), "expected an object");
    s.horiz_dist(i) = number_field(item, "r", at);
    if (s.horiz_dist(i) <= 0.0) throw ConfigError(at + "r", "must be > 0");
    s.vert_dist(i) = number_field(item, "h", at);
    if (s.vert_dist(i) < 0.0) throw ConfigError(at + "h", "must be >= 0");
    const bool has_sigma = item.contains("sigma");
    const bool has_var = item.contains("sigma2");
    if (has_sigma == has_var)
      throw ConfigError(at + "sigma", "give exactly one of \"sigma\" or \"sigma2\"");
    if (has_sigma) {
      s.noise_std(i) = number_field(item, "sigma", at);
      if (s.noise_std(i) <= 0.0) throw ConfigError(at + "sigma", "must be > 0");
    } else {
      const double var = number_field(item, "sigma2", at);
      if (var <= 0.0) throw ConfigError(at + "sigma2", "must be > 0");
      s.noise_std(i) = std::sqrt(var);
    }
  }

  if (root.contains("samples_per_position")) {
    const json& m = root["samples_per_position"];
    if (!m.is_number_integer() || m.get<long long>() < 1)
      throw ConfigError("samples_per_position", "must be a positive integer");
    s.samples_per_position = static_cast<int>(m.get<long long>());
  }

  const double beta_deg = number_field(root, "beta_max_deg", "");
  if (!(beta_deg > 0.0 && beta_deg <= 360.0))
    throw ConfigError("beta_max_deg", "must lie in (0, 360]");
  s.beta_max = beta_deg == 360.0 ? kTwoPi : beta_deg * kDegToRad;

  if (root.contains("variant")) {
    const json& v = root["variant"];
    const std::string name = v.is_string() ? v.get<std::string>() : "";
    if (name == "RSSD" || name == "rssd")
      s.variant = Variant::Rssd;
    else if (name == "RSS" || name == "rss")
      s.variant = Variant::Rss;
    else
      throw ConfigError("variant", "must be \"RSSD\" or \"RSS\"");
  }

  try {
    s.validate();
  } catch (const InvalidArgument& e) {
    throw ConfigError("", e.what());
  }
  return doc;
}

ScenarioDocument load_scenario(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) throw ConfigError("", "cannot open scenario file '" + path.string() + "'");
  std::ostringstream buf;
  buf << in.rdbuf();
  return parse_scenario(buf.str());
}

std::string to_json(const ScenarioDocument& doc) {
  const Scenario& s = doc.scenario;
  json root;
  root["source"] = {{"x", s.source.x()}, {"y", s.source.y()}, {"p0", doc.p0}};
  root["gamma"] = s.gamma;
  json sensors = json::array();
  for (Eigen::Index i = 0; i < s.horiz_dist.size(); ++i)
    sensors.push_back({{"r", s.horiz_dist(i)}, {"h", s.vert_dist(i)}, {"sigma", s.noise_std(i)}});
  root["sensors"] = std::move(sensors);
  root["samples_per_position"] = s.samples_per_position;
  root["beta_max_deg"] = s.beta_max / kDegToRad;
  root["variant"] = s.variant == Variant::Rssd ? "RSSD" : "RSS";
  return root.dump();
}

std::uint64_t scenario_hash(const ScenarioDocument& doc) {
  std::uint64_t h = 0xcbf29ce484222325ULL;
  for (unsigned char c : to_json(doc)) {
    h ^= c;
    h *= 0x100000001b3ULL;
  }
  return h;
}

}  // namespace rssdgeo
