#include "patchforge/config.hpp"

#include "patchforge/serialize.hpp"

#include <cctype>
#include <charconv>
#include <cmath>
#include <cstdlib>
#include <fstream>
#include <functional>
#include <limits>
#include <sstream>

namespace patchforge {

using nlohmann::json;

namespace {

std::string trim(const std::string& s) {
  const auto b = s.find_first_not_of(" \t\r");
  if (b == std::string::npos) return "";
  const auto e = s.find_last_not_of(" \t\r");
  return s.substr(b, e - b + 1);
}

std::string strip_comment(const std::string& line) {
  bool quoted = false;
  for (std::size_t i = 0; i < line.size(); ++i) {
    if (line[i] == '"') quoted = !quoted;
    if (line[i] == '#' && !quoted) return line.substr(0, i);
  }
  return line;
}

double parse_number(const std::string& tok, int line) {
  char* end = nullptr;
  const double v = std::strtod(tok.c_str(), &end);
  if (tok.empty() || end != tok.c_str() + tok.size())
    throw InputError("config line " + std::to_string(line) + ": not a number: " + tok);
  return v;
}

ConfigValue parse_value(const std::string& raw, int line) {
  ConfigValue v;
  if (raw.empty()) throw InputError("config line " + std::to_string(line) + ": missing value");
  if (raw.front() == '"') {
    if (raw.size() < 2 || raw.back() != '"')
      throw InputError("config line " + std::to_string(line) + ": unterminated string");
    v.kind = ConfigValue::Kind::String;
    v.text = raw.substr(1, raw.size() - 2);
  } else if (raw == "true" || raw == "false") {
    v.kind = ConfigValue::Kind::Bool;
    v.boolean = raw == "true";
    v.text = raw;
  } else if (raw.front() == '[') {
    if (raw.back() != ']') throw InputError("config line " + std::to_string(line) + ": unterminated array");
    v.kind = ConfigValue::Kind::Array;
    std::stringstream ss(raw.substr(1, raw.size() - 2));
    std::string item;
    while (std::getline(ss, item, ',')) {
      item = trim(item);
      if (!item.empty()) v.array.push_back(parse_number(item, line));
    }
    v.text = raw;
  } else {
    v.kind = ConfigValue::Kind::Number;
    v.number = parse_number(raw, line);
    v.text = raw;
  }
  return v;
}

std::string fmt(double v) {
  char buf[40];
  const auto r = std::to_chars(buf, buf + sizeof buf, v);
  return std::string(buf, r.ptr);
}

std::string quote(const std::string& s) { return "\"" + s + "\""; }

class Reader {
 public:
  explicit Reader(const ConfigTable& t) : table_(t) {}

  void number(const std::string& key, double& out) {
    if (const auto* v = get(key, ConfigValue::Kind::Number)) out = v->number;
  }
  void integer(const std::string& key, int& out) {
    if (const auto* v = get(key, ConfigValue::Kind::Number)) {
      if (v->number != std::floor(v->number) || std::abs(v->number) > std::numeric_limits<int>::max())
        throw InputError("config key " + key + " must be an integer");
      out = static_cast<int>(v->number);
    }
  }
  void u64(const std::string& key, std::uint64_t& out) {
    if (const auto* v = get(key, ConfigValue::Kind::Number)) {
      char* end = nullptr;
      const auto parsed = std::strtoull(v->text.c_str(), &end, 10);
      if (v->text.empty() || v->text.front() == '-' || end != v->text.c_str() + v->text.size())
        throw InputError("config key " + key + " must be an unsigned integer");
      out = parsed;
    }
  }
  void boolean(const std::string& key, bool& out) {
    if (const auto* v = get(key, ConfigValue::Kind::Bool)) out = v->boolean;
  }
  void string(const std::string& key, std::string& out) {
    if (const auto* v = get(key, ConfigValue::Kind::String)) out = v->text;
  }
  void range(const std::string& key, Range& out) {
    if (const auto* v = get(key, ConfigValue::Kind::Array)) {
      if (v->array.size() != 2) throw InputError("config key " + key + " must be [lo, hi]");
      out = {v->array[0], v->array[1]};
    }
  }
  void rgb(const std::string& key, Rgb& out) {
    if (const auto* v = get(key, ConfigValue::Kind::Array)) {
      if (v->array.size() != 3) throw InputError("config key " + key + " must be [r, g, b]");
      out = Rgb(v->array[0], v->array[1], v->array[2]);
    }
  }

  void reject_unknown() const {
    for (const auto& [k, _] : table_)
      if (!seen_.count(k)) throw InputError("unknown config key: " + k);
  }

 private:
  const ConfigValue* get(const std::string& key, ConfigValue::Kind kind) {
    seen_.insert({key, true});
    auto it = table_.find(key);
    if (it == table_.end()) return nullptr;
    if (it->second.kind != kind) throw InputError("config key " + key + " has the wrong type");
    return &it->second;
  }

  const ConfigTable& table_;
  std::map<std::string, bool> seen_;
};

}  // namespace

ConfigTable parse_config_text(const std::string& text) {
  ConfigTable table;
  std::stringstream ss(text);
  std::string line;
  std::string section;
  int lineno = 0;
  while (std::getline(ss, line)) {
    ++lineno;
    line = trim(strip_comment(line));
    if (line.empty()) continue;
    if (line.front() == '[' && line.back() == ']' && line.find('=') == std::string::npos) {
      section = trim(line.substr(1, line.size() - 2));
      if (section.empty()) throw InputError("config line " + std::to_string(lineno) + ": empty section name");
      continue;
    }
    const auto eq = line.find('=');
    if (eq == std::string::npos) throw InputError("config line " + std::to_string(lineno) + ": expected key = value");
    const std::string key = trim(line.substr(0, eq));
    if (key.empty()) throw InputError("config line " + std::to_string(lineno) + ": empty key");
    const std::string full = section.empty() ? key : section + "." + key;
    if (table.count(full)) throw InputError("config line " + std::to_string(lineno) + ": duplicate key " + full);
    table[full] = parse_value(trim(line.substr(eq + 1)), lineno);
  }
  return table;
}

RunConfig config_from_table(const ConfigTable& table, const std::filesystem::path& base_dir) {
  RunConfig cfg;
  Reader r(table);
  r.u64("seed", cfg.attack.seed);
  std::string out = cfg.output_dir.string();
  r.string("output_dir", out);
  cfg.output_dir = out;
  r.integer("jobs", cfg.jobs);

  auto& sw = cfg.attack.swarm;
  r.integer("swarm.alpha", sw.alpha);
  r.integer("swarm.m_max", sw.m_max);
  r.number("swarm.omega", sw.omega);
  r.number("swarm.c1", sw.c1);
  r.number("swarm.c2", sw.c2);
  std::string mode = sw.r_mode == CoefficientMode::Fixed ? "fixed" : "stochastic";
  r.string("swarm.r_mode", mode);
  if (mode == "fixed") sw.r_mode = CoefficientMode::Fixed;
  else if (mode == "stochastic") sw.r_mode = CoefficientMode::Stochastic;
  else throw InputError("swarm.r_mode must be \"stochastic\" or \"fixed\"");
  r.number("swarm.r1", sw.r1);
  r.number("swarm.r2", sw.r2);
  r.boolean("swarm.abort_within_generation", sw.abort_within_generation);
  r.integer("swarm.workers", sw.workers);

  auto& eot = cfg.attack.eot;
  r.integer("eot.n_samples", eot.n_samples);
  r.integer("eot.eval_samples", eot.eval_samples);
  r.range("eot.rotation_deg", eot.rotation_deg);
  r.range("eot.translation", eot.translation);
  r.range("eot.scale", eot.scale);
  r.range("eot.brightness", eot.brightness);
  r.range("eot.downsample", eot.downsample);

  r.number("attack.delta", cfg.delta);
  r.integer("attack.n_vertices", cfg.attack.n_vertices);
  r.integer("attack.k", cfg.attack.grid_k);
  double cold = cfg.attack.cold.value();
  r.number("attack.cold_intensity", cold);
  cfg.attack.cold = ColdIntensity(cold);

  auto& o = cfg.oracle;
  r.string("oracle.kind", o.kind);
  r.string("oracle.endpoint", o.endpoint);
  r.integer("oracle.max_attempts", o.max_attempts);
  r.number("oracle.timeout_s", o.timeout_s);
  r.number("oracle.dark_threshold", o.toy_infrared.dark_threshold);
  r.number("oracle.infrared_saturation", o.toy_infrared.saturation);
  r.rgb("oracle.reference_color", o.toy_visible.reference_color);
  r.number("oracle.color_threshold", o.toy_visible.color_threshold);
  r.number("oracle.visible_saturation", o.toy_visible.saturation);

  std::string ann;
  std::string root;
  r.string("dataset.annotations", ann);
  r.string("dataset.image_root", root);
  auto resolve = [&](const std::string& p) -> std::filesystem::path {
    if (p.empty()) return {};
    std::filesystem::path path(p);
    return path.is_relative() && !base_dir.empty() ? base_dir / path : path;
  };
  cfg.dataset.annotations = resolve(ann);
  cfg.dataset.image_root = resolve(root);
  if (!out.empty() && table.count("output_dir")) cfg.output_dir = resolve(out);

  r.reject_unknown();
  cfg.validate();
  return cfg;
}

void RunConfig::validate() const {
  if (!(delta > 0.0 && delta <= 1.0)) throw InputError("attack.delta must lie in (0,1]");
  default_cells(attack.n_vertices);
  if (attack.grid_k < 1) throw InputError("attack.k must be >= 1");
  if (attack.swarm.alpha < 1 || attack.swarm.m_max < 1) throw InputError("swarm.alpha and swarm.m_max must be >= 1");
  if (attack.swarm.workers < 1) throw InputError("swarm.workers must be >= 1");
  attack.eot.validate();
  if (oracle.kind != "toy" && oracle.kind != "remote") throw InputError("oracle.kind must be toy or remote");
  if (oracle.max_attempts < 1) throw InputError("oracle.max_attempts must be >= 1");
  if (jobs < 1) throw InputError("jobs must be >= 1");
}

RunConfig load_config(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) throw InputError("cannot open config " + path.string());
  std::stringstream ss;
  ss << in.rdbuf();
  return config_from_table(parse_config_text(ss.str()), path.parent_path());
}

std::string to_config_text(const RunConfig& cfg) {
  const auto& sw = cfg.attack.swarm;
  const auto& eot = cfg.attack.eot;
  const auto& o = cfg.oracle;
  auto range = [](const Range& r) { return "[" + fmt(r.lo) + ", " + fmt(r.hi) + "]"; };
  std::ostringstream os;
  os << "seed = " << cfg.attack.seed << "\n"
     << "output_dir = " << quote(cfg.output_dir.string()) << "\n"
     << "jobs = " << cfg.jobs << "\n\n"
     << "[swarm]\n"
     << "alpha = " << sw.alpha << "\n"
     << "m_max = " << sw.m_max << "\n"
     << "omega = " << fmt(sw.omega) << "\n"
     << "c1 = " << fmt(sw.c1) << "\n"
     << "c2 = " << fmt(sw.c2) << "\n"
     << "r_mode = " << quote(sw.r_mode == CoefficientMode::Fixed ? "fixed" : "stochastic") << "\n"
     << "r1 = " << fmt(sw.r1) << "\n"
     << "r2 = " << fmt(sw.r2) << "\n"
     << "abort_within_generation = " << (sw.abort_within_generation ? "true" : "false") << "\n"
     << "workers = " << sw.workers << "\n\n"
     << "[eot]\n"
     << "n_samples = " << eot.n_samples << "\n"
     << "eval_samples = " << eot.eval_samples << "\n"
     << "rotation_deg = " << range(eot.rotation_deg) << "\n"
     << "translation = " << range(eot.translation) << "\n"
     << "scale = " << range(eot.scale) << "\n"
     << "brightness = " << range(eot.brightness) << "\n"
     << "downsample = " << range(eot.downsample) << "\n\n"
     << "[attack]\n"
     << "delta = " << fmt(cfg.delta) << "\n"
     << "n_vertices = " << cfg.attack.n_vertices << "\n"
     << "k = " << cfg.attack.grid_k << "\n"
     << "cold_intensity = " << fmt(cfg.attack.cold.value()) << "\n\n"
     << "[oracle]\n"
     << "kind = " << quote(o.kind) << "\n"
     << "endpoint = " << quote(o.endpoint) << "\n"
     << "max_attempts = " << o.max_attempts << "\n"
     << "timeout_s = " << fmt(o.timeout_s) << "\n"
     << "dark_threshold = " << fmt(o.toy_infrared.dark_threshold) << "\n"
     << "infrared_saturation = " << fmt(o.toy_infrared.saturation) << "\n"
     << "reference_color = [" << fmt(o.toy_visible.reference_color[0]) << ", "
     << fmt(o.toy_visible.reference_color[1]) << ", " << fmt(o.toy_visible.reference_color[2]) << "]\n"
     << "color_threshold = " << fmt(o.toy_visible.color_threshold) << "\n"
     << "visible_saturation = " << fmt(o.toy_visible.saturation) << "\n\n"
     << "[dataset]\n"
     << "annotations = " << quote(cfg.dataset.annotations.string()) << "\n"
     << "image_root = " << quote(cfg.dataset.image_root.string()) << "\n";
  return os.str();
}

json config_to_json(const RunConfig& cfg) {
  const auto& o = cfg.oracle;
  return {{"seed", cfg.attack.seed},
          {"jobs", cfg.jobs},
          {"swarm", swarm_to_json(cfg.attack.swarm)},
          {"eot", eot_to_json(cfg.attack.eot)},
          {"attack",
           {{"delta", cfg.delta},
            {"n_vertices", cfg.attack.n_vertices},
            {"k", cfg.attack.grid_k},
            {"cold_intensity", cfg.attack.cold.value()}}},
          {"oracle",
           {{"kind", o.kind},
            {"endpoint", o.endpoint},
            {"max_attempts", o.max_attempts},
            {"timeout_s", o.timeout_s},
            {"dark_threshold", o.toy_infrared.dark_threshold},
            {"infrared_saturation", o.toy_infrared.saturation},
            {"reference_color",
             {o.toy_visible.reference_color[0], o.toy_visible.reference_color[1], o.toy_visible.reference_color[2]}},
            {"color_threshold", o.toy_visible.color_threshold},
            {"visible_saturation", o.toy_visible.saturation}}},
          {"dataset",
           {{"annotations", cfg.dataset.annotations.string()}, {"image_root", cfg.dataset.image_root.string()}}}};
}

void apply_environment(RunConfig& cfg) {
  if (const char* ep = std::getenv("PATCHFORGE_ENDPOINT"); ep && *ep) cfg.oracle.endpoint = ep;
}

}  // namespace patchforge
