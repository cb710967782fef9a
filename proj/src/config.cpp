#include "obmimo/config.hpp"

#include <algorithm>
#include <cctype>
#include <cstdlib>
#include <fstream>
#include <sstream>

#include "obmimo/errors.hpp"

namespace obmimo::config {

namespace {

struct Value {
  enum class Kind { Number, String, Bool, Array } kind = Kind::Number;
  double num = 0.0;
  bool is_integer = false;
  std::uint64_t uint_val = 0;
  std::string str;
  std::vector<Value> items;
  int line = 0;
};

std::string trim(const std::string& s) {
  std::size_t b = s.find_first_not_of(" \t\r\n");
  if (b == std::string::npos) return "";
  std::size_t e = s.find_last_not_of(" \t\r\n");
  return s.substr(b, e - b + 1);
}

std::string lower(std::string s) {
  std::transform(s.begin(), s.end(), s.begin(),
                 [](unsigned char c) { return static_cast<char>(std::tolower(c)); });
  return s;
}

// Strips a '#' comment that is not inside a quoted string.
std::string strip_comment(const std::string& line) {
  bool in_str = false;
  for (std::size_t i = 0; i < line.size(); ++i) {
    if (line[i] == '"') in_str = !in_str;
    if (line[i] == '#' && !in_str) return line.substr(0, i);
  }
  return line;
}

Value parse_scalar(const std::string& raw, int line) {
  Value v;
  v.line = line;
  const std::string s = trim(raw);
  if (s.empty()) throw ConfigError("line " + std::to_string(line) + ": empty value");
  if (s.front() == '"') {
    if (s.size() < 2 || s.back() != '"')
      throw ConfigError("line " + std::to_string(line) + ": unterminated string");
    v.kind = Value::Kind::String;
    v.str = s.substr(1, s.size() - 2);
    return v;
  }
  const std::string ls = lower(s);
  if (ls == "true" || ls == "false") {
    v.kind = Value::Kind::Bool;
    v.num = ls == "true" ? 1.0 : 0.0;
    return v;
  }
  char* end = nullptr;
  v.num = std::strtod(s.c_str(), &end);
  if (end == nullptr || *end != '\0')
    throw ConfigError("line " + std::to_string(line) + ": cannot parse value '" + s + "'");
  if (s.find_first_of(".eE") == std::string::npos) {
    v.is_integer = true;
    v.uint_val = std::strtoull(s.c_str(), nullptr, 10);
  }
  return v;
}

Value parse_value(const std::string& raw, int line) {
  const std::string s = trim(raw);
  if (!s.empty() && s.front() == '[') {
    if (s.back() != ']')
      throw ConfigError("line " + std::to_string(line) + ": unterminated array");
    Value v;
    v.kind = Value::Kind::Array;
    v.line = line;
    std::string body = s.substr(1, s.size() - 2);
    std::string item;
    bool in_str = false;
    for (char c : body) {
      if (c == '"') in_str = !in_str;
      if (c == ',' && !in_str) {
        if (!trim(item).empty()) v.items.push_back(parse_scalar(item, line));
        item.clear();
      } else {
        item += c;
      }
    }
    if (!trim(item).empty()) v.items.push_back(parse_scalar(item, line));
    return v;
  }
  return parse_scalar(s, line);
}

using Section = std::map<std::string, Value>;
using Table = std::map<std::string, Section>;

Table parse_table(const std::string& text) {
  Table table;
  std::istringstream in(text);
  std::string line;
  std::string section;
  int lineno = 0;
  while (std::getline(in, line)) {
    ++lineno;
    line = trim(strip_comment(line));
    if (line.empty()) continue;
    if (line.front() == '[') {
      if (line.back() != ']')
        throw ConfigError("line " + std::to_string(lineno) + ": malformed section header");
      section = lower(trim(line.substr(1, line.size() - 2)));
      if (section.empty())
        throw ConfigError("line " + std::to_string(lineno) + ": empty section name");
      table[section];
      continue;
    }
    const std::size_t eq = line.find('=');
    if (eq == std::string::npos)
      throw ConfigError("line " + std::to_string(lineno) + ": expected key = value");
    const std::string key = lower(trim(line.substr(0, eq)));
    if (key.empty())
      throw ConfigError("line " + std::to_string(lineno) + ": empty key");
    if (section.empty())
      throw ConfigError("line " + std::to_string(lineno) + ": key outside any [section]");
    if (table[section].count(key))
      throw ConfigError("line " + std::to_string(lineno) + ": duplicate key '" +
                        section + "." + key + "'");
    table[section][key] = parse_value(line.substr(eq + 1), lineno);
  }
  return table;
}

double as_number(const Value& v, const std::string& field) {
  if (v.kind != Value::Kind::Number)
    throw ConfigError("'" + field + "' must be a number", field);
  return v.num;
}

int as_int(const Value& v, const std::string& field) {
  if (v.kind != Value::Kind::Number || !v.is_integer)
    throw ConfigError("'" + field + "' must be an integer", field);
  return static_cast<int>(v.num);
}

std::uint64_t as_uint64(const Value& v, const std::string& field) {
  if (v.kind != Value::Kind::Number || !v.is_integer)
    throw ConfigError("'" + field + "' must be an integer", field);
  return v.uint_val;
}

std::string as_string(const Value& v, const std::string& field) {
  if (v.kind != Value::Kind::String)
    throw ConfigError("'" + field + "' must be a string", field);
  return v.str;
}

admm::Variant parse_variant(const std::string& s, const std::string& field) {
  const std::string ls = lower(s);
  if (ls == "hard") return admm::Variant::Hard;
  if (ls == "soft") return admm::Variant::Soft;
  throw ConfigError("'" + field + "' must be \"hard\" or \"soft\"", field);
}

void apply_table(Resolved& r, const Table& table) {
  for (const auto& [section, entries] : table) {
    for (const auto& [key, value] : entries) {
      const std::string field = section + "." + key;
      if (section == "campaign") {
        if (key == "m") r.campaign.M = as_int(value, field);
        else if (key == "k") r.campaign.K = as_int(value, field);
        else if (key == "setups") r.campaign.n_setups = as_int(value, field);
        else if (key == "uses") r.campaign.n_uses = as_int(value, field);
        else if (key == "seed") r.campaign.master_seed = as_uint64(value, field);
        else if (key == "workers") r.campaign.workers = as_int(value, field);
        else if (key == "detectors") {
          if (value.kind != Value::Kind::Array)
            throw ConfigError("'" + field + "' must be an array of strings", field);
          r.detector_names.clear();
          for (const Value& item : value.items)
            r.detector_names.push_back(as_string(item, field));
        } else throw ConfigError("unknown key '" + field + "'", field);
      } else if (section == "cell") {
        if (key == "side_m") r.campaign.cell.side_m = as_number(value, field);
        else if (key == "min_dist_m") r.campaign.cell.min_dist_m = as_number(value, field);
        else if (key == "pl_const_db") r.campaign.cell.pl_const_db = as_number(value, field);
        else if (key == "pl_slope") r.campaign.cell.pl_slope = as_number(value, field);
        else throw ConfigError("unknown key '" + field + "'", field);
      } else if (section == "power") {
        if (key == "p_max_w") r.campaign.power.p_max_w = as_number(value, field);
        else if (key == "delta_db") r.campaign.power.delta_db = as_number(value, field);
        else throw ConfigError("unknown key '" + field + "'", field);
      } else if (section == "impairment") {
        if (key == "kappa_r") r.campaign.kappa_r = as_number(value, field);
        else if (key == "kappa_t") {
          r.campaign.kappa_t.clear();
          if (value.kind == Value::Kind::Array) {
            for (const Value& item : value.items)
              r.campaign.kappa_t.push_back(as_number(item, field));
          } else {
            r.campaign.kappa_t.push_back(as_number(value, field));
          }
        } else if (key == "sigma2") r.campaign.sigma2 = as_number(value, field);
        else throw ConfigError("unknown key '" + field + "'", field);
      } else if (section == "admm") {
        if (key == "rho") r.admm.rho = as_number(value, field);
        else if (key == "iterations") r.admm.iterations = as_int(value, field);
        else if (key == "variant")
          r.admm.variant = parse_variant(as_string(value, field), field);
        else throw ConfigError("unknown key '" + field + "'", field);
      } else {
        throw ConfigError("unknown section '[" + section + "]'", section);
      }
    }
  }
}

}  // namespace

Resolved defaults() {
  Resolved r;
  r.detector_names = {"MRC", "MMSE", "BMRC", "BMMSE", "ADMM"};
  return r;
}

Resolved parse_text(const std::string& text, const Overrides& overrides) {
  Resolved r = defaults();
  apply_table(r, parse_table(text));

  if (overrides.seed) r.campaign.master_seed = *overrides.seed;
  if (overrides.workers) r.campaign.workers = *overrides.workers;
  if (overrides.setups) r.campaign.n_setups = *overrides.setups;
  if (overrides.uses) r.campaign.n_uses = *overrides.uses;
  if (overrides.rho) r.admm.rho = *overrides.rho;
  if (overrides.iters) r.admm.iterations = *overrides.iters;
  if (overrides.variant) r.admm.variant = parse_variant(*overrides.variant, "--variant");
  if (overrides.detectors) r.detector_names = *overrides.detectors;

  r.campaign.detectors.clear();
  std::vector<std::string> canonical;
  for (const std::string& name : r.detector_names) {
    const sim::DetectorSpec spec = sim::parse_detector(name, r.admm);
    r.campaign.detectors.push_back(spec);
    canonical.push_back(spec.name());
  }
  r.detector_names = std::move(canonical);

  try {
    r.campaign.validate();
  } catch (const ContractViolation& err) {
    throw ConfigError(std::string("invalid configuration: ") + err.what());
  }
  return r;
}

Resolved load(const std::string& path, const Overrides& overrides) {
  std::string text;
  if (!path.empty()) {
    std::ifstream in(path);
    if (!in) throw ConfigError("cannot open config file '" + path + "'", path);
    std::ostringstream ss;
    ss << in.rdbuf();
    text = ss.str();
  }
  return parse_text(text, overrides);
}

}  // namespace obmimo::config
