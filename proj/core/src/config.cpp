#include "patrol/config.hpp"

#include <cerrno>
#include <charconv>
#include <cmath>
#include <cstdio>
#include <cstdlib>
#include <fstream>
#include <sstream>

#include "patrol/errors.hpp"

namespace patrol {

namespace {

std::string fmt17(double v) {
  char buf[32];
  std::snprintf(buf, sizeof(buf), "%.17g", v);
  return buf;
}

double to_real(const std::string& key, const std::string& value) {
  errno = 0;
  char* end = nullptr;
  const double v = std::strtod(value.c_str(), &end);
  if (end == value.c_str() || *end != '\0' || errno == ERANGE ||
      !std::isfinite(v))
    throw ConfigError("config key '" + key + "': cannot parse real '" + value + "'");
  return v;
}

std::int64_t to_int(const std::string& key, const std::string& value) {
  std::int64_t v = 0;
  const auto res = std::from_chars(value.data(), value.data() + value.size(), v);
  if (res.ec != std::errc() || res.ptr != value.data() + value.size())
    throw ConfigError("config key '" + key + "': cannot parse integer '" + value + "'");
  return v;
}

std::uint64_t to_uint(const std::string& key, const std::string& value) {
  std::uint64_t v = 0;
  const auto res = std::from_chars(value.data(), value.data() + value.size(), v);
  if (res.ec != std::errc() || res.ptr != value.data() + value.size())
    throw ConfigError("config key '" + key + "': cannot parse unsigned '" + value + "'");
  return v;
}

}  // namespace

void write_key_values(std::ostream& os, const KeyValueList& pairs) {
  for (const auto& [key, value] : pairs) os << key << ' ' << value << "\n";
  if (!os) throw IoError("key-value write failure");
}

void write_key_values(const std::string& path, const KeyValueList& pairs) {
  std::ofstream os(path);
  if (!os) throw IoError("cannot open '" + path + "' for writing");
  write_key_values(os, pairs);
}

KeyValueList read_key_values(std::istream& is) {
  KeyValueList pairs;
  std::string line;
  while (std::getline(is, line)) {
    if (!line.empty() && line.back() == '\r') line.pop_back();
    const std::size_t first = line.find_first_not_of(" \t");
    if (first == std::string::npos || line[first] == '#') continue;
    std::istringstream ls(line);
    std::string key, value;
    if (!(ls >> key >> value))
      throw ConfigError("malformed config line: '" + line + "'");
    std::string extra;
    if (ls >> extra)
      throw ConfigError("trailing content on config line: '" + line + "'");
    pairs.emplace_back(std::move(key), std::move(value));
  }
  return pairs;
}

KeyValueList read_key_values(const std::string& path) {
  std::ifstream is(path);
  if (!is) throw IoError("cannot open '" + path + "' for reading");
  return read_key_values(is);
}

KeyValueList to_key_values(const GeneratorConfig& c) {
  KeyValueList kv;
  kv.emplace_back("n_players", std::to_string(c.n_players));
  kv.emplace_back("days", std::to_string(c.days));
  kv.emplace_back("matches_per_day", std::to_string(c.matches_per_day));
  kv.emplace_back("players_per_match", std::to_string(c.players_per_match));
  kv.emplace_back("seed", std::to_string(c.seed));
  kv.emplace_back("sigma_u", fmt17(c.sigma_u));
  for (std::size_t i = 0; i < kCovariateCount; ++i)
    kv.emplace_back("beta_" + std::string(kCovariateNames[i]), fmt17(c.beta[i]));
  kv.emplace_back("beta0", fmt17(c.beta0));
  kv.emplace_back("target_toxic_rate", fmt17(c.target_toxic_rate));
  kv.emplace_back("skill_mean", fmt17(c.skill_mean));
  kv.emplace_back("skill_sd", fmt17(c.skill_sd));
  kv.emplace_back("skill_min", fmt17(c.skill_min));
  kv.emplace_back("skill_max", fmt17(c.skill_max));
  kv.emplace_back("diff_opponents_mean", fmt17(c.diff_opponents_mean));
  kv.emplace_back("diff_teammates_mean", fmt17(c.diff_teammates_mean));
  kv.emplace_back("party_rate", fmt17(c.party_rate));
  kv.emplace_back("party_prop_mean", fmt17(c.party_prop_mean));
  kv.emplace_back("party_prop_alpha", fmt17(c.party_prop_alpha));
  kv.emplace_back("session_mean", fmt17(c.session_mean));
  kv.emplace_back("session_cap", std::to_string(c.session_cap));
  kv.emplace_back("reports_against_mean", fmt17(c.reports_against_mean));
  kv.emplace_back("reports_against_sd", fmt17(c.reports_against_sd));
  kv.emplace_back("reports_against_cap", std::to_string(c.reports_against_cap));
  kv.emplace_back("reports_by_mean", fmt17(c.reports_by_mean));
  kv.emplace_back("reports_by_sd", fmt17(c.reports_by_sd));
  kv.emplace_back("reports_by_cap", std::to_string(c.reports_by_cap));
  kv.emplace_back("report_file_prob", fmt17(c.report_file_prob));
  return kv;
}

void write_generator_config(const std::string& path, const GeneratorConfig& config) {
  write_key_values(path, to_key_values(config));
}

GeneratorConfig read_generator_config(std::istream& is) {
  GeneratorConfig c;
  for (const auto& [key, value] : read_key_values(is)) {
    if (key == "n_players") c.n_players = to_int(key, value);
    else if (key == "days") c.days = static_cast<std::int32_t>(to_int(key, value));
    else if (key == "matches_per_day") c.matches_per_day = to_int(key, value);
    else if (key == "players_per_match")
      c.players_per_match = static_cast<std::int32_t>(to_int(key, value));
    else if (key == "seed") c.seed = to_uint(key, value);
    else if (key == "sigma_u") c.sigma_u = to_real(key, value);
    else if (key == "beta0") c.beta0 = to_real(key, value);
    else if (key == "target_toxic_rate") c.target_toxic_rate = to_real(key, value);
    else if (key == "skill_mean") c.skill_mean = to_real(key, value);
    else if (key == "skill_sd") c.skill_sd = to_real(key, value);
    else if (key == "skill_min") c.skill_min = to_real(key, value);
    else if (key == "skill_max") c.skill_max = to_real(key, value);
    else if (key == "diff_opponents_mean") c.diff_opponents_mean = to_real(key, value);
    else if (key == "diff_teammates_mean") c.diff_teammates_mean = to_real(key, value);
    else if (key == "party_rate") c.party_rate = to_real(key, value);
    else if (key == "party_prop_mean") c.party_prop_mean = to_real(key, value);
    else if (key == "party_prop_alpha") c.party_prop_alpha = to_real(key, value);
    else if (key == "session_mean") c.session_mean = to_real(key, value);
    else if (key == "session_cap") c.session_cap = to_int(key, value);
    else if (key == "reports_against_mean") c.reports_against_mean = to_real(key, value);
    else if (key == "reports_against_sd") c.reports_against_sd = to_real(key, value);
    else if (key == "reports_against_cap") c.reports_against_cap = to_int(key, value);
    else if (key == "reports_by_mean") c.reports_by_mean = to_real(key, value);
    else if (key == "reports_by_sd") c.reports_by_sd = to_real(key, value);
    else if (key == "reports_by_cap") c.reports_by_cap = to_int(key, value);
    else if (key == "report_file_prob") c.report_file_prob = to_real(key, value);
    else {
      bool matched = false;
      for (std::size_t i = 0; i < kCovariateCount; ++i) {
        if (key == "beta_" + std::string(kCovariateNames[i])) {
          c.beta[i] = to_real(key, value);
          matched = true;
          break;
        }
      }
      if (!matched) throw ConfigError("unknown config key '" + key + "'");
    }
  }
  validate(c);
  return c;
}

GeneratorConfig read_generator_config(const std::string& path) {
  std::ifstream is(path);
  if (!is) throw IoError("cannot open config '" + path + "' for reading");
  return read_generator_config(is);
}

std::string config_hash(const GeneratorConfig& config) {
  std::ostringstream os;
  write_key_values(os, to_key_values(config));
  const std::string text = os.str();
  std::uint64_t h = 0xcbf29ce484222325ULL;
  for (unsigned char ch : text) {
    h ^= ch;
    h *= 0x100000001b3ULL;
  }
  char buf[20];
  std::snprintf(buf, sizeof(buf), "%016llx", static_cast<unsigned long long>(h));
  return buf;
}

}  // namespace patrol
