#include "patrol/csv.hpp"

#include <cerrno>
#include <charconv>
#include <cmath>
#include <cstdio>
#include <cstdlib>
#include <fstream>
#include <limits>
#include <sstream>

#include "patrol/errors.hpp"

namespace patrol {

namespace {

constexpr const char* kObservationHeader =
    "day,match_id,player_id,skill_level,avg_skill_diff_opponents,"
    "avg_skill_diff_teammates,has_party_teammates,prop_party_teammates,"
    "matches_in_session,reports_against_24h,reports_by_24h,toxic";
constexpr int kObservationColumns = 12;

constexpr const char* kObservationColumnNames[kObservationColumns] = {
    "day",
    "match_id",
    "player_id",
    "skill_level",
    "avg_skill_diff_opponents",
    "avg_skill_diff_teammates",
    "has_party_teammates",
    "prop_party_teammates",
    "matches_in_session",
    "reports_against_24h",
    "reports_by_24h",
    "toxic",
};

constexpr const char* kResultsHeader =
    "policy,param,target_share,realized_share,detection_rate,seed,sigma_u";

std::string fmt17(double v) {
  char buf[32];
  std::snprintf(buf, sizeof(buf), "%.17g", v);
  return buf;
}

std::string fmt6(double v) {
  char buf[32];
  std::snprintf(buf, sizeof(buf), "%.6f", v);
  return buf;
}

std::ofstream open_out(const std::string& path) {
  std::ofstream os(path);
  if (!os) throw IoError("cannot open '" + path + "' for writing");
  return os;
}

std::ifstream open_in(const std::string& path) {
  std::ifstream is(path);
  if (!is) throw IoError("cannot open '" + path + "' for reading");
  return is;
}

void split_fields(const std::string& line, std::vector<std::string>& out) {
  out.clear();
  std::size_t start = 0;
  for (;;) {
    const std::size_t comma = line.find(',', start);
    if (comma == std::string::npos) {
      out.push_back(line.substr(start));
      return;
    }
    out.push_back(line.substr(start, comma - start));
    start = comma + 1;
  }
}

[[noreturn]] void field_error(std::size_t row, const char* column,
                              const std::string& what) {
  throw IoError("observation csv row " + std::to_string(row) + " column '" +
                column + "': " + what);
}

double parse_real(const std::string& field, std::size_t row, const char* column) {
  errno = 0;
  char* end = nullptr;
  const double v = std::strtod(field.c_str(), &end);
  if (end == field.c_str() || *end != '\0' || errno == ERANGE)
    field_error(row, column, "cannot parse '" + field + "'");
  if (!std::isfinite(v)) field_error(row, column, "value is not finite");
  return v;
}

long long parse_int(const std::string& field, std::size_t row, const char* column) {
  long long v = 0;
  const auto res = std::from_chars(field.data(), field.data() + field.size(), v);
  if (res.ec != std::errc() || res.ptr != field.data() + field.size())
    field_error(row, column, "cannot parse '" + field + "' as an integer");
  return v;
}

}  // namespace

void write_observation_csv(std::ostream& os, const MatchStream& stream) {
  os << kObservationHeader << "\n";
  for (const auto& ev : stream.events) {
    const auto& c = ev.covariates;
    os << ev.day << ',' << ev.match_id << ',' << ev.player_id << ','
       << fmt17(c.skill_level) << ',' << fmt17(c.avg_skill_diff_opponents) << ','
       << fmt17(c.avg_skill_diff_teammates) << ','
       << static_cast<int>(c.has_party_teammates) << ','
       << fmt17(c.prop_party_teammates) << ','
       << static_cast<long long>(c.matches_in_session) << ','
       << static_cast<long long>(c.reports_against_24h) << ','
       << static_cast<long long>(c.reports_by_24h) << ',' << (ev.toxic ? 1 : 0)
       << "\n";
  }
  if (!os) throw IoError("observation csv: write failure");
}

void write_observation_csv(const std::string& path, const MatchStream& stream) {
  auto os = open_out(path);
  write_observation_csv(os, stream);
}

MatchStream read_observation_csv(std::istream& is) {
  std::string line;
  if (!std::getline(is, line)) throw IoError("observation csv: empty file");
  if (!line.empty() && line.back() == '\r') line.pop_back();
  if (line != kObservationHeader)
    throw IoError("observation csv: unexpected header '" + line + "'");

  MatchStream stream;
  stream.day_offsets.push_back(0);
  std::int32_t current_day = 0;
  std::vector<std::string> fields;
  std::size_t row = 1;

  while (std::getline(is, line)) {
    ++row;
    if (!line.empty() && line.back() == '\r') line.pop_back();
    if (line.empty()) continue;
    split_fields(line, fields);
    if (static_cast<int>(fields.size()) != kObservationColumns)
      throw IoError("observation csv row " + std::to_string(row) + ": expected " +
                    std::to_string(kObservationColumns) + " columns, found " +
                    std::to_string(fields.size()));

    ObservationEvent ev;
    ev.day = static_cast<std::int32_t>(parse_int(fields[0], row, "day"));
    if (ev.day < 0) field_error(row, "day", "must be >= 0");
    ev.match_id = parse_int(fields[1], row, "match_id");
    ev.player_id =
        static_cast<std::uint32_t>(parse_int(fields[2], row, "player_id"));

    CovariateRecord c;
    c.skill_level = parse_real(fields[3], row, kObservationColumnNames[3]);
    c.avg_skill_diff_opponents = parse_real(fields[4], row, kObservationColumnNames[4]);
    c.avg_skill_diff_teammates = parse_real(fields[5], row, kObservationColumnNames[5]);
    c.has_party_teammates = parse_real(fields[6], row, kObservationColumnNames[6]);
    c.prop_party_teammates = parse_real(fields[7], row, kObservationColumnNames[7]);
    c.matches_in_session = parse_real(fields[8], row, kObservationColumnNames[8]);
    c.reports_against_24h = parse_real(fields[9], row, kObservationColumnNames[9]);
    c.reports_by_24h = parse_real(fields[10], row, kObservationColumnNames[10]);
    try {
      validate(c);
    } catch (const ConfigError& err) {
      throw IoError("observation csv row " + std::to_string(row) + ": " +
                    err.what());
    }
    ev.covariates = c;

    const long long toxic = parse_int(fields[11], row, "toxic");
    if (toxic != 0 && toxic != 1) field_error(row, "toxic", "must be 0 or 1");
    ev.toxic = toxic == 1;

    if (ev.day < current_day)
      field_error(row, "day", "days must be non-decreasing");
    while (current_day < ev.day) {
      stream.day_offsets.push_back(stream.events.size());
      ++current_day;
    }
    stream.events.push_back(ev);
  }
  stream.day_offsets.push_back(stream.events.size());
  stream.config.days = stream.days();
  stream.config.sigma_u = std::numeric_limits<double>::quiet_NaN();
  return stream;
}

MatchStream read_observation_csv(const std::string& path) {
  auto is = open_in(path);
  return read_observation_csv(is);
}

void write_results_csv(std::ostream& os, std::span<const MetricsRow> rows) {
  os << kResultsHeader << "\n";
  for (const auto& r : rows) {
    os << r.policy << ',' << fmt6(r.param) << ',' << fmt6(r.target_share) << ','
       << fmt6(r.realized_share) << ',' << fmt6(r.detection_rate) << ','
       << r.seed << ',' << fmt6(r.sigma_u) << "\n";
  }
  if (!os) throw IoError("results csv: write failure");
}

void write_results_csv(const std::string& path, std::span<const MetricsRow> rows) {
  auto os = open_out(path);
  write_results_csv(os, rows);
}

std::vector<MetricsRow> read_results_csv(std::istream& is) {
  std::string line;
  if (!std::getline(is, line)) throw IoError("results csv: empty file");
  if (!line.empty() && line.back() == '\r') line.pop_back();
  if (line != kResultsHeader)
    throw IoError("results csv: unexpected header '" + line + "'");

  std::vector<MetricsRow> rows;
  std::vector<std::string> fields;
  std::size_t row = 1;
  while (std::getline(is, line)) {
    ++row;
    if (!line.empty() && line.back() == '\r') line.pop_back();
    if (line.empty()) continue;
    split_fields(line, fields);
    if (fields.size() != 7)
      throw IoError("results csv row " + std::to_string(row) +
                    ": expected 7 columns");
    MetricsRow r;
    r.policy = fields[0];
    errno = 0;
    char* end = nullptr;
    const auto real_at = [&](int i, const char* name) {
      const double v = std::strtod(fields[i].c_str(), &end);
      if (end == fields[i].c_str())
        throw IoError("results csv row " + std::to_string(row) + " column '" +
                      name + "': cannot parse '" + fields[i] + "'");
      return v;
    };
    r.param = real_at(1, "param");
    r.target_share = real_at(2, "target_share");
    r.realized_share = real_at(3, "realized_share");
    r.detection_rate = real_at(4, "detection_rate");
    r.seed = static_cast<std::uint64_t>(parse_int(fields[5], row, "seed"));
    r.sigma_u = real_at(6, "sigma_u");
    rows.push_back(std::move(r));
  }
  return rows;
}

std::vector<MetricsRow> read_results_csv(const std::string& path) {
  auto is = open_in(path);
  return read_results_csv(is);
}

void write_plot_csv(std::ostream& os, std::span<const SharePoint> points) {
  os << "policy,target_share,mean_realized_share,mean_detection_rate,"
        "min_detection_rate,max_detection_rate,replicas\n";
  for (const auto& p : points) {
    os << p.policy << ',' << fmt6(p.target_share) << ',' << fmt6(p.mean_share)
       << ',' << fmt6(p.mean_rate) << ',' << fmt6(p.min_rate) << ','
       << fmt6(p.max_rate) << ',' << p.replicas << "\n";
  }
  if (!os) throw IoError("plot csv: write failure");
}

void write_plot_csv(const std::string& path, std::span<const SharePoint> points) {
  auto os = open_out(path);
  write_plot_csv(os, points);
}

void write_improvement_csv(std::ostream& os,
                           std::span<const ImprovementRow> rows) {
  os << "target_share,linucb_rate,prob_etc_rate,improvement_pp,improvement_pct,"
        "ref_linucb_rate,ref_prob_etc_rate,ref_improvement_pp,ref_improvement_pct\n";
  for (const auto& r : rows) {
    os << fmt6(r.target_share) << ',' << fmt6(r.linucb_rate) << ','
       << fmt6(r.etc_rate) << ',' << fmt6(r.improvement_pp) << ','
       << fmt6(r.improvement_pct);
    // Reference columns where the share matches the published grid.
    bool have_ref = false;
    for (std::size_t i = 0; i < kReferenceShares.size(); ++i) {
      if (std::abs(kReferenceShares[i] - r.target_share) < 1e-9) {
        const double ref_pp =
            (kReferenceLinUcbRate[i] - kReferenceProbEtcRate[i]) * 100.0;
        const double ref_pct = ref_pp / kReferenceProbEtcRate[i];
        os << ',' << fmt6(kReferenceLinUcbRate[i]) << ','
           << fmt6(kReferenceProbEtcRate[i]) << ',' << fmt6(ref_pp) << ','
           << fmt6(ref_pct);
        have_ref = true;
        break;
      }
    }
    if (!have_ref) os << ",,,,";
    os << "\n";
  }
  if (!os) throw IoError("improvement csv: write failure");
}

void write_improvement_csv(const std::string& path,
                           std::span<const ImprovementRow> rows) {
  auto os = open_out(path);
  write_improvement_csv(os, rows);
}

}  // namespace patrol
