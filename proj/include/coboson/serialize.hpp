// JSON and CSV serialization for the library types. Numbers in CSV use the
// shortest round-trip decimal form so golden files are bit-reproducible.

#pragma once

#include <charconv>
#include <cmath>
#include <cstdint>
#include <fstream>
#include <sstream>
#include <string>
#include <vector>

#include <json.hpp>

#include "coboson/bounds.hpp"
#include "coboson/chi.hpp"
#include "coboson/errors.hpp"
#include "coboson/extremal.hpp"
#include "coboson/schmidt.hpp"

namespace coboson {

using json = nlohmann::json;

inline std::string format_double(double x) {
  if (std::isnan(x)) return "nan";
  if (std::isinf(x)) return x > 0 ? "inf" : "-inf";
  char buf[32];
  const auto res = std::to_chars(buf, buf + sizeof(buf), x);
  return std::string(buf, res.ptr);
}

// -- SchmidtDistribution ------------------------------------------------------

inline json to_json(const SchmidtDistribution& dist) { return json(dist.coefficients()); }

inline SchmidtDistribution distribution_from_json(const json& j, bool renormalize = false) {
  if (!j.is_array()) throw Error("distribution JSON must be an array of numbers");
  return SchmidtDistribution(j.get<std::vector<double>>(), renormalize);
}

inline void write_distribution_csv(std::ostream& os, const SchmidtDistribution& dist) {
  os << "lambda\n";
  for (double c : dist.coefficients()) os << format_double(c) << "\n";
}

inline SchmidtDistribution read_distribution_csv(std::istream& is, bool renormalize = false) {
  std::vector<double> v;
  std::string line;
  while (std::getline(is, line)) {
    if (line.empty() || line == "lambda") continue;
    v.push_back(std::stod(line));
  }
  return SchmidtDistribution(std::move(v), renormalize);
}

// -- DistributionSummary ------------------------------------------------------

inline json to_json(const DistributionSummary& s) {
  json j{{"lambda1", s.lambda1},
         {"purity", s.purity},
         {"power_sums", s.power_sums},
         {"schmidt_number", s.schmidt_number},
         {"geometric_entanglement", s.geometric_entanglement}};
  if (s.boundary) j["boundary"] = *s.boundary;
  return j;
}

// -- ChiSeries ----------------------------------------------------------------

inline json to_json(const ChiSeries& series) {
  json chi = json::array(), log_chi = json::array(), ratio = json::array();
  for (std::int64_t n = 0; n <= series.n_max(); ++n) {
    chi.push_back(series.chi(n));
    if (series.is_zero(n))
      log_chi.push_back(nullptr);
    else
      log_chi.push_back(series.chi_log(n).log());
  }
  for (std::int64_t n = 0; n < series.n_max(); ++n) {
    const double r = series.ratio(n);
    if (std::isnan(r))
      ratio.push_back(nullptr);
    else
      ratio.push_back(r);
  }
  return json{{"source", to_string(series.source())},
              {"Nmax", series.n_max()},
              {"chi", chi},
              {"log_chi", log_chi},
              {"ratio", ratio}};
}

inline void write_chi_csv(std::ostream& os, const ChiSeries& series) {
  os << "N,chi,ratio\n";
  for (std::int64_t n = 0; n <= series.n_max(); ++n) {
    const double r = n < series.n_max() ? series.ratio(n) : std::numeric_limits<double>::quiet_NaN();
    os << n << "," << format_double(series.chi(n)) << "," << format_double(r) << "\n";
  }
}

// -- ExtremalSpec ---------------------------------------------------------------

inline json to_json(const ExtremalSpec& spec) {
  json j{{"kind", to_string(spec.kind)},
         {"L", spec.L},
         {"lambda1", spec.lambda1},
         {"lambda2", spec.lambda2},
         {"lambdaL", spec.lambdaL},
         {"lambdaS", spec.lambdaS},
         {"lambdaSigma", spec.lambdaSigma}};
  if (spec.infinite())
    j["S"] = "inf";
  else
    j["S"] = spec.S;
  return j;
}

// -- BoundsReport ---------------------------------------------------------------

inline json to_json(const BoundsReport& rep) {
  json chi = json::object(), log_chi = json::object(), ratio = json::object();
  for (std::size_t i = 0; i < 6; ++i) {
    chi[kChainNames[i]] = rep.chain[i].linear();
    if (rep.chain[i].is_zero())
      log_chi[kChainNames[i]] = nullptr;
    else
      log_chi[kChainNames[i]] = rep.chain[i].log();
    if (std::isnan(rep.ratio_chain[i]))
      ratio[kChainNames[i]] = nullptr;
    else
      ratio[kChainNames[i]] = rep.ratio_chain[i];
  }
  return json{{"P", rep.P},
              {"lambda1", rep.lambda1},
              {"N", rep.N},
              {"chi", chi},
              {"log_chi", log_chi},
              {"ratio", ratio},
              {"smooth_lower", rep.smooth_lower.linear()},
              {"smooth_upper", rep.smooth_upper.linear()},
              {"smooth_lower_applicable", rep.smooth_lower_applicable},
              {"validity", rep.validity()}};
}

inline constexpr const char* kBoundsCsvHeader =
    "P,lambda1,N,"
    "chi_uniform_L1,chi_uniform_P,chi_min_PL1,chi_max_PL1,chi_peaked_P,chi_peaked_L1,"
    "ratio_uniform_L1,ratio_uniform_P,ratio_min_PL1,ratio_max_PL1,ratio_peaked_P,ratio_peaked_L1,"
    "smooth_lower,smooth_upper,validity";

inline void write_bounds_csv_row(std::ostream& os, const BoundsReport& rep) {
  os << format_double(rep.P) << "," << format_double(rep.lambda1) << "," << rep.N;
  for (std::size_t i = 0; i < 6; ++i) os << "," << format_double(rep.chain[i].linear());
  for (std::size_t i = 0; i < 6; ++i) os << "," << format_double(rep.ratio_chain[i]);
  os << "," << format_double(rep.smooth_lower.linear()) << ","
     << format_double(rep.smooth_upper.linear()) << "," << rep.validity();
}

}  // namespace coboson
