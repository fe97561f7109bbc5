// Sweep, figure-preset, and verification drivers behind the CLI. Grid points
// are independent work items; a worker pool computes rows in any order and
// they are written strictly by grid index, so output bytes never depend on
// the job count.

#pragma once

#include <atomic>
#include <cmath>
#include <cstdint>
#include <cstdlib>
#include <exception>
#include <filesystem>
#include <fstream>
#include <functional>
#include <limits>
#include <mutex>
#include <optional>
#include <sstream>
#include <string>
#include <thread>
#include <vector>

#include "coboson/bounds.hpp"
#include "coboson/chi.hpp"
#include "coboson/errors.hpp"
#include "coboson/extremal.hpp"
#include "coboson/schmidt.hpp"
#include "coboson/serialize.hpp"

namespace coboson {

// sweep exit codes (also the CLI process exit codes)
inline constexpr int kExitOk = 0;
inline constexpr int kExitBadArguments = 1;
inline constexpr int kExitInfeasible = 2;
inline constexpr int kExitIoFailure = 3;
inline constexpr int kExitInternal = 4;

inline constexpr const char* kOutDirEnvVar = "COBOSON_OUT_DIR";

enum class SweepMode { Chi, Bounds, SweepLambda1, SweepP, SweepN, Verify, Figure };
enum class OutputFormat { Csv, Json };
enum class FigureId { Fig1, Fig3, Fig4, Fig5 };

struct Range {
  double start = 0.0;
  double stop = 0.0;
  std::int64_t steps = 0;
};

struct SweepConfig {
  SweepMode mode = SweepMode::Bounds;
  double P = std::numeric_limits<double>::quiet_NaN();
  double lambda1 = std::numeric_limits<double>::quiet_NaN();
  std::int64_t N = -1;
  std::int64_t n_max = -1;
  Range range;
  FigureId figure = FigureId::Fig1;
  std::string out_path;
  OutputFormat format = OutputFormat::Csv;
  std::string engine = "esp";  // chi mode: esp | newton_girard | multiplicity
  std::string dist_path;
  std::uint64_t seed = 1;
  int jobs = 1;
};

struct RunResult {
  int exit_code = kExitOk;
  std::vector<std::string> outputs;
  std::string message;
};

namespace detail {

inline std::string default_out_dir() {
  if (const char* env = std::getenv(kOutDirEnvVar); env != nullptr && *env != '\0')
    return env;
  return ".";
}

inline std::string resolve_out(const std::string& requested, const std::string& default_name) {
  if (!requested.empty()) return requested;
  return default_out_dir() + "/" + default_name;
}

inline SchmidtDistribution load_distribution(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw Error("cannot open distribution file: " + path);
  if (path.size() >= 4 && path.substr(path.size() - 4) == ".csv")
    return read_distribution_csv(in);
  json j;
  in >> j;
  return distribution_from_json(j);
}

inline MultiplicityBlocks group_blocks(const SchmidtDistribution& dist) {
  MultiplicityBlocks blocks;
  for (double c : dist.coefficients()) {
    if (c <= 0.0) continue;
    if (!blocks.blocks.empty() && blocks.blocks.back().value == c)
      ++blocks.blocks.back().multiplicity;
    else
      blocks.blocks.push_back({c, 1});
  }
  return blocks;
}

template <typename Fn>
void parallel_for(std::int64_t n, int jobs, Fn&& fn) {
  if (jobs <= 1 || n <= 1) {
    for (std::int64_t i = 0; i < n; ++i) fn(i);
    return;
  }
  std::atomic<std::int64_t> next{0};
  std::atomic<bool> failed{false};
  std::exception_ptr first_error;
  std::mutex error_mutex;
  std::vector<std::thread> pool;
  const int workers = static_cast<int>(std::min<std::int64_t>(jobs, n));
  pool.reserve(static_cast<std::size_t>(workers));
  for (int w = 0; w < workers; ++w) {
    pool.emplace_back([&] {
      for (std::int64_t i = next.fetch_add(1); i < n && !failed.load(); i = next.fetch_add(1)) {
        try {
          fn(i);
        } catch (...) {
          std::lock_guard<std::mutex> lock(error_mutex);
          if (!first_error) first_error = std::current_exception();
          failed.store(true);
        }
      }
    });
  }
  for (auto& t : pool) t.join();
  if (first_error) std::rethrow_exception(first_error);
}

struct SweepRow {
  std::int64_t index = 0;
  bool skipped = false;
  double P = 0.0, lambda1 = 0.0;
  std::int64_t N = 0;
  std::optional<BoundsReport> report;
  double smooth_ratio_lower = std::numeric_limits<double>::quiet_NaN();
  double smooth_ratio_upper = std::numeric_limits<double>::quiet_NaN();
  double chi_dist = std::numeric_limits<double>::quiet_NaN();
  double ratio_dist = std::numeric_limits<double>::quiet_NaN();
};

inline SweepRow compute_row(std::int64_t index, double P, double lambda1, std::int64_t N) {
  SweepRow row;
  row.index = index;
  row.P = P;
  row.lambda1 = lambda1;
  row.N = N;
  if (!feasible(P, lambda1)) {
    row.skipped = true;
    return row;
  }
  row.report = bounds_report(P, lambda1, N);
  try {
    const LogReal lo_n = chi_min_smooth(P, lambda1, N);
    const LogReal lo_n1 = chi_min_smooth(P, lambda1, N + 1);
    if (!lo_n.is_zero()) row.smooth_ratio_lower = (lo_n1 / lo_n).linear();
  } catch (const NotApplicable&) {
  }
  const LogReal up_n = chi_max_smooth(P, lambda1, N);
  const LogReal up_n1 = chi_max_smooth(P, lambda1, N + 1);
  if (!up_n.is_zero()) row.smooth_ratio_upper = (up_n1 / up_n).linear();
  return row;
}

inline void write_sweep_csv(std::ostream& os, const std::vector<SweepRow>& rows, bool with_dist) {
  os << "index,skipped," << kBoundsCsvHeader << ",smooth_ratio_lower,smooth_ratio_upper";
  if (with_dist) os << ",chi_dist,ratio_dist";
  os << "\n";
  const double nan = std::numeric_limits<double>::quiet_NaN();
  for (const auto& row : rows) {
    os << row.index << "," << (row.skipped ? 1 : 0) << ",";
    if (row.report) {
      write_bounds_csv_row(os, *row.report);
    } else {
      os << format_double(row.P) << "," << format_double(row.lambda1) << "," << row.N;
      for (int i = 0; i < 14; ++i) os << "," << format_double(nan);
      os << ",0";
    }
    os << "," << format_double(row.smooth_ratio_lower) << ","
       << format_double(row.smooth_ratio_upper);
    if (with_dist) os << "," << format_double(row.chi_dist) << "," << format_double(row.ratio_dist);
    os << "\n";
  }
}

inline json sweep_rows_json(const std::vector<SweepRow>& rows, bool with_dist) {
  json arr = json::array();
  for (const auto& row : rows) {
    json r{{"index", row.index}, {"skipped", row.skipped}, {"P", row.P},
           {"lambda1", row.lambda1}, {"N", row.N}};
    if (row.report) {
      r["report"] = to_json(*row.report);
      if (!std::isnan(row.smooth_ratio_lower)) r["smooth_ratio_lower"] = row.smooth_ratio_lower;
      if (!std::isnan(row.smooth_ratio_upper)) r["smooth_ratio_upper"] = row.smooth_ratio_upper;
    }
    if (with_dist && !std::isnan(row.chi_dist)) {
      r["chi_dist"] = row.chi_dist;
      r["ratio_dist"] = row.ratio_dist;
    }
    arr.push_back(std::move(r));
  }
  return arr;
}

}  // namespace detail

// -- verification suite ---------------------------------------------------------

struct CheckResult {
  std::string name;
  std::int64_t cases = 0;
  std::int64_t failures = 0;
  double worst = 0.0;  // largest deviation seen (check-specific scale)
};

struct VerifyReport {
  std::uint64_t seed = 0;
  std::int64_t cases = 0;
  std::vector<CheckResult> checks;
  bool passed() const {
    for (const auto& c : checks)
      if (c.failures > 0) return false;
    return true;
  }
};

namespace detail {

// relative deviation with the 1e-9 chi noise floor: values both below the
// floor are indistinguishable from zero by the engines' own clamping rule
inline double rel_dev(double a, double b) {
  const double scale = std::max(std::abs(a), std::abs(b));
  if (scale <= 1e-9) return 0.0;
  return std::abs(a - b) / scale;
}

// ESP / Newton-Girard / multiplicity vs the subset brute force, S <= 12.
inline CheckResult check_engine_agreement(std::uint64_t seed, std::int64_t cases,
                                          bool inject_fault = false) {
  CheckResult res{"engine_agreement", cases, 0, 0.0};
  std::mt19937_64 rng(seed ^ 0x9e3779b97f4a7c15ull);
  for (std::int64_t c = 0; c < cases; ++c) {
    const auto S = static_cast<std::int64_t>(1 + rng() % 12);
    const auto dist = random_distribution(S, rng());
    const auto esp = chi_series_esp(dist, S);
    const auto summary = summarize(dist, std::max<std::int64_t>(S, 2));
    std::optional<ChiSeries> ng;
    try {
      ng.emplace(chi_series_newton_girard(summary.power_sums, S));
    } catch (const CancellationFailure&) {
      // the engine declined; ESP remains authoritative
    }
    const auto mult = chi_multiplicity(detail::group_blocks(dist), S);
    for (std::int64_t N = 0; N <= S; ++N) {
      double oracle = chi_bruteforce(dist, N);
      if (inject_fault) oracle += 1e-3;
      const double d_esp = rel_dev(esp.chi(N), oracle);
      const double d_mult = rel_dev(mult.chi(N), oracle);
      double d_ng = 0.0, ng_tol = 1e-9;
      if (ng) {
        d_ng = rel_dev(ng->chi(N), oracle);
        if (ng->cancellation_flagged(N)) ng_tol = 1e-6;
      }
      res.worst = std::max({res.worst, d_esp, d_mult, ng ? d_ng : 0.0});
      if (d_esp > 1e-9 || d_mult > 1e-9 || (ng && d_ng > ng_tol)) ++res.failures;
    }
  }
  return res;
}

// chi_2 = 1 - P and chi_3 = 1 - 3P + 2 M(3) on random distributions.
inline CheckResult check_universal_identities(std::uint64_t seed, std::int64_t cases) {
  CheckResult res{"universal_identities", cases, 0, 0.0};
  std::mt19937_64 rng(seed ^ 0x5851f42d4c957f2dull);
  for (std::int64_t c = 0; c < cases; ++c) {
    const auto S = static_cast<std::int64_t>(2 + rng() % 30);
    const auto dist = random_distribution(S, rng());
    const auto summary = summarize(dist, 3);
    const auto esp = chi_series_esp(dist, std::min<std::int64_t>(3, S));
    const double d2 = std::abs(esp.chi(2) - (1.0 - summary.purity));
    double d3 = 0.0;
    if (S >= 3)
      d3 = std::abs(esp.chi(3) - (1.0 - 3.0 * summary.purity + 2.0 * summary.power_sums[2]));
    res.worst = std::max({res.worst, d2, d3});
    if (d2 > 1e-12 || d3 > 1e-11) ++res.failures;
  }
  return res;
}

// random feasible pair away from the degenerate corners, with a hostable S
inline std::pair<double, double> random_feasible_pair(std::mt19937_64& rng) {
  for (;;) {
    const double P = 0.02 + 0.8 * uniform01(rng);
    const double lo = lambda1_min(P), hi = std::sqrt(P);
    const double t = 0.05 + 0.8 * uniform01(rng);
    const double l1 = lo + t * (hi - lo);
    const double q = P - l1 * l1;
    if (q <= 1e-6) continue;
    if ((1.0 - l1) * (1.0 - l1) / q > 400.0) continue;
    return {P, l1};
  }
}

// chi_N of constrained random distributions lies inside [min, max] bounds.
inline CheckResult check_hierarchy_containment(std::uint64_t seed, std::int64_t cases) {
  CheckResult res{"hierarchy_containment", cases, 0, 0.0};
  std::mt19937_64 rng(seed ^ 0xda3e39cb94b95bdbull);
  for (std::int64_t c = 0; c < cases; ++c) {
    const auto [P, l1] = random_feasible_pair(rng);
    const auto host =
        static_cast<std::int64_t>(snapped_ceil((1.0 - l1) * (1.0 - l1) / (P - l1 * l1))) + 1;
    const auto S = host + 2 + static_cast<std::int64_t>(rng() % 8);
    std::optional<SchmidtDistribution> dist;
    try {
      dist = random_distribution_constrained(P, l1, S, rng(), 2000);
    } catch (const SamplingExhausted&) {
      try {
        dist = random_distribution_constrained(P, l1, S + 8, rng(), 2000);
      } catch (const SamplingExhausted&) {
        continue;  // pathological corner; skip the case, do not fail the run
      }
    }
    const std::int64_t N = 2 + static_cast<std::int64_t>(rng() % 9);
    const double chi = chi_series_esp(*dist, N).chi(N);
    const double lo = chi_min_exact(P, l1, N).linear();
    const double hi = chi_max_exact(P, l1, N).linear();
    const double slack_lo = (chi - lo) / std::max(lo, 1e-300);
    const double slack_hi = (hi - chi) / std::max(hi, 1e-300);
    res.worst = std::max({res.worst, -slack_lo, -slack_hi, 0.0});
    if (slack_lo < -1e-9 || slack_hi < -1e-9) ++res.failures;
    const auto rep = bounds_report(P, l1, N);  // chain self-check runs inside
    (void)rep;
  }
  return res;
}

// Gamma^u never increases / Gamma^p never decreases chi_N and the ratio.
inline CheckResult check_gamma_monotonicity(std::uint64_t seed, std::int64_t cases) {
  CheckResult res{"gamma_monotonicity", cases, 0, 0.0};
  std::mt19937_64 rng(seed ^ 0xc2b2ae3d27d4eb4full);
  for (std::int64_t c = 0; c < cases; ++c) {
    const auto S = static_cast<std::int64_t>(4 + rng() % 9);
    const auto dist = random_distribution(S, rng());
    // random triple 1 <= j1 < j2 < j3 < S (0-based)
    std::size_t j1 = 1 + rng() % (S - 3);
    std::size_t j2 = j1 + 1 + rng() % (S - 1 - j1 - 1);
    std::size_t j3 = j2 + 1 + rng() % (S - 1 - j2);
    const auto uni = gamma_uniform(dist, j1, j2, j3);
    const auto peak = gamma_peak(dist, j1, j2, j3, dist.lambda1());
    const auto base_sum = summarize(dist, 2);
    for (const auto* img : {&uni, &peak}) {
      const auto s = summarize(*img, 2);
      const double d_mass = 0.0;  // construction enforces mass 1
      const double d_pur = std::abs(s.purity - base_sum.purity);
      const double d_l1 = std::abs(s.lambda1 - base_sum.lambda1);
      res.worst = std::max({res.worst, d_mass, d_pur, d_l1});
      if (d_pur > 1e-12 || d_l1 > 1e-12) ++res.failures;
    }
    const auto chi0 = chi_series_esp(dist, S);
    const auto chi_u = chi_series_esp(uni, S);
    const auto chi_p = chi_series_esp(peak, S);
    for (std::int64_t N = 0; N <= S; ++N) {
      const double up = chi_u.chi(N) - chi0.chi(N);
      const double dn = chi0.chi(N) - chi_p.chi(N);
      res.worst = std::max({res.worst, up, dn});
      if (up > 1e-12 || dn > 1e-12) ++res.failures;
    }
    for (std::int64_t N = 0; N + 1 <= S; ++N) {
      const double r0 = chi0.ratio(N), ru = chi_u.ratio(N), rp = chi_p.ratio(N);
      if (std::isnan(r0) || std::isnan(ru) || std::isnan(rp)) continue;
      const double up = ru - r0, dn = r0 - rp;
      res.worst = std::max({res.worst, up, dn});
      if (up > 1e-12 || dn > 1e-12) ++res.failures;
    }
  }
  return res;
}

// extremal distributions are fixed points of their operations
inline CheckResult check_fixed_points(std::uint64_t seed, std::int64_t cases) {
  CheckResult res{"extremal_fixed_points", cases, 0, 0.0};
  std::mt19937_64 rng(seed ^ 0x2545f4914f6cdd1dull);
  for (std::int64_t c = 0; c < cases; ++c) {
    const auto [P, l1] = random_feasible_pair(rng);
    const auto min_spec = minimizing_distribution(P, l1);
    const auto min_dist = expand(min_spec, 100000);
    const auto S = static_cast<std::int64_t>(min_dist.size());
    if (S >= 4) {
      for (int trial = 0; trial < 4; ++trial) {
        std::size_t j1 = 1 + rng() % (S - 3);
        std::size_t j2 = j1 + 1 + rng() % (S - 1 - j1 - 1);
        std::size_t j3 = j2 + 1 + rng() % (S - 1 - j2);
        const auto img = gamma_uniform(min_dist, j1, j2, j3);
        double d = 0.0;
        for (std::size_t j = 0; j < min_dist.size(); ++j)
          d = std::max(d, std::abs(img[j] - min_dist[j]));
        res.worst = std::max(res.worst, d);
        if (d > 1e-12) ++res.failures;
      }
    }
    const auto host =
        static_cast<std::int64_t>(snapped_ceil((1.0 - l1) * (1.0 - l1) / (P - l1 * l1)));
    const auto S_max = std::max<std::int64_t>(host + 3, 6);
    try {
      const auto max_spec = maximizing_distribution(P, l1, S_max);
      const auto max_dist = expand(max_spec, 100000);
      const auto Sm = static_cast<std::int64_t>(max_dist.size());
      if (Sm >= 4) {
        for (int trial = 0; trial < 4; ++trial) {
          std::size_t j1 = 1 + rng() % (Sm - 3);
          std::size_t j2 = j1 + 1 + rng() % (Sm - 1 - j1 - 1);
          std::size_t j3 = j2 + 1 + rng() % (Sm - 1 - j2);
          const auto img = gamma_peak(max_dist, j1, j2, j3, max_dist.lambda1());
          double d = 0.0;
          for (std::size_t j = 0; j < max_dist.size(); ++j)
            d = std::max(d, std::abs(img[j] - max_dist[j]));
          res.worst = std::max(res.worst, d);
          if (d > 1e-12) ++res.failures;
        }
      }
    } catch (const STooSmall&) {
      // S_max below the admissible finite range for this pair; skip
    }
  }
  return res;
}

}  // namespace detail

inline VerifyReport verify_properties(std::uint64_t seed, std::int64_t cases,
                                      bool inject_fault = false) {
  if (cases < 1) throw OutOfRange("verify: cases must be >= 1");
  VerifyReport rep;
  rep.seed = seed;
  rep.cases = cases;
  rep.checks.push_back(detail::check_engine_agreement(seed, cases, inject_fault));
  rep.checks.push_back(detail::check_universal_identities(seed, cases));
  rep.checks.push_back(detail::check_hierarchy_containment(seed, std::max<std::int64_t>(cases / 4, 1)));
  rep.checks.push_back(detail::check_gamma_monotonicity(seed, cases));
  rep.checks.push_back(detail::check_fixed_points(seed, std::max<std::int64_t>(cases / 4, 1)));
  return rep;
}

inline json to_json(const VerifyReport& rep) {
  json checks = json::array();
  for (const auto& c : rep.checks)
    checks.push_back(json{{"name", c.name},
                          {"cases", c.cases},
                          {"failures", c.failures},
                          {"worst_deviation", c.worst}});
  return json{{"seed", rep.seed}, {"cases", rep.cases}, {"passed", rep.passed()},
              {"checks", checks}};
}

inline RunResult run_verify(std::uint64_t seed, std::int64_t cases, const std::string& out_path,
                            bool inject_fault = false) {
  RunResult result;
  try {
    const auto rep = verify_properties(seed, cases, inject_fault);
    const std::string path = detail::resolve_out(out_path, "verify_report.json");
    std::ofstream os(path);
    if (!os) {
      result.exit_code = kExitIoFailure;
      result.message = "cannot open " + path;
      return result;
    }
    os << to_json(rep).dump(2) << "\n";
    result.outputs.push_back(path);
    if (!rep.passed()) {
      result.exit_code = kExitInternal;
      result.message = "property checks failed";
    }
  } catch (const OutOfRange& e) {
    result.exit_code = kExitBadArguments;
    result.message = e.what();
  } catch (const std::exception& e) {
    result.exit_code = kExitInternal;
    result.message = e.what();
  }
  return result;
}

// -- sweeps ----------------------------------------------------------------------

namespace detail {

inline std::vector<SweepRow> compute_sweep_rows(const SweepConfig& config) {
  if (!(config.range.start < config.range.stop) || config.range.steps < 2)
    throw OutOfRange("sweep: range requires start < stop and steps >= 2");
  const std::int64_t n = config.range.steps;
  const double step = (config.range.stop - config.range.start) / static_cast<double>(n - 1);

  std::optional<ChiSeries> dist_series;
  if (!config.dist_path.empty() && config.mode == SweepMode::SweepN) {
    const auto dist = load_distribution(config.dist_path);
    dist_series = chi_series_esp(dist, static_cast<std::int64_t>(config.range.stop) + 1);
  }

  std::vector<SweepRow> rows(static_cast<std::size_t>(n));
  parallel_for(n, config.jobs, [&](std::int64_t i) {
    const double x = config.range.start + static_cast<double>(i) * step;
    double P = config.P, l1 = config.lambda1;
    std::int64_t N = config.N;
    switch (config.mode) {
      case SweepMode::SweepLambda1: l1 = x; break;
      case SweepMode::SweepP: P = x; break;
      case SweepMode::SweepN: N = static_cast<std::int64_t>(std::llround(x)); break;
      default: throw OutOfRange("compute_sweep_rows: not a sweep mode");
    }
    auto row = compute_row(i, P, l1, N);
    if (dist_series && !row.skipped && N < dist_series->n_max()) {
      row.chi_dist = dist_series->chi(N);
      row.ratio_dist = dist_series->ratio(N);
    }
    rows[static_cast<std::size_t>(i)] = std::move(row);
  });
  return rows;
}

inline int write_rows(const SweepConfig& config, const std::vector<SweepRow>& rows,
                      const std::string& path) {
  std::ofstream os(path);
  if (!os) return kExitIoFailure;
  const bool with_dist = !config.dist_path.empty() && config.mode == SweepMode::SweepN;
  if (config.format == OutputFormat::Csv)
    write_sweep_csv(os, rows, with_dist);
  else
    os << sweep_rows_json(rows, with_dist).dump(2) << "\n";
  return os ? kExitOk : kExitIoFailure;
}

}  // namespace detail

inline RunResult run_figure(const SweepConfig& config);  // below

inline RunResult run_sweep(const SweepConfig& config) {
  RunResult result;
  try {
    switch (config.mode) {
      case SweepMode::Verify:
        return run_verify(config.seed, config.N > 0 ? config.N : 100, config.out_path);
      case SweepMode::Figure:
        return run_figure(config);
      case SweepMode::Chi: {
        const auto dist = detail::load_distribution(config.dist_path);
        const std::int64_t n_max = config.n_max >= 0 ? config.n_max
                                                     : static_cast<std::int64_t>(dist.size());
        ChiSeries series = [&] {
          if (config.engine == "newton_girard") {
            const auto summary = summarize(dist, std::max<std::int64_t>(n_max, 2));
            return chi_series_newton_girard(summary.power_sums, n_max);
          }
          if (config.engine == "multiplicity")
            return chi_multiplicity(detail::group_blocks(dist), n_max);
          if (config.engine != "esp") throw OutOfRange("unknown engine: " + config.engine);
          return chi_series_esp(dist, n_max);
        }();
        const bool csv = config.format == OutputFormat::Csv;
        const std::string path =
            detail::resolve_out(config.out_path, csv ? "chi_series.csv" : "chi_series.json");
        std::ofstream os(path);
        if (!os) {
          result.exit_code = kExitIoFailure;
          return result;
        }
        if (csv)
          write_chi_csv(os, series);
        else
          os << to_json(series).dump(2) << "\n";
        result.outputs.push_back(path);
        return result;
      }
      case SweepMode::Bounds: {
        if (!feasible(config.P, config.lambda1)) {
          result.exit_code = kExitInfeasible;
          result.message = "infeasible (P, lambda1)";
          return result;
        }
        const auto rep = bounds_report(config.P, config.lambda1, config.N);
        const bool csv = config.format == OutputFormat::Csv;
        const std::string path =
            detail::resolve_out(config.out_path, csv ? "bounds.csv" : "bounds.json");
        std::ofstream os(path);
        if (!os) {
          result.exit_code = kExitIoFailure;
          return result;
        }
        if (csv) {
          os << kBoundsCsvHeader << "\n";
          write_bounds_csv_row(os, rep);
          os << "\n";
        } else {
          os << to_json(rep).dump(2) << "\n";
        }
        result.outputs.push_back(path);
        return result;
      }
      case SweepMode::SweepLambda1:
      case SweepMode::SweepP:
      case SweepMode::SweepN: {
        // fixed parameters must be admissible before any grid point runs
        const bool bad_fixed =
            (config.mode == SweepMode::SweepN && !feasible(config.P, config.lambda1)) ||
            (config.mode == SweepMode::SweepLambda1 &&
             (!(config.P > 0.0) || config.P > 1.0 || config.N < 0)) ||
            (config.mode == SweepMode::SweepP &&
             (!(config.lambda1 > 0.0) || config.lambda1 > 1.0 || config.N < 0));
        if (bad_fixed) {
          result.exit_code = kExitInfeasible;
          result.message = "infeasible fixed parameters";
          return result;
        }
        const auto rows = detail::compute_sweep_rows(config);
        const bool csv = config.format == OutputFormat::Csv;
        const std::string path =
            detail::resolve_out(config.out_path, csv ? "sweep.csv" : "sweep.json");
        result.exit_code = detail::write_rows(config, rows, path);
        if (result.exit_code == kExitOk) result.outputs.push_back(path);
        return result;
      }
    }
  } catch (const HierarchyViolation& e) {
    result.exit_code = kExitInternal;
    result.message = e.what();
  } catch (const InfeasiblePair& e) {
    result.exit_code = kExitInfeasible;
    result.message = e.what();
  } catch (const Error& e) {
    result.exit_code = kExitBadArguments;
    result.message = e.what();
  } catch (const std::exception& e) {
    result.exit_code = kExitIoFailure;
    result.message = e.what();
  }
  return result;
}

// -- figure presets ---------------------------------------------------------------

namespace detail {

inline SweepConfig base_axis_sweep(const SweepConfig& src, SweepMode mode, double P, double l1,
                                   std::int64_t N, Range range, const std::string& path) {
  SweepConfig c = src;
  c.mode = mode;
  c.P = P;
  c.lambda1 = l1;
  c.N = N;
  c.range = range;
  c.out_path = path;
  c.format = OutputFormat::Csv;
  return c;
}

// single-coefficient CSVs of the extremal pair at an anchor lambda1
inline void write_fig4_anchor(const std::string& dir, const std::string& tag, double P,
                              double l1, std::vector<std::string>& outputs) {
  const auto min_spec = minimizing_distribution(P, l1);
  const auto max_spec = maximizing_distribution(P, l1);
  const auto min_dist = expand(min_spec, 100000);
  const auto max_dist = expand(max_spec, 64);  // S_cut = 64 slices for the infinite tail
  for (const auto& [name, dist] : {std::pair<std::string, const SchmidtDistribution&>{
                                       "fig4_min_" + tag + ".csv", min_dist},
                                   {"fig4_max_" + tag + ".csv", max_dist}}) {
    const std::string path = dir + "/" + name;
    std::ofstream os(path);
    if (!os) throw Error("cannot open " + path);
    write_distribution_csv(os, dist);
    outputs.push_back(path);
  }
}

}  // namespace detail

inline RunResult run_figure(const SweepConfig& config) {
  RunResult result;
  const std::string dir =
      config.out_path.empty() ? detail::default_out_dir() : config.out_path;
  std::error_code ec;
  std::filesystem::create_directories(dir, ec);
  try {
    switch (config.figure) {
      case FigureId::Fig1:
      case FigureId::Fig3: {
        const bool fig1 = config.figure == FigureId::Fig1;
        const char* tag = fig1 ? "fig1" : "fig3";
        const double P = 0.2, l1 = 0.3;
        const auto Ns = fig1 ? std::array<std::int64_t, 2>{4, 10}
                             : std::array<std::int64_t, 2>{3, 30};
        for (std::int64_t N : Ns) {
          {
            const std::string path =
                dir + "/" + tag + "_ratio_vs_lambda1_N" + std::to_string(N) + ".csv";
            auto c = detail::base_axis_sweep(config, SweepMode::SweepLambda1, P, 0.0, N,
                                             {lambda1_min(P), std::sqrt(P), 200}, path);
            auto rows = detail::compute_sweep_rows(c);
            if (const int code = detail::write_rows(c, rows, path); code != kExitOk) {
              result.exit_code = code;
              return result;
            }
            result.outputs.push_back(path);
          }
          {
            const std::string path =
                dir + "/" + tag + "_ratio_vs_P_N" + std::to_string(N) + ".csv";
            auto c = detail::base_axis_sweep(config, SweepMode::SweepP, 0.0, l1, N,
                                             {p_min(l1), p_max(l1), 200}, path);
            auto rows = detail::compute_sweep_rows(c);
            if (const int code = detail::write_rows(c, rows, path); code != kExitOk) {
              result.exit_code = code;
              return result;
            }
            result.outputs.push_back(path);
          }
        }
        return result;
      }
      case FigureId::Fig4: {
        const double P = 0.2;
        const std::string path = dir + "/fig4_extremal_specs.csv";
        std::ofstream os(path);
        if (!os) {
          result.exit_code = kExitIoFailure;
          return result;
        }
        os << "index,lambda1,min_S,min_lambda2,min_lambdaS,max_L,max_lambdaL,max_lambdaSigma\n";
        const double lo = lambda1_min(P), hi = std::sqrt(P);
        const std::int64_t steps = 200;
        for (std::int64_t i = 0; i < steps; ++i) {
          const double l1 = lo + (hi - lo) * static_cast<double>(i) / static_cast<double>(steps - 1);
          os << i << "," << format_double(l1) << ",";
          try {
            const auto mn = minimizing_distribution(P, l1);
            os << mn.S << "," << format_double(mn.lambda2) << "," << format_double(mn.lambdaS);
          } catch (const DegeneratePeaked&) {
            os << "inf,nan,nan";
          }
          const auto mx = maximizing_distribution(P, l1);
          os << "," << mx.L << "," << format_double(mx.lambdaL) << ","
             << format_double(mx.lambdaSigma) << "\n";
        }
        result.outputs.push_back(path);
        detail::write_fig4_anchor(dir, "a", P, 0.215, result.outputs);
        detail::write_fig4_anchor(dir, "b", P, 0.42, result.outputs);
        return result;
      }
      case FigureId::Fig5: {
        const double P = 0.001;
        const double lo = lambda1_min(P), hi = std::sqrt(P);
        const std::array<double, 4> weights = {0.9, 0.5, 0.1, 0.01};
        const std::array<const char*, 4> tags = {"0.0041", "0.0163", "0.0286", "0.0313"};
        for (std::size_t k = 0; k < weights.size(); ++k) {
          const double l1 = weights[k] * lo + (1.0 - weights[k]) * hi;
          const std::string path = dir + "/fig5_l1_" + tags[k] + ".csv";
          std::ofstream os(path);
          if (!os) {
            result.exit_code = kExitIoFailure;
            return result;
          }
          os << "N";
          for (const char* name : kChainNames) os << ",one_minus_ratio_" << name;
          os << ",one_minus_smooth_ratio_lower,one_minus_smooth_ratio_upper\n";
          const std::int64_t n_hi = 1000;
          std::vector<detail::SweepRow> rows(static_cast<std::size_t>(n_hi));
          detail::parallel_for(n_hi, config.jobs, [&](std::int64_t i) {
            rows[static_cast<std::size_t>(i)] = detail::compute_row(i, P, l1, i + 1);
          });
          for (const auto& row : rows) {
            os << row.N;
            for (std::size_t i = 0; i < 6; ++i)
              os << "," << format_double(1.0 - row.report->ratio_chain[i]);
            os << "," << format_double(1.0 - row.smooth_ratio_lower) << ","
               << format_double(1.0 - row.smooth_ratio_upper) << "\n";
          }
          result.outputs.push_back(path);
        }
        return result;
      }
    }
  } catch (const HierarchyViolation& e) {
    result.exit_code = kExitInternal;
    result.message = e.what();
  } catch (const InfeasiblePair& e) {
    result.exit_code = kExitInfeasible;
    result.message = e.what();
  } catch (const std::exception& e) {
    result.exit_code = kExitIoFailure;
    result.message = e.what();
  }
  return result;
}

}  // namespace coboson
