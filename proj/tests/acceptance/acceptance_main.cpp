// Acceptance gate: runs the release criteria and prints one PASS/FAIL/SKIP
// line per criterion. Exits nonzero if any executed criterion fails.
//
// Usage: acceptance [--cli /path/to/micromob] [--austin /path/to/trips.csv]
//
// The full-data reproduction criteria (8-10) need the public trips export
// (several million rows); they are skipped unless --austin or the
// MICROMOB_AUSTIN_CSV environment variable provides it.

#include <sys/wait.h>

#include <algorithm>
#include <chrono>
#include <cmath>
#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <optional>
#include <sstream>
#include <string>
#include <vector>

#include <json.hpp>

#include "micromob/cluster.hpp"
#include "micromob/consensus.hpp"
#include "micromob/errors.hpp"
#include "micromob/profile.hpp"
#include "micromob/ranksum.hpp"
#include "micromob/rng.hpp"
#include "micromob/trips.hpp"
#include "../support/fixture.hpp"

namespace fs = std::filesystem;
using namespace micromob;

namespace {

struct Tally {
  int passed = 0;
  int failed = 0;
  int skipped = 0;
};

void report(Tally& tally, int criterion, bool ok, const std::string& what,
            const std::string& detail) {
  (ok ? tally.passed : tally.failed)++;
  std::cout << (ok ? "PASS" : "FAIL") << " criterion " << criterion << ": "
            << what << " (" << detail << ")\n";
}

void skip(Tally& tally, int criterion, const std::string& what,
          const std::string& why) {
  ++tally.skipped;
  std::cout << "SKIP criterion " << criterion << ": " << what << " (" << why
            << ")\n";
}

double seconds_since(std::chrono::steady_clock::time_point start) {
  return std::chrono::duration<double>(std::chrono::steady_clock::now() -
                                       start)
      .count();
}

std::string format_seconds(double s) {
  std::ostringstream out;
  out.precision(2);
  out << std::fixed << s << " s";
  return out.str();
}

// ---------------------------------------------------------------------------
// shared data builders

AnalysisDataset blobs(std::size_t per_blob, double mean_a, double mean_b,
                      double stddev, uint64_t seed) {
  Rng rng(seed);
  AnalysisDataset dataset;
  dataset.mode = Mode::day_of_week;
  for (std::size_t i = 0; i < per_blob; ++i) {
    LabeledPoint a;
    a.feature = rng.normal(mean_a, stddev);
    a.label = Label::regime_a;
    a.period = 3;
    dataset.points.push_back(a);
    LabeledPoint b;
    b.feature = rng.normal(mean_b, stddev);
    b.label = Label::regime_b;
    b.period = 0;
    dataset.points.push_back(b);
  }
  return dataset;
}

// ---------------------------------------------------------------------------
// criterion 1: stability of the matching

std::size_t blocking_pairs(const PreferenceProfile& prefs,
                           const std::vector<std::size_t>& quotas,
                           const std::vector<int>& assignment) {
  const std::size_t n = prefs.point_prefs.size();
  const std::size_t k = quotas.size();
  std::vector<std::vector<std::size_t>> members(k);
  for (std::size_t i = 0; i < n; ++i) {
    members[static_cast<std::size_t>(assignment[i])].push_back(i);
  }
  std::size_t count = 0;
  for (std::size_t i = 0; i < n; ++i) {
    const auto& order = prefs.point_prefs[i];
    for (const int c : order) {
      if (c == assignment[i]) break;  // reached the current match: no envy
      const auto cu = static_cast<std::size_t>(c);
      bool centroid_prefers = members[cu].size() < quotas[cu];
      for (const std::size_t j : members[cu]) {
        if (prefs.centroid_rank[cu][i] < prefs.centroid_rank[cu][j]) {
          centroid_prefers = true;
          break;
        }
      }
      if (centroid_prefers) ++count;
    }
  }
  return count;
}

bool criterion_stability(Tally& tally) {
  const auto start = std::chrono::steady_clock::now();
  Rng rng(1);
  std::size_t total_blocking = 0;
  for (int trial = 0; trial < 1000; ++trial) {
    const std::size_t n = 2 + rng.below(11);  // 2..12
    const int k = 2 + static_cast<int>(rng.below(2));  // 2..3
    std::vector<LabeledPoint> points(n);
    for (auto& p : points) {
      p.feature = rng.uniform(0.0, 10.0);
      p.label = rng.below(2) == 0 ? Label::regime_a : Label::regime_b;
      p.period = static_cast<int>(rng.below(7));
    }
    std::vector<double> centroids(static_cast<std::size_t>(k));
    for (auto& c : centroids) c = rng.uniform(0.0, 10.0);

    const DistanceMetric metric = trial % 2 == 0
                                      ? DistanceMetric::squared_euclidean
                                      : DistanceMetric::absolute;
    std::vector<int> previous;
    const std::vector<int>* previous_ptr = nullptr;
    if (trial % 3 == 0) {  // exercise the purity-driven rounds too
      previous.resize(n);
      for (auto& a : previous) a = static_cast<int>(rng.below(
          static_cast<uint64_t>(k)));
      previous_ptr = &previous;
    }
    const QuotaPolicy policy =
        trial % 2 == 0 ? QuotaPolicy::balanced : QuotaPolicy::unbounded;

    const auto prefs = build_preferences(points, centroids, metric,
                                         previous_ptr);
    const auto quotas = quotas_for(n, k, policy);
    const auto assignment = deferred_acceptance(prefs, quotas);
    total_blocking += blocking_pairs(prefs, quotas, assignment);
  }
  const double elapsed = seconds_since(start);
  const bool ok = total_blocking == 0 && elapsed < 30.0;
  report(tally, 1, ok, "deferred acceptance yields stable matchings",
         "1000 random instances, " + std::to_string(total_blocking) +
             " blocking pairs, " + format_seconds(elapsed));
  return ok;
}

// ---------------------------------------------------------------------------
// criterion 2: determinism and geometric invariance

bool criterion_invariance(Tally& tally) {
  int repeat_ok = 0, translate_ok = 0, scale_ok = 0;
  for (int trial = 0; trial < 100; ++trial) {
    Rng rng(1000 + static_cast<uint64_t>(trial));
    const std::size_t n = 20 + rng.below(41);
    const int k = 2 + static_cast<int>(rng.below(3));
    AnalysisDataset dataset;
    dataset.mode = Mode::day_of_week;
    dataset.points.resize(n);
    for (auto& p : dataset.points) {
      p.feature = rng.uniform(0.0, 8.0);
      p.label = rng.below(2) == 0 ? Label::regime_a : Label::regime_b;
      p.period = static_cast<int>(rng.below(7));
    }

    ClusterConfig config;
    config.k = k;
    config.seed = static_cast<uint64_t>(trial);

    const ClusterModel base = fit(dataset, config);
    const ClusterModel again = fit(dataset, config);
    if (again.assignment == base.assignment &&
        again.centroids == base.centroids &&
        again.iterations == base.iterations) {
      ++repeat_ok;
    }

    const double shift = rng.uniform(-50.0, 50.0);
    AnalysisDataset translated = dataset;
    for (auto& p : translated.points) p.feature += shift;
    const ClusterModel shifted = fit(translated, config);
    bool centroids_shifted = shifted.centroids.size() == base.centroids.size();
    for (std::size_t c = 0; centroids_shifted && c < base.centroids.size();
         ++c) {
      const double expected = base.centroids[c] + shift;
      const double scale_ref =
          std::max({1.0, std::fabs(expected), std::fabs(shift)});
      if (std::fabs(shifted.centroids[c] - expected) > 1e-9 * scale_ref) {
        centroids_shifted = false;
      }
    }
    if (shifted.assignment == base.assignment && centroids_shifted) {
      ++translate_ok;
    }

    const double factor = std::exp(rng.uniform(-1.5, 1.5));
    AnalysisDataset scaled = dataset;
    for (auto& p : scaled.points) p.feature *= factor;
    if (fit(scaled, config).assignment == base.assignment) ++scale_ok;
  }
  const bool ok = repeat_ok == 100 && translate_ok == 100 && scale_ok == 100;
  report(tally, 2, ok, "clustering is deterministic and frame-invariant",
         "repeat " + std::to_string(repeat_ok) + "/100, translate " +
             std::to_string(translate_ok) + "/100, scale " +
             std::to_string(scale_ok) + "/100");
  return ok;
}

// ---------------------------------------------------------------------------
// criterion 3: separable recovery

bool criterion_recovery(Tally& tally) {
  int recovered = 0;
  double worst_mean_err = 0.0;
  for (uint64_t seed = 1; seed <= 100; ++seed) {
    const AnalysisDataset dataset = blobs(100, 3.0, 5.0, 0.1, seed);
    ClusterConfig config;
    config.k = 2;
    config.seed = seed;
    ClusterModel model = fit(dataset, config);
    order_clusters_by_mean(model);
    const double err = std::max(std::fabs(model.stats[0].mean - 3.0),
                                std::fabs(model.stats[1].mean - 5.0));
    worst_mean_err = std::max(worst_mean_err, err);
    if (model.stats[0].purity == 1.0 && model.stats[1].purity == 1.0 &&
        err <= 0.05) {
      ++recovered;
    }
  }
  const bool ok = recovered == 100;
  std::ostringstream detail;
  detail.precision(4);
  detail << recovered << "/100 seeds, worst mean error " << worst_mean_err;
  report(tally, 3, ok, "two separated blobs are recovered exactly",
         detail.str());
  return ok;
}

// ---------------------------------------------------------------------------
// criterion 4: consensus model order

bool criterion_consensus(Tally& tally) {
  int chose_two = 0;
  std::vector<int> histogram(7, 0);
  for (uint64_t seed = 1; seed <= 100; ++seed) {
    const AnalysisDataset dataset = blobs(100, 3.0, 5.0, 0.1, seed);
    ConsensusConfig config;
    config.k_min = 2;
    config.k_max = 5;
    config.resamples = 20;
    config.seed = seed;
    ClusterConfig cluster_template;
    cluster_template.seed = seed;
    const ConsensusCurve curve =
        run_consensus(dataset, config, cluster_template);
    ++histogram[static_cast<std::size_t>(curve.chosen_k)];
    if (curve.chosen_k == 2) ++chose_two;
  }

  // With every resample equal to the full dataset and a deterministic fit,
  // each pair either always or never lands together.
  bool binary = true;
  {
    const AnalysisDataset dataset = blobs(100, 3.0, 5.0, 0.1, 1);
    ConsensusConfig config;
    config.k_min = 2;
    config.k_max = 5;
    config.resamples = 20;
    config.fraction = 1.0;
    std::vector<ConsensusMatrix> matrices;
    run_consensus(dataset, config, ClusterConfig{}, nullptr, &matrices);
    for (const auto& matrix : matrices) {
      for (const double v : matrix.entries()) {
        if (v != 0.0 && v != 1.0) binary = false;
      }
    }
  }

  const bool ok = chose_two >= 95 && binary;
  std::ostringstream detail;
  detail << "k=2 chosen in " << chose_two << "/100 seeds (k histogram 2..5:";
  for (int k = 2; k <= 5; ++k) {
    detail << " " << histogram[static_cast<std::size_t>(k)];
  }
  detail << "), full-fraction entries "
         << (binary ? "all binary" : "NOT binary");
  report(tally, 4, ok, "consensus selects the true cluster count",
         detail.str());
  return ok;
}

// ---------------------------------------------------------------------------
// criterion 5: rank-sum exactness

// Enumerates every size-n1 subset of the pooled ranks, tracking the rank sum.
void enumerate_splits(const std::vector<double>& ranks, std::size_t next,
                      std::size_t left, double sum, double observed,
                      std::size_t& below, std::size_t& above,
                      std::size_t& total) {
  if (left == 0) {
    ++total;
    if (sum <= observed + 1e-9) ++below;
    if (sum >= observed - 1e-9) ++above;
    return;
  }
  if (ranks.size() - next < left) return;
  enumerate_splits(ranks, next + 1, left - 1, sum + ranks[next], observed,
                   below, above, total);
  enumerate_splits(ranks, next + 1, left, sum, observed, below, above, total);
}

double brute_force_p(const std::vector<double>& x,
                     const std::vector<double>& y) {
  std::vector<double> pooled = x;
  pooled.insert(pooled.end(), y.begin(), y.end());
  const std::vector<double> ranks = rank_with_ties(pooled);
  double observed = 0.0;
  for (std::size_t i = 0; i < x.size(); ++i) observed += ranks[i];
  std::size_t below = 0, above = 0, total = 0;
  enumerate_splits(ranks, 0, x.size(), 0.0, observed, below, above, total);
  return std::min(
      1.0, 2.0 * static_cast<double>(std::min(below, above)) /
               static_cast<double>(total));
}

bool criterion_ranksum(Tally& tally) {
  const auto start = std::chrono::steady_clock::now();
  const auto split = ranksum_test({1.0, 2.0, 3.0}, {4.0, 5.0, 6.0});
  const bool hand_ok =
      std::fabs(split.p_two_sided - 0.1) <= 1e-12 &&
      ranksum_test({1.0, 2.0, 3.0}, {1.0, 2.0, 3.0}).p_two_sided == 1.0;

  std::size_t cases = 0, mismatches = 0;
  double worst = 0.0;
  Rng rng(5);
  for (std::size_t n1 = 1; n1 <= 8; ++n1) {
    for (std::size_t n2 = 1; n2 <= 8; ++n2) {
      for (int trial = 0; trial < 200; ++trial) {
        std::vector<double> x(n1), y(n2);
        for (auto& v : x) v = rng.unit();
        for (auto& v : y) v = rng.unit();
        const double exact =
            ranksum_test(x, y, RankSumMethod::exact).p_two_sided;
        const double reference = brute_force_p(x, y);
        const double err = std::fabs(exact - reference);
        worst = std::max(worst, err);
        ++cases;
        if (err > 1e-12) ++mismatches;
      }
    }
  }
  const bool ok = hand_ok && mismatches == 0;
  std::ostringstream detail;
  detail << cases << " enumerated cases, " << mismatches
         << " mismatches, worst |dp| " << worst << ", "
         << format_seconds(seconds_since(start));
  if (!hand_ok) detail << ", hand cases FAILED";
  report(tally, 5, ok, "exact rank-sum p equals brute-force enumeration",
         detail.str());
  return ok;
}

// ---------------------------------------------------------------------------
// criterion 6: filter boundaries

bool criterion_filter(Tally& tally) {
  const FilterPolicy policy;
  TripRecord trip;
  trip.duration_s = 600.0;

  const auto kept_at = [&](double distance, double duration) {
    TripRecord t = trip;
    t.distance_m = distance;
    t.duration_s = duration;
    return policy.keeps(t);
  };

  struct Case {
    double distance, duration;
    bool expect_kept;
  };
  const std::vector<Case> cases = {
      {160.9344, 600.0, true},    // exactly 0.1 mi: kept
      {160.9343, 600.0, false},   // one tenth-millimeter short: rejected
      {804672.0, 600.0, false},   // exactly 500 mi: rejected (exclusive)
      {804671.9, 600.0, true},
      {1000.0, 86399.0, true},    // one second under a day: kept
      {1000.0, 86400.0, false},   // exactly a day: rejected (exclusive)
      {1000.0, 1.0, true},
      {1000.0, 0.0, false},
  };
  std::size_t wrong = 0;
  for (const Case& c : cases) {
    if (kept_at(c.distance, c.duration) != c.expect_kept) ++wrong;
  }
  const bool ok = wrong == 0;
  report(tally, 6, ok, "trip filter thresholds are bit-exact",
         std::to_string(cases.size()) + " boundary cases, " +
             std::to_string(wrong) + " wrong");
  return ok;
}

// ---------------------------------------------------------------------------
// criterion 7: end-to-end fixture run through the CLI

std::string read_file(const fs::path& path) {
  std::ifstream in(path, std::ios::binary);
  std::ostringstream out;
  out << in.rdbuf();
  return out.str();
}

int run_command(const std::string& command) {
  const int status = std::system(command.c_str());
  if (status == -1 || !WIFEXITED(status)) return -1;
  return WEXITSTATUS(status);
}

bool criterion_cli(Tally& tally, const std::string& cli) {
  if (cli.empty()) {
    skip(tally, 7, "end-to-end fixture run",
         "pass --cli or set MICROMOB_CLI_PATH to the micromob binary");
    return true;
  }

  testing::TempDir tmp("acceptance_cli");
  const fs::path input = tmp.path() / "trips.csv";
  testing::write_fixture_file(input);
  const fs::path config_path = tmp.path() / "analysis.conf";
  {
    std::ofstream config(config_path, std::ios::binary);
    config << "input = " << input.string() << "\n"
           << "granularity = per_period\n"
           << "k = auto\n"
           << "k_max = 4\n"
           << "resamples = 20\n"
           << "seed = 42\n";
  }

  const fs::path out1 = tmp.path() / "run1";
  const fs::path out2 = tmp.path() / "run2";
  const auto run_analyze = [&](const fs::path& out_dir) {
    return run_command("\"" + cli + "\" analyze --config \"" +
                       config_path.string() + "\" --out \"" +
                       out_dir.string() + "\" > \"" +
                       (tmp.path() / "stdout.txt").string() + "\" 2> \"" +
                       (tmp.path() / "stderr.txt").string() + "\"");
  };

  const auto start = std::chrono::steady_clock::now();
  const int first_exit = run_analyze(out1);
  const double first_elapsed = seconds_since(start);
  const int second_exit = run_analyze(out2);

  bool ok = first_exit == 0 && second_exit == 0 && first_elapsed < 10.0;
  std::size_t files_declared = 0, files_missing = 0, files_differing = 0;
  if (ok) {
    const auto manifest =
        nlohmann::json::parse(read_file(out1 / "manifest.json"));
    files_declared = manifest.at("files").size();
    for (const auto& name : manifest.at("files")) {
      const std::string file = name.get<std::string>();
      if (!fs::exists(out1 / file) || !fs::exists(out2 / file)) {
        ++files_missing;
      } else if (read_file(out1 / file) != read_file(out2 / file)) {
        ++files_differing;
      }
    }
    if (read_file(out1 / "manifest.json") !=
        read_file(out2 / "manifest.json")) {
      ++files_differing;
    }
    ok = files_declared > 0 && files_missing == 0 && files_differing == 0;
  }
  std::ostringstream detail;
  detail << "exit " << first_exit << "/" << second_exit << ", "
         << format_seconds(first_elapsed) << ", " << files_declared
         << " declared files, " << files_missing << " missing, "
         << files_differing << " differing between reruns";
  report(tally, 7, ok, "10k-row fixture analyzes fast and reproducibly",
         detail.str());
  return ok;
}

// ---------------------------------------------------------------------------
// criteria 8-10: full-data reproduction (optional)

struct SliceFit {
  ClusterModel model;
  AnalysisDataset dataset;
};

SliceFit fit_slice(const std::vector<TripRecord>& trips, VehicleType vehicle,
                   Mode mode, Granularity granularity) {
  SliceFit out;
  out.dataset = build_dataset(trips, mode, granularity, vehicle, {});
  ClusterConfig config;
  config.k = 2;
  out.model = fit(out.dataset, config);
  order_clusters_by_mean(out.model);
  return out;
}

bool means_within(const ClusterModel& model, double slow, double fast,
                  double tolerance) {
  return std::fabs(model.stats[0].mean - slow) <= tolerance &&
         std::fabs(model.stats[1].mean - fast) <= tolerance;
}

std::string means_of(const ClusterModel& model) {
  std::ostringstream out;
  out.precision(3);
  out << std::fixed << model.stats[0].mean << "/" << model.stats[1].mean;
  return out.str();
}

// Maximal cyclic run of same-cluster hours containing `anchor_hour`, as
// inclusive [first, last] hours ({-1, -1} when the anchor hour is absent).
std::pair<int, int> cluster_block(const std::vector<PeriodColor>& coloring,
                                  int anchor_hour) {
  std::vector<int> by_hour(24, -1);
  for (const PeriodColor& c : coloring) {
    by_hour[static_cast<std::size_t>(c.period)] = c.cluster;
  }
  const int cluster = by_hour[static_cast<std::size_t>(anchor_hour)];
  if (cluster < 0) return {-1, -1};
  int first = anchor_hour;
  while (by_hour[static_cast<std::size_t>((first + 23) % 24)] == cluster &&
         (first + 23) % 24 != anchor_hour) {
    first = (first + 23) % 24;
  }
  int last = anchor_hour;
  while (by_hour[static_cast<std::size_t>((last + 1) % 24)] == cluster &&
         (last + 1) % 24 != anchor_hour) {
    last = (last + 1) % 24;
  }
  return {first, last};
}

bool within_hour(int actual, int expected) {
  const int diff = std::abs(actual - expected);
  return std::min(diff, 24 - diff) <= 1;
}

void criteria_full_data(Tally& tally, const std::string& austin_path) {
  const char* names[3] = {"day-of-week cluster means match the reference",
                          "time-of-day means and coloring match the reference",
                          "full-data rank-sum p-values are vanishing"};
  if (austin_path.empty()) {
    for (int i = 0; i < 3; ++i) {
      skip(tally, 8 + i, names[i],
           "set MICROMOB_AUSTIN_CSV or pass --austin with the full trips "
           "export");
    }
    return;
  }

  std::ifstream in(austin_path, std::ios::binary);
  if (!in) {
    for (int i = 0; i < 3; ++i) {
      report(tally, 8 + i, false, names[i],
             "cannot open '" + austin_path + "'");
    }
    return;
  }
  auto [raw, ingest] = parse_trips(in, SchemaMap::austin());
  const auto trips = filter_trips(raw, FilterPolicy{});
  raw.clear();
  raw.shrink_to_fit();
  std::cout << "  (full data: " << ingest.rows_read << " rows read, "
            << trips.size() << " trips after filtering)\n";

  // 8: day-of-week means, both aggregation units; either may match.
  {
    struct Target {
      VehicleType vehicle;
      double slow, fast;
    };
    const Target targets[2] = {{VehicleType::bicycle, 3.01, 3.44},
                               {VehicleType::scooter, 2.32, 2.55}};
    bool ok = true;
    std::ostringstream detail;
    for (const Target& t : targets) {
      const auto per_trip =
          fit_slice(trips, t.vehicle, Mode::day_of_week, Granularity::per_trip);
      const auto per_period = fit_slice(trips, t.vehicle, Mode::day_of_week,
                                        Granularity::per_period_per_date);
      const bool trip_hit = means_within(per_trip.model, t.slow, t.fast, 0.15);
      const bool period_hit =
          means_within(per_period.model, t.slow, t.fast, 0.15);
      ok = ok && (trip_hit || period_hit);
      detail << to_string(t.vehicle) << " per-trip " << means_of(per_trip.model)
             << (trip_hit ? " (hit)" : " (miss)") << ", per-period "
             << means_of(per_period.model)
             << (period_hit ? " (hit)" : " (miss)") << "; ";
    }
    report(tally, 8, ok, names[0], detail.str() + "targets 3.01/3.44, 2.32/2.55 within 0.15");
  }

  // 9: time-of-day means plus the overnight coloring block.
  {
    bool ok = true;
    std::ostringstream detail;

    const auto bike = fit_slice(trips, VehicleType::bicycle, Mode::time_of_day,
                                Granularity::per_period_per_date);
    const auto scooter = fit_slice(trips, VehicleType::scooter,
                                   Mode::time_of_day,
                                   Granularity::per_period_per_date);
    const bool bike_means = means_within(bike.model, 3.09, 3.32, 0.15);
    const bool scooter_means = means_within(scooter.model, 2.19, 2.78, 0.15);

    const auto bike_coloring =
        majority_period_coloring(bike.dataset, bike.model.assignment);
    const auto scooter_coloring =
        majority_period_coloring(scooter.dataset, scooter.model.assignment);
    // The overnight block: midnight through 11 AM for e-bikes, 3 AM through
    // noon for e-scooters, each endpoint within one hour.
    const auto bike_block = cluster_block(bike_coloring, 2);
    const auto scooter_block = cluster_block(scooter_coloring, 5);
    const bool bike_block_ok =
        within_hour(bike_block.first, 0) && within_hour(bike_block.second, 11);
    const bool scooter_block_ok = within_hour(scooter_block.first, 3) &&
                                  within_hour(scooter_block.second, 12);

    ok = bike_means && scooter_means && bike_block_ok && scooter_block_ok;
    detail << "bicycle means " << means_of(bike.model)
           << (bike_means ? " (hit)" : " (miss)") << ", block "
           << bike_block.first << ".." << bike_block.second
           << (bike_block_ok ? " (hit)" : " (miss)") << "; scooter means "
           << means_of(scooter.model) << (scooter_means ? " (hit)" : " (miss)")
           << ", block " << scooter_block.first << ".." << scooter_block.second
           << (scooter_block_ok ? " (hit)" : " (miss)");
    report(tally, 9, ok, names[1], detail.str());
  }

  // 10: the cluster speed distributions differ overwhelmingly.
  {
    bool ok = true;
    std::ostringstream detail;
    for (const VehicleType vehicle :
         {VehicleType::bicycle, VehicleType::scooter}) {
      const auto slice =
          fit_slice(trips, vehicle, Mode::day_of_week, Granularity::per_trip);
      std::vector<double> a, aw, b, bw;
      for (std::size_t i = 0; i < slice.dataset.points.size(); ++i) {
        const LabeledPoint& p = slice.dataset.points[i];
        if (slice.model.assignment[i] == 0) {
          a.push_back(p.feature);
          aw.push_back(p.weight);
        } else {
          b.push_back(p.feature);
          bw.push_back(p.weight);
        }
      }
      const auto result = ranksum_test_weighted(a, aw, b, bw);
      ok = ok && result.p_two_sided < 1e-10;
      detail << to_string(vehicle) << " p=" << result.p_two_sided << " ("
             << result.method << "); ";
    }
    report(tally, 10, ok, names[2], detail.str() + "threshold 1e-10");
  }
}

}  // namespace

int main(int argc, char** argv) {
  std::string cli;
  std::string austin;
  if (const char* env = std::getenv("MICROMOB_CLI_PATH")) cli = env;
  if (const char* env = std::getenv("MICROMOB_AUSTIN_CSV")) austin = env;
  for (int i = 1; i < argc; ++i) {
    const std::string arg = argv[i];
    if (arg == "--cli" && i + 1 < argc) {
      cli = argv[++i];
    } else if (arg == "--austin" && i + 1 < argc) {
      austin = argv[++i];
    } else {
      std::cerr << "usage: acceptance [--cli <micromob binary>] "
                   "[--austin <trips.csv>]\n";
      return 2;
    }
  }

  Tally tally;
  try {
    criterion_stability(tally);
    criterion_invariance(tally);
    criterion_recovery(tally);
    criterion_consensus(tally);
    criterion_ranksum(tally);
    criterion_filter(tally);
    criterion_cli(tally, cli);
    criteria_full_data(tally, austin);
  } catch (const std::exception& e) {
    std::cerr << "acceptance: unexpected error: " << e.what() << "\n";
    return 1;
  }

  std::cout << tally.passed << " passed, " << tally.failed << " failed, "
            << tally.skipped << " skipped\n";
  return tally.failed == 0 ? 0 : 1;
}
