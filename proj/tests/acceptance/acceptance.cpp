// Copyright 2026 The valclust Authors
//
// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
//
//     http://www.apache.org/licenses/LICENSE-2.0
//
// Unless required by applicable law or agreed to in writing, software
// distributed under the License is distributed on an "AS IS" BASIS,
// WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
// See the License for the specific language governing permissions and
// limitations under the License.

// Acceptance run: one PASS/FAIL line per criterion, exit status 1 if any fails.

#include <boost/rational.hpp>

#include <chrono>
#include <cmath>
#include <functional>
#include <iostream>
#include <map>
#include <random>
#include <set>
#include <sstream>
#include <thread>

#include "oracles.hpp"
#include "support.hpp"
#include "valclust/cli.hpp"
#include "valclust/clustering.hpp"
#include "valclust/corpus.hpp"
#include "valclust/distance.hpp"
#include "valclust/profiles.hpp"
#include "valclust/projection.hpp"
#include "valclust/session.hpp"

using namespace valclust;
using Q = boost::rational<long long>;

namespace {

// Pinned parameters.
constexpr int kEditPairs = 10'000;
constexpr int kEditMatrices = 50;
constexpr std::size_t kEditMaxLen = 6;
constexpr double kEditSeconds = 60.0;
constexpr int kReductionPairs = 10'000;
constexpr int kRatioTrials = 300;
constexpr int kHierTrials = 1'000;
constexpr int kPamTrials = 500;
constexpr int kDbscanTrials = 500;
constexpr int kMdsMatrices = 100;
constexpr int kPlanarConfigs = 50;
constexpr double kPlanarRelErr = 1e-6;
constexpr std::size_t kPerfValues = 1'000;
constexpr double kPerfSeconds = 10.0;
constexpr double kPerfSpeedup = 2.0;
constexpr unsigned kPerfThreads = 4;

const std::vector<std::string> kFixtures = {"measurement_units.txt", "measurement_units_179.txt", "datings.txt",
                                            "artist_names.txt", "attribution_qualifiers.txt"};

struct Outcome {
  bool pass;
  std::string detail;
};

using Clock = std::chrono::steady_clock;

double seconds_since(Clock::time_point t0) { return std::chrono::duration<double>(Clock::now() - t0).count(); }

// Letters "ab", digits "01", everything else falls into the catch-all class.
const std::u32string kThreeClassAlphabet = U"ab01 -";

std::vector<CharClass> three_classes() { return {{"Letter", U"ab", {}}, {"Digit", U"01", {}}}; }

WeightMatrix random_three_class_matrix(std::mt19937_64& rng) {
  std::vector<double> indel(3);
  for (auto& v : indel) v = static_cast<double>(1 + rng() % 6);
  std::vector<double> sub(9);
  for (std::size_t a = 0; a < 3; ++a) {
    for (std::size_t b = a; b < 3; ++b) sub[a * 3 + b] = sub[b * 3 + a] = static_cast<double>(rng() % 13);
  }
  return WeightMatrix(three_classes(), "Other", indel, sub);
}

std::string random_string(std::mt19937_64& rng, std::u32string_view alphabet, std::size_t max_len) {
  std::u32string s;
  const std::size_t len = rng() % (max_len + 1);
  for (std::size_t i = 0; i < len; ++i) s.push_back(alphabet[rng() % alphabet.size()]);
  return text::encode_utf8(s);
}

template <typename T>
Condensed<T> random_matrix(std::mt19937_64& rng, std::size_t n, int max_value) {
  Condensed<T> d(n);
  for (auto& v : d.data()) v = T(static_cast<long>(1 + rng() % static_cast<unsigned>(max_value)));
  return d;
}

Outcome edit_distance_oracle() {
  const auto t0 = Clock::now();
  std::mt19937_64 rng(101);
  int pairs = 0;
  int mismatches = 0;
  for (int m = 0; m < kEditMatrices; ++m) {
    const auto w = random_three_class_matrix(rng);
    for (int p = 0; p < kEditPairs / kEditMatrices; ++p, ++pairs) {
      const auto a = random_string(rng, kThreeClassAlphabet, kEditMaxLen);
      const auto b = random_string(rng, kThreeClassAlphabet, kEditMaxLen);
      const double expected = oracle::edit_script_minimum<double>(
          text::decode_utf8(a), text::decode_utf8(b), [&](char32_t c) { return w.indel(w.classify(c)); },
          [&](char32_t x, char32_t y) { return w.sub(w.classify(x), w.classify(y)); });
      if (weighted_levenshtein(a, b, w) != expected) ++mismatches;
    }
  }
  const double secs = seconds_since(t0);
  std::ostringstream ss;
  ss << pairs << " pairs over " << kEditMatrices << " matrices, " << mismatches << " mismatches, " << secs << " s";
  return {mismatches == 0 && secs < kEditSeconds, ss.str()};
}

Outcome reduction_law() {
  std::mt19937_64 rng(202);
  int mismatches = 0;
  for (int p = 0; p < kReductionPairs; ++p) {
    const auto w = random_three_class_matrix(rng);
    const auto derived = derive_sub_as_indel_sum(w);
    const auto a = random_string(rng, kThreeClassAlphabet, 10);
    const auto b = random_string(rng, kThreeClassAlphabet, 10);
    if (basic_edit_distance(a, b, w) != weighted_levenshtein(a, b, derived)) ++mismatches;
  }
  return {mismatches == 0, std::to_string(kReductionPairs) + " pairs, " + std::to_string(mismatches) + " mismatches"};
}

WeightTable<Q> random_rational_table(std::mt19937_64& rng) {
  auto r = [&] { return Q(static_cast<long long>(rng() % 25), static_cast<long long>(1 + rng() % 6)); };
  WeightTable<Q> t;
  t.classes = 3;
  for (int i = 0; i < 3; ++i) t.indel.push_back(r() + Q(1, 7));
  t.sub.assign(9, Q(0));
  for (std::size_t a = 0; a < 3; ++a) {
    for (std::size_t b = a; b < 3; ++b) t.sub[a * 3 + b] = t.sub[b * 3 + a] = r();
  }
  return t;
}

WeightTable<Q> scale(const WeightTable<Q>& t, Q c) {
  auto s = t;
  for (auto& v : s.indel) v *= c;
  for (auto& v : s.sub) v *= c;
  return s;
}

Outcome ratio_invariance() {
  std::mt19937_64 rng(303);
  const auto classifier = random_three_class_matrix(rng);
  std::vector<Q> row;
  int distance_checks = 0;
  int distance_bad = 0;
  int partition_checks = 0;
  int partition_bad = 0;
  for (int trial = 0; trial < kRatioTrials; ++trial) {
    const auto base = random_rational_table(rng);
    const std::size_t n = 2 + rng() % 7;
    std::vector<ClassifiedString> strings;
    for (std::size_t i = 0; i < n; ++i) {
      strings.push_back(classify_string(random_string(rng, kThreeClassAlphabet, 8), classifier));
    }
    Condensed<Q> d(n);
    for (std::size_t i = 0; i < n; ++i) {
      for (std::size_t j = i + 1; j < n; ++j) d.set(i, j, weighted_edit_distance(strings[i], strings[j], base, row));
    }
    // thresholds taken from the distances themselves hit the tie boundary
    const Q t = d.data()[rng() % d.data().size()];
    for (const Q c : {Q(2), Q(1, 3), Q(10)}) {
      const auto scaled_table = scale(base, c);
      Condensed<Q> scaled(n);
      for (std::size_t i = 0; i < n; ++i) {
        for (std::size_t j = i + 1; j < n; ++j) {
          const Q v = weighted_edit_distance(strings[i], strings[j], scaled_table, row);
          scaled.set(i, j, v);
          ++distance_checks;
          if (v != c * d(i, j)) ++distance_bad;
        }
      }
      for (auto l : {Linkage::kComplete, Linkage::kSingle, Linkage::kAverage}) {
        ++partition_checks;
        if (agglomerate<Q>(scaled, l, c * t, std::nullopt) != agglomerate<Q>(d, l, t, std::nullopt)) ++partition_bad;
      }
    }
  }
  std::ostringstream ss;
  ss << distance_checks << " scaled distances (" << distance_bad << " wrong), " << partition_checks
     << " partitions (" << partition_bad << " differ), c in {2, 1/3, 10}";
  return {distance_bad == 0 && partition_bad == 0, ss.str()};
}

Outcome hierarchical_oracle() {
  std::mt19937_64 rng(404);
  int bad = 0;
  int checks = 0;
  for (int trial = 0; trial < kHierTrials; ++trial) {
    const std::size_t n = 1 + rng() % 8;
    const auto d = random_matrix<Q>(rng, n, 6);
    const Q threshold(static_cast<long long>(rng() % 7), static_cast<long long>(1 + rng() % 2));
    const std::size_t k = 1 + rng() % n;
    for (auto l : {Linkage::kComplete, Linkage::kSingle, Linkage::kAverage}) {
      checks += 2;
      if (agglomerate<Q>(d, l, threshold, std::nullopt) !=
          oracle::agglomerate_from_scratch<Q>(d, l, threshold, std::nullopt)) {
        ++bad;
      }
      if (agglomerate<Q>(d, l, std::nullopt, k) != oracle::agglomerate_from_scratch<Q>(d, l, std::nullopt, k)) ++bad;
    }
  }
  return {bad == 0, std::to_string(kHierTrials) + " trials, " + std::to_string(checks) + " partitions, " +
                        std::to_string(bad) + " differ"};
}

Outcome kmedoids_oracle() {
  std::mt19937_64 rng(505);
  int optimal = 0;
  for (int trial = 0; trial < kPamTrials; ++trial) {
    const std::size_t n = 1 + rng() % 7;
    const std::size_t k = 1 + rng() % std::min<std::size_t>(3, n);
    const auto d = random_matrix<double>(rng, n, 20);
    if (pam(d, k, 100, rng() % 5).cost == oracle::best_medoid_cost(d, k)) ++optimal;
  }
  return {optimal == kPamTrials,
          std::to_string(optimal) + "/" + std::to_string(kPamTrials) + " trials reach the brute-force optimum"};
}

Outcome dbscan_oracle() {
  std::mt19937_64 rng(606);
  int bad = 0;
  for (int trial = 0; trial < kDbscanTrials; ++trial) {
    const std::size_t n = 1 + rng() % 50;
    const auto d = random_matrix<double>(rng, n, 10);
    const double eps = static_cast<double>(rng() % 6);
    const std::size_t min_samples = 1 + rng() % 5;
    if (dbscan(d, eps, min_samples) != oracle::dbscan_naive(d, eps, min_samples)) ++bad;
  }
  return {bad == 0, std::to_string(kDbscanTrials) + " trials, " + std::to_string(bad) + " differ"};
}

Outcome fixture_comembership() {
  const auto corpus = ingest_lines(support::fixture("measurement_units.txt"));
  Session s(default_session_id(corpus), corpus);
  s.apply_profile(profile("measurement-unit"));
  s.run_all();
  std::map<std::string, int> label;
  for (std::size_t g = 0; g < s.mapping()->groups.size(); ++g) {
    for (const auto& o : s.mapping()->groups[g].originals) label[o.value] = s.clustering()->labels[g];
  }
  std::vector<std::string> failures;
  auto at = [&](const std::string& v) {
    const auto it = label.find(v);
    if (it == label.end()) {
      failures.push_back("missing value '" + v + "'");
      return -2;
    }
    return it->second;
  };
  const int units = at("cm");
  if (at("mm") != units || at("m") != units) failures.push_back("cm, mm and m are split");
  if (at("? cm") == units) failures.push_back("'? cm' joins the unit cluster");

  std::set<int> with_x;
  std::set<int> with_q;
  std::set<int> minus;
  std::set<int> plain;
  for (const auto& [v, l] : label) {
    if (v.find('x') != std::string::npos) with_x.insert(l);
    if (v.find('?') != std::string::npos) with_q.insert(l);
    if (v.size() >= 2 && v[0] == '-' && std::isdigit(static_cast<unsigned char>(v[1]))) minus.insert(l);
    if (!v.empty() && std::all_of(v.begin(), v.end(), [](unsigned char c) { return std::isalpha(c); })) plain.insert(l);
  }
  auto overlaps = [](const std::set<int>& a, const std::set<int>& b) {
    return std::any_of(a.begin(), a.end(), [&](int x) { return x != kNoise && b.count(x); });
  };
  if (overlaps(with_x, with_q)) failures.push_back("an 'x' value shares a cluster with a '?' value");
  if (minus.empty()) failures.push_back("no minus-prefixed values");
  if (overlaps(minus, plain)) failures.push_back("a minus value shares a cluster with a plain unit");

  std::ostringstream ss;
  ss << label.size() << " values in " << s.clustering()->k << " clusters";
  for (const auto& f : failures) ss << "; " << f;
  return {failures.empty(), ss.str()};
}

double dist(const Point2D& a, const Point2D& b) { return std::hypot(a.x - b.x, a.y - b.y); }

Outcome mds() {
  std::mt19937_64 rng(707);
  std::vector<std::string> failures;

  std::uniform_real_distribution<double> u(0.5, 10.0);
  int increases = 0;
  for (int trial = 0; trial < kMdsMatrices; ++trial) {
    const std::size_t n = 3 + rng() % 18;
    Condensed<double> d(n);
    for (auto& v : d.data()) v = u(rng);
    ProjectionOptions o;
    o.init = trial % 2 ? MdsInit::kRandom : MdsInit::kClassical;
    o.seed = static_cast<std::uint64_t>(trial);
    const auto e = mds_project(d, o);
    for (std::size_t i = 1; i < e.stress_history.size(); ++i) {
      if (e.stress_history[i] > e.stress_history[i - 1]) ++increases;
    }
  }
  if (increases) failures.push_back(std::to_string(increases) + " stress increases");

  std::uniform_real_distribution<double> coord(-5.0, 5.0);
  double worst = 0.0;
  int random_recovered = 0;
  for (int trial = 0; trial < kPlanarConfigs; ++trial) {
    std::vector<Point2D> pts(4);
    for (auto& p : pts) p = {coord(rng), coord(rng)};
    Condensed<double> d(4);
    for (std::size_t i = 0; i < 4; ++i) {
      for (std::size_t j = i + 1; j < 4; ++j) d.set(i, j, dist(pts[i], pts[j]));
    }
    auto rel_err = [&](const Embedding2D& e) {
      double w = 0.0;
      for (std::size_t i = 0; i < 4; ++i) {
        for (std::size_t j = i + 1; j < 4; ++j) {
          w = std::max(w, std::abs(dist(e.coordinates[i], e.coordinates[j]) - d(i, j)) / d(i, j));
        }
      }
      return w;
    };
    worst = std::max(worst, rel_err(mds_project(d, ProjectionOptions{})));
    // informational: random starts may stop in a local minimum
    ProjectionOptions random;
    random.init = MdsInit::kRandom;
    random.seed = static_cast<std::uint64_t>(trial);
    random.tolerance = 0.0;
    random.max_iter = 2000;
    if (rel_err(mds_project(d, random)) < kPlanarRelErr) ++random_recovered;
  }
  if (!(worst < kPlanarRelErr)) failures.push_back("planar relative error " + std::to_string(worst));

  const auto one = mds_project(Condensed<double>(1), {});
  if (one.coordinates != std::vector<Point2D>{{0, 0}}) failures.push_back("n=1 not at the origin");
  const auto two = mds_project(Condensed<double>(2, {7.25}), {});
  if (two.coordinates.size() != 2 || dist(two.coordinates[0], two.coordinates[1]) != 7.25 || two.stress != 0.0) {
    failures.push_back("n=2 distance not reproduced");
  }

  std::ostringstream ss;
  ss << kMdsMatrices << " matrices checked per iteration, " << kPlanarConfigs
     << " planar 4-point sets with default options (worst rel err " << worst << "; random starts recover "
     << random_recovered << "/" << kPlanarConfigs << "), n<=2 closed forms";
  for (const auto& f : failures) ss << "; " << f;
  return {failures.empty(), ss.str()};
}

int cli(const std::vector<std::string>& args) {
  std::ostringstream out;
  std::ostringstream err;
  const int code = run_cli(args, out, err);
  if (code != 0) std::cerr << err.str();
  return code;
}

/// Runs ingest, run and both exports for one fixture/profile pair in `dir`.
bool pipeline(const support::TempDir& dir, const std::string& fixture, const std::string& profile_name) {
  const auto s = dir / "session.json";
  return cli({"ingest", support::fixture(fixture).string(), "--session", s, "--id", "acceptance", "--profile",
              profile_name}) == 0 &&
         cli({"run", "-s", s}) == 0 &&
         cli({"export", "-s", s, "--table", dir / "representatives.csv", "--layout", "representatives"}) == 0 &&
         cli({"export", "-s", s, "--table", dir / "originals.csv", "--layout", "originals"}) == 0;
}

Outcome pipeline_determinism() {
  int runs = 0;
  std::vector<std::string> failures;
  for (const auto& fixture : kFixtures) {
    for (const auto& name : profile_names()) {
      support::TempDir a("acc-a");
      support::TempDir b("acc-b");
      if (!pipeline(a, fixture, name) || !pipeline(b, fixture, name)) {
        failures.push_back(fixture + "/" + name + " did not run");
        continue;
      }
      ++runs;
      for (const char* file : {"session.json", "representatives.csv", "originals.csv"}) {
        if (support::slurp(a / file) != support::slurp(b / file)) failures.push_back(fixture + "/" + name + " " + file);
      }
    }
  }
  std::ostringstream ss;
  ss << runs << " fixture/profile pairs run twice";
  for (const auto& f : failures) ss << "; differs: " << f;
  return {failures.empty(), ss.str()};
}

/// Lines of a text file, counted without the library.
std::uint64_t line_count(const std::string& content) {
  std::uint64_t lines = static_cast<std::uint64_t>(std::count(content.begin(), content.end(), '\n'));
  if (!content.empty() && content.back() != '\n') ++lines;
  return lines;
}

Outcome count_conservation() {
  int checks = 0;
  std::vector<std::string> failures;
  for (const auto& fixture : kFixtures) {
    const auto expected = line_count(support::slurp(support::fixture(fixture)));
    for (const auto& name : profile_names()) {
      support::TempDir dir("acc-count");
      if (!pipeline(dir, fixture, name)) {
        failures.push_back(fixture + "/" + name + " did not run");
        continue;
      }
      if (load_session(dir / "session.json").corpus().total_occurrences() != expected) {
        failures.push_back(fixture + " total_occurrences");
      }
      for (const char* file : {"representatives.csv", "originals.csv"}) {
        const auto rows = parse_csv(support::slurp(dir / file));
        std::uint64_t sum = 0;
        for (const auto& cell : rows.at(1)) sum += std::stoull(cell);
        ++checks;
        if (sum != expected) failures.push_back(fixture + "/" + name + " " + file + " sums to " + std::to_string(sum));
      }
    }
  }
  std::ostringstream ss;
  ss << checks << " exports checked against line counts";
  for (const auto& f : failures) ss << "; " << f;
  return {failures.empty(), ss.str()};
}

Outcome performance() {
  std::mt19937_64 rng(808);
  const std::u32string alphabet = U"abcdefghijklmnopqrstuvwxyzABCDEFGH0123456789 ,.-/?()";
  std::uniform_int_distribution<std::size_t> len(6, 18);
  std::set<std::string> distinct;
  while (distinct.size() < kPerfValues) {
    std::u32string s;
    const auto n = len(rng);
    for (std::size_t i = 0; i < n; ++i) s.push_back(alphabet[rng() % alphabet.size()]);
    distinct.insert(text::encode_utf8(s));
  }
  const std::vector<std::string> values(distinct.begin(), distinct.end());
  const auto w = profile("measurement-unit").distance.effective_weights();

  auto t0 = Clock::now();
  const auto single = pairwise_distances(values, w, 1);
  const double t1 = seconds_since(t0);
  t0 = Clock::now();
  const auto multi = pairwise_distances(values, w, kPerfThreads);
  const double t4 = seconds_since(t0);
  const bool identical = single == multi;
  const double speedup = t1 / t4;

  std::ostringstream ss;
  ss << kPerfValues << " values: 1 thread " << t1 << " s, " << kPerfThreads << " threads " << t4 << " s, speedup "
     << speedup << ", identical " << (identical ? "yes" : "no") << ", " << std::thread::hardware_concurrency()
     << " hardware threads";
  return {t1 < kPerfSeconds && identical && speedup >= kPerfSpeedup, ss.str()};
}

}  // namespace

int main() {
  const std::vector<std::pair<std::string, std::function<Outcome()>>> criteria = {
      {"edit-distance oracle", edit_distance_oracle},
      {"reduction law", reduction_law},
      {"ratio invariance", ratio_invariance},
      {"hierarchical clustering oracle", hierarchical_oracle},
      {"k-medoids optimality oracle", kmedoids_oracle},
      {"dbscan oracle", dbscan_oracle},
      {"fixture co-membership", fixture_comembership},
      {"mds", mds},
      {"pipeline determinism", pipeline_determinism},
      {"performance", performance},
      {"count conservation", count_conservation},
  };
  int failed = 0;
  for (const auto& [name, check] : criteria) {
    Outcome o;
    try {
      o = check();
    } catch (const std::exception& e) {
      o = {false, std::string("exception: ") + e.what()};
    }
    if (!o.pass) ++failed;
    std::cout << (o.pass ? "PASS " : "FAIL ") << name << ": " << o.detail << std::endl;
  }
  std::cout << (criteria.size() - static_cast<std::size_t>(failed)) << "/" << criteria.size() << " criteria passed"
            << std::endl;
  return failed == 0 ? 0 : 1;
}
