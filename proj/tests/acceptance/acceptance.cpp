// Acceptance checks. Prints one PASS/FAIL line per criterion and exits
// non-zero if any criterion fails.

#include <chrono>
#include <cstdio>
#include <functional>
#include <map>
#include <random>
#include <set>

#include "llmaudit/consistency.hpp"
#include "llmaudit/gateway.hpp"
#include "llmaudit/report.hpp"
#include "llmaudit/runner.hpp"
#include "llmaudit/similarity.hpp"
#include "llmaudit/validation.hpp"
#include "oracles.hpp"
#include "reference_averages.hpp"
#include "support.hpp"

using namespace llmaudit;
namespace fs = std::filesystem;

namespace {

struct Outcome {
  bool passed = false;
  std::string detail;
};

using Clock = std::chrono::steady_clock;

double seconds_since(Clock::time_point start) {
  return std::chrono::duration<double>(Clock::now() - start).count();
}

std::string random_abc(std::mt19937& rng) {
  std::uniform_int_distribution<int> len(0, 12), ch(0, 2);
  std::string s(static_cast<std::size_t>(len(rng)), 'a');
  for (auto& c : s) c = static_cast<char>('a' + ch(rng));
  return s;
}

std::vector<std::string> random_tokens(std::mt19937& rng, const std::vector<std::string>& vocab, int max_len) {
  std::uniform_int_distribution<int> len(0, max_len);
  std::uniform_int_distribution<std::size_t> pick(0, vocab.size() - 1);
  std::vector<std::string> out(static_cast<std::size_t>(len(rng)));
  for (auto& t : out) t = vocab[pick(rng)];
  return out;
}

std::string join(const std::vector<std::string>& tokens) {
  std::string out;
  for (const auto& t : tokens) {
    if (!out.empty()) out += ' ';
    out += t;
  }
  return out;
}

std::u32string widen(const std::string& ascii) { return {ascii.begin(), ascii.end()}; }

const std::vector<std::string> kVocab = {"port", "scan", "tls", "key", "hash", "salt", "worm", "acl",
                                         "vpn", "log", "ids", "mfa", "dns", "arp", "xss", "csrf"};

std::vector<std::string> random_responses(std::mt19937& rng, int k) {
  std::uniform_int_distribution<std::size_t> pick(0, kVocab.size() - 1);
  std::uniform_int_distribution<int> len(1, 8), noise(0, 4);
  std::string stem;
  for (int i = len(rng); i > 0; --i) stem += kVocab[pick(rng)] + " ";
  std::vector<std::string> out;
  for (int r = 0; r < k; ++r) {
    std::string s = stem;
    for (int i = noise(rng); i > 0; --i) s += kVocab[pick(rng)] + " ";
    out.push_back(s);
  }
  return out;
}

std::vector<oracle::Scores> raw_scores(const std::vector<ScoredPair>& pairs) {
  std::vector<oracle::Scores> out;
  for (const auto& p : pairs) out.push_back({p.scores.sequence, p.scores.levenshtein, p.scores.jaccard, p.scores.cosine});
  return out;
}

const std::array<ThresholdProfile, 3> kProfiles = {ThresholdProfile::low(), ThresholdProfile::medium(),
                                                   ThresholdProfile::high()};

Outcome metric_oracles() {
  const auto start = Clock::now();
  std::mt19937 rng(1);
  int mismatches = 0;
  for (int i = 0; i < 10000; ++i) {
    const auto a = random_abc(rng), b = random_abc(rng);
    if (std::abs(levenshtein_similarity(a, b) - oracle::levenshtein(widen(a), widen(b))) > 1e-9) ++mismatches;
    if (std::abs(sequence_similarity(a, b) - oracle::sequence(widen(a), widen(b))) > 1e-9) ++mismatches;
  }
  for (int i = 0; i < 10000; ++i) {
    const auto a = random_tokens(rng, kVocab, 20), b = random_tokens(rng, kVocab, 20);
    if (std::abs(jaccard_similarity(join(a), join(b)) - oracle::jaccard(a, b)) > 1e-9) ++mismatches;
    if (std::abs(cosine_similarity(join(a), join(b)) - oracle::cosine(a, b)) > 1e-9) ++mismatches;
  }
  const double t = seconds_since(start);
  return {mismatches == 0 && t < 30.0,
          std::to_string(mismatches) + " mismatches in 40000 comparisons"};
}

Outcome metric_properties() {
  const auto start = Clock::now();
  std::mt19937 rng(2);
  const std::vector<std::string> left = {"alpha", "beta", "gamma", "delta", "épée", "δίκτυο"};
  const std::vector<std::string> right = {"one", "two", "three", "four", "naïve", "сеть"};
  int violations = 0;
  auto in_range = [](const SimilarityVector& v) {
    for (double x : {v.sequence, v.levenshtein, v.jaccard, v.cosine}) {
      if (!(x >= 0.0 && x <= 100.0)) return false;
    }
    return true;
  };
  for (int i = 0; i < 10000; ++i) {
    std::vector<std::string> vocab = kVocab;
    vocab.insert(vocab.end(), left.begin(), left.end());
    const auto a = join(random_tokens(rng, vocab, 12)), b = join(random_tokens(rng, vocab, 12));
    const auto ab = similarity_vector(a, b), ba = similarity_vector(b, a);
    if (!in_range(ab) || !(ab == ba)) ++violations;
    if (!(similarity_vector(a, a) == SimilarityVector{100, 100, 100, 100})) ++violations;

    const auto l = random_tokens(rng, left, 8), r = random_tokens(rng, right, 8);
    if (!l.empty() && !r.empty()) {
      const auto d = similarity_vector(join(l), join(r));
      if (d.jaccard != 0.0 || d.cosine != 0.0) ++violations;
    }
  }
  if (!(similarity_vector("", "") == SimilarityVector{100, 100, 100, 100})) ++violations;
  const double t = seconds_since(start);
  return {violations == 0 && t < 10.0, std::to_string(violations) + " violations over 10000 pairs"};
}

Outcome worked_values() {
  const double lev = levenshtein_similarity("kitten", "sitting");
  const double seq = sequence_similarity("abcd", "bcde");
  const double cos = cosine_similarity("a a b", "a b b");
  const double jac = jaccard_similarity("a b c", "b c d");
  char buf[160];
  std::snprintf(buf, sizeof buf, "levenshtein %.6f, sequence %.6f, cosine %.6f, jaccard %.6f", lev, seq,
                cos, jac);
  return {std::abs(lev - 57.142857) <= 1e-6 && std::abs(seq - 75.0) <= 1e-9 && std::abs(cos - 80.0) <= 1e-9 &&
              std::abs(jac - 50.0) <= 1e-9,
          buf};
}

Outcome consistency_fidelity() {
  std::mt19937 rng(4);
  std::uniform_int_distribution<int> kdist(2, 8);
  int mismatches = 0, passing = 0;
  for (int trial = 0; trial < 1000; ++trial) {
    const int k = kdist(rng);
    const auto& p = kProfiles[static_cast<std::size_t>(trial % 3)];
    const auto pairs = score_all_pairs(random_responses(rng, k));
    const bool expected = oracle::question_consistent(
        raw_scores(pairs), {p.sequence_min, p.levenshtein_min, p.jaccard_min, p.cosine_min}, k, 0.8, 4);
    const bool got = evaluate_question("Q", {}, pairs, p, {AggregationSemantics::kPerMetric, 4}, k).passed;
    mismatches += expected != got;
    passing += got;
  }
  const int npt = required_pair_count(5, 0.8);
  return {mismatches == 0 && npt == 8 && passing > 0 && passing < 1000,
          std::to_string(mismatches) + " mismatches, " + std::to_string(passing) +
              "/1000 consistent, npt(5, 0.8) = " + std::to_string(npt)};
}

Outcome monotonicity() {
  std::mt19937 rng(5);
  std::uniform_int_distribution<int> kdist(2, 8);
  int violations = 0;
  for (int trial = 0; trial < 1000; ++trial) {
    const int k = kdist(rng);
    const auto pairs = score_all_pairs(random_responses(rng, k));
    for (auto semantics : {AggregationSemantics::kPerMetric, AggregationSemantics::kPerPair}) {
      std::array<std::array<bool, 4>, 3> passed{};
      for (std::size_t p = 0; p < 3; ++p) {
        for (int m = 1; m <= 4; ++m) {
          passed[p][static_cast<std::size_t>(m - 1)] =
              evaluate_question("Q", {}, pairs, kProfiles[p], {semantics, m}, k).passed;
        }
      }
      for (std::size_t m = 0; m < 4; ++m) {
        if (passed[2][m] && !passed[1][m]) ++violations;
        if (passed[1][m] && !passed[0][m]) ++violations;
      }
      for (std::size_t p = 0; p < 3; ++p) {
        for (std::size_t m = 1; m < 4; ++m) {
          if (passed[p][m] && !passed[p][m - 1]) ++violations;
        }
      }
    }
  }
  return {violations == 0, std::to_string(violations) + " violations over 1000 response sets"};
}

ProviderSpec mock(const std::string& id, MockSpec spec) {
  ProviderSpec s;
  s.provider_id = id;
  s.mock = std::move(spec);
  return s;
}

Outcome deterministic_models() {
  testing::TempDir dir;
  const Benchmark bench = load_benchmark(testing::default_benchmark());
  Gateway gw({mock("constant", {MockKind::kConstant, {"Encryption keeps data confidential."}, {}, {}}),
              mock("disjoint", {MockKind::kDisjoint, {}, {}, {}})},
             {Mode::kLiveRecord, dir / "c.jsonl", ""});
  const auto constant = run_consistency(gw, "constant", bench, 5, ThresholdProfile::high(),
                                        {AggregationSemantics::kPerMetric, 4});
  const auto disjoint = run_consistency(gw, "disjoint", bench, 5, ThresholdProfile::low(),
                                        {AggregationSemantics::kPerMetric, 1});
  return {bench.questions.size() == 40 && constant.passed && constant.passed_questions == 40 &&
              !disjoint.passed,
          "constant " + std::to_string(constant.passed_questions) + "/40 at high m=4, disjoint " +
              std::to_string(disjoint.passed_questions) + "/40 at low m=1"};
}

Outcome self_validation_boundaries() {
  testing::TempDir dir;
  const Benchmark bench = load_benchmark(testing::default_benchmark());
  Gateway gw(load_provider_config(testing::fixture("mocks_validation.json")),
             {Mode::kLiveRecord, dir / "c.jsonl", ""});
  const auto yes = self_validate(gw, "agreeable", bench, {});
  const auto four = self_validate(gw, "hesitant", bench, {});
  const auto refuser = self_validate(gw, "evasive", bench, {});
  bool all_four = true;
  for (const auto& q : four.questions) all_four = all_four && q.yes_count == 4 && !q.passed;
  return {yes.passed && all_four && four.passed_questions == 0 && refuser.non_validatable && !refuser.passed,
          "yes-sayer " + std::to_string(yes.passed_questions) + "/40, four-of-five " +
              std::to_string(four.passed_questions) + "/40, refuser non-validatable=" +
              (refuser.non_validatable ? "true" : "false")};
}

Outcome cross_validation_scenario() {
  testing::TempDir dir;
  const Benchmark bench = load_benchmark(testing::fixture("bench_small.json"));
  Gateway gw(load_provider_config(testing::fixture("mocks_cross.json")),
             {Mode::kLiveRecord, dir / "c.jsonl", ""});
  bool ok = true;
  std::string detail;
  for (auto pool : {PoolConvention::kVoting, PoolConvention::kAllModels}) {
    CrossValidationOptions opts;
    opts.pool = pool;
    const auto report = cross_validate(gw, {"p1", "p2", "p3", "p4", "p5", "p6"}, bench, opts);
    const auto& q = report.providers[0].questions[2];
    const int base = pool == PoolConvention::kVoting ? 5 : 6;
    ok = ok && report.providers[0].provider_id == "p1" && q.votes.size() == 5 &&
         q.agreeing_validator_count == 1 && q.quota_base == base && !q.passed;
    detail += std::string(to_string(pool)) + ": " + std::to_string(q.agreeing_validator_count) + " of " +
              std::to_string(q.quota_base) + " agree; ";
  }
  // 0.66 * 5 = 3.3 and 0.66 * 6 = 3.96.
  ok = ok && agreement_reached(4, 5, 0.66) && !agreement_reached(3, 5, 0.66) &&
       agreement_reached(4, 6, 0.66) && !agreement_reached(3, 6, 0.66) &&
       quota_base(PoolConvention::kVoting, 6, 5) == 5 && quota_base(PoolConvention::kAllModels, 6, 5) == 6;
  return {ok, detail + "quota arithmetic checked"};
}

Outcome difference_table() {
  std::vector<AverageScoreRow> info, situation;
  for (const auto& row : reference::kRows) {
    info.push_back({row.model, {row.informational[0], row.informational[1], row.informational[2], row.informational[3]}, 1});
    situation.push_back({row.model, {row.situational[0], row.situational[1], row.situational[2], row.situational[3]}, 1});
  }
  const auto diff = score_difference(info, situation);
  int matched = 0;
  for (std::size_t i = 0; i < diff.size() && i < reference::kRows.size(); ++i) {
    const auto& d = diff[i].difference;
    const std::array<double, 4> got = {d.sequence, d.levenshtein, d.jaccard, d.cosine};
    for (std::size_t m = 0; m < 4; ++m) matched += std::abs(got[m] - reference::kRows[i].difference[m]) <= 0.005;
  }
  return {matched == 20, std::to_string(matched) + "/20 entries within 0.005"};
}

std::map<std::string, std::string> run_all(const fs::path& providers, const Benchmark& bench,
                                           const fs::path& cache, Mode mode, const fs::path& out) {
  Gateway gw(load_provider_config(providers), {mode, cache, ""});
  RunOptions options;
  std::vector<Json> reports;
  for (const auto& [stem, result] :
       {std::pair{"consistency", run_consistency_command(gw, bench, options)},
        std::pair{"self_validation", run_self_validation_command(gw, bench, options)},
        std::pair{"cross_validation", run_cross_validation_command(gw, bench, options)}}) {
    if (result.failure) fail(result.failure->code, result.failure->message);
    emit_report(result.report, out / (std::string(stem) + ".json"));
    for (const auto& t : tables_for(result.report)) emit_table(t, out / (t.name + ".csv"));
    reports.push_back(result.report);
  }
  const Json tables = build_tables_report(reports);
  emit_report(tables, out / "tables.json");
  for (const auto& t : tables_for(tables)) emit_table(t, out / (t.name + ".csv"));
  gw.flush();

  std::map<std::string, std::string> files;
  for (const auto& e : fs::directory_iterator(out)) files[e.path().filename().string()] = testing::read_file(e.path());
  return files;
}

Outcome replay_determinism() {
  testing::TempDir dir;
  const Benchmark bench = load_benchmark(testing::default_benchmark());
  const auto providers = testing::fixture("mocks_cross.json");
  run_all(providers, bench, dir / "cache.jsonl", Mode::kLiveRecord, dir / "record");
  const auto cache = testing::read_file(dir / "cache.jsonl");
  const auto a = run_all(providers, bench, dir / "cache.jsonl", Mode::kReplay, dir / "a");
  const auto b = run_all(providers, bench, dir / "cache.jsonl", Mode::kReplay, dir / "b");
  return {a == b && a.size() > 4 && testing::read_file(dir / "cache.jsonl") == cache,
          std::to_string(a.size()) + " report files compared across two replays"};
}

}  // namespace

int main() {
  const std::vector<std::pair<const char*, std::function<Outcome()>>> criteria = {
      {"metric oracle equivalence", metric_oracles},
      {"metric property suite", metric_properties},
      {"worked values", worked_values},
      {"consistency rule fidelity", consistency_fidelity},
      {"threshold and rule monotonicity", monotonicity},
      {"deterministic-model behavior", deterministic_models},
      {"self-validation boundaries", self_validation_boundaries},
      {"cross-validation scenario", cross_validation_scenario},
      {"score difference arithmetic", difference_table},
      {"replay determinism", replay_determinism},
  };
  const auto start = Clock::now();
  int failures = 0;
  for (std::size_t i = 0; i < criteria.size(); ++i) {
    const auto t0 = Clock::now();
    Outcome o;
    try {
      o = criteria[i].second();
    } catch (const std::exception& e) {
      o = {false, std::string("exception: ") + e.what()};
    }
    failures += !o.passed;
    std::printf("%s %2zu %s: %s (%.2f s)\n", o.passed ? "PASS" : "FAIL", i + 1, criteria[i].first,
                o.detail.c_str(), seconds_since(t0));
  }
  const double total = seconds_since(start);
  std::printf("%d of %zu criteria passed in %.2f s\n", static_cast<int>(criteria.size()) - failures,
              criteria.size(), total);
  return failures == 0 && total < 120.0 ? 0 : 1;
}
