#include <doctest.h>

#include <sys/wait.h>

#include <set>

#include "support.hpp"

namespace fs = std::filesystem;

namespace {

struct Outcome {
  int exit_code = -1;
  std::string output;
};

// Runs the tool from `cwd`, capturing stdout and stderr together.
Outcome run(const fs::path& cwd, const std::string& args) {
  const fs::path log = cwd / ".cli-output";
  const std::string cmd = "cd '" + cwd.string() + "' && '" LLMAUDIT_CLI "' " + args + " > '" +
                          log.string() + "' 2>&1";
  const int status = std::system(cmd.c_str());
  Outcome o;
  o.exit_code = WIFEXITED(status) ? WEXITSTATUS(status) : -1;
  o.output = testing::read_file(log);
  fs::remove(log);
  return o;
}

std::string fixture_arg(const std::string& name) { return "'" + testing::fixture(name).string() + "'"; }

std::string consistency_args(const std::string& mode, const std::string& out) {
  return "consistency --providers " + fixture_arg("mocks_consistency.json") + " --benchmark " +
         fixture_arg("bench_small.json") + " --cache cache.jsonl --mode " + mode + " --out " + out +
         " -k 3";
}

std::set<std::string> files_under(const fs::path& root) {
  std::set<std::string> out;
  for (const auto& e : fs::recursive_directory_iterator(root)) {
    if (e.is_regular_file()) out.insert(fs::relative(e.path(), root).string());
  }
  return out;
}

std::string golden(const std::string& name) {
  return testing::read_file(fs::path(LLMAUDIT_GOLDEN_DIR) / name);
}

}  // namespace

TEST_CASE("consistency record and replay") {
  testing::TempDir dir;
  const auto recorded = run(dir.path(), consistency_args("record", "rec"));
  CHECK(recorded.exit_code == 1);
  CHECK(recorded.output.find("steady") != std::string::npos);
  CHECK(recorded.output.find("PASS") != std::string::npos);
  CHECK(recorded.output.find("FAIL") != std::string::npos);

  // The tool writes nothing outside the cache and the output directory.
  CHECK(files_under(dir.path()) ==
        std::set<std::string>{"cache.jsonl", "rec/consistency.json", "rec/consistency.csv"});

  const auto cache_before = testing::read_file(dir / "cache.jsonl");
  CHECK(run(dir.path(), consistency_args("replay", "a")).exit_code == 1);
  CHECK(run(dir.path(), consistency_args("replay", "b")).exit_code == 1);
  CHECK(testing::read_file(dir / "cache.jsonl") == cache_before);
  CHECK(testing::read_file(dir / "a" / "consistency.json") ==
        testing::read_file(dir / "b" / "consistency.json"));
  CHECK(testing::read_file(dir / "a" / "consistency.csv") == golden("consistency_small.csv"));

  CHECK(run(dir.path(), consistency_args("replay", "only") + " --only steady").exit_code == 0);

  const auto tables = run(dir.path(), "report --input a/consistency.json --out t --format both");
  CHECK(tables.exit_code == 0);
  CHECK(testing::read_file(dir / "t" / "tables.json") == golden("tables_small.json"));
  CHECK(testing::read_file(dir / "t" / "average_scores_all.csv") == golden("average_scores_all.csv"));
  CHECK(testing::read_file(dir / "t" / "score_difference.csv") == golden("score_difference.csv"));
}

TEST_CASE("operational and configuration errors exit 2") {
  testing::TempDir dir;
  const auto missing = run(dir.path(), consistency_args("replay", "out"));
  CHECK(missing.exit_code == 2);
  CHECK(missing.output.find("replay cache not found") != std::string::npos);
  CHECK_FALSE(fs::exists(dir / "cache.jsonl"));

  CHECK(run(dir.path(), consistency_args("record", "out") + " --profile extreme").exit_code == 2);
  CHECK(run(dir.path(), consistency_args("record", "out") + " -m 9").exit_code == 2);
  CHECK(run(dir.path(), consistency_args("record", "out") + " --only ghost").exit_code == 2);
  CHECK(run(dir.path(), "consistency --bogus").exit_code == 2);
  CHECK(run(dir.path(), "--help").exit_code == 0);

  testing::write_text(dir / "secret.json",
                      R"({"format_version": 1, "providers": [{"id": "x", "dialect": "openai",)"
                      R"( "model": "m", "api_key": "sk-123"}]})");
  const auto secret = run(dir.path(), "consistency --providers secret.json --cache c.jsonl --out o --mode record");
  CHECK(secret.exit_code == 2);
  CHECK(secret.output.find("sk-123") == std::string::npos);
}

TEST_CASE("validation commands") {
  testing::TempDir dir;
  const std::string common = " --benchmark " + fixture_arg("bench_small.json") +
                             " --cache cache.jsonl --mode record --out out";
  const std::string self = "self-validate --providers " + fixture_arg("mocks_validation.json") + common;
  CHECK(run(dir.path(), self + " --only agreeable").exit_code == 0);
  CHECK(run(dir.path(), self + " --only contrarian").exit_code == 1);
  CHECK(fs::exists(dir / "out" / "self_validation.json"));

  const auto cross = run(dir.path(), "cross-validate --providers " + fixture_arg("mocks_cross.json") + common);
  CHECK(cross.exit_code == 0);
  const auto two_wrong =
      run(dir.path(), "cross-validate --providers " + fixture_arg("mocks_cross_two_wrong.json") +
                          " --benchmark " + fixture_arg("bench_small.json") +
                          " --cache other.jsonl --mode record --out out2");
  CHECK(two_wrong.exit_code == 1);
  CHECK(run(dir.path(), "cross-validate --providers " + fixture_arg("mocks_cross.json") + common +
                            " --only p1")
            .exit_code == 2);

  const auto tables = run(dir.path(), "report --input out/self_validation.json --input out/cross_validation.json"
                                      " --out t --format csv");
  CHECK(tables.exit_code == 0);
  CHECK(testing::read_file(dir / "t" / "cross_validation.csv").find("p1,") != std::string::npos);
}

TEST_CASE("similarity subcommand") {
  testing::TempDir dir;
  const auto o = run(dir.path(), "similarity kitten sitting");
  CHECK(o.exit_code == 0);
  CHECK(o.output.find("57.14") != std::string::npos);
}
