#include <doctest.h>

#include <sys/wait.h>

#include <algorithm>
#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <nlohmann/json.hpp>
#include <sstream>
#include <string>
#include <vector>

namespace fs = std::filesystem;

namespace {

using Table = std::vector<std::vector<std::string>>;

const fs::path scratch = fs::path(CAPRSOC_TEST_SCRATCH) / "cli";

int run(const std::string& args, const std::string& tag) {
  const fs::path err = scratch / (tag + ".stderr");
  const std::string cmd = std::string("\"") + CAPRSOC_CLI + "\" " + args + " > \"" + (scratch / (tag + ".stdout")).string() +
                          "\" 2> \"" + err.string() + "\"";
  const int status = std::system(cmd.c_str());
  return WIFEXITED(status) ? WEXITSTATUS(status) : -1;
}

std::string slurp(const fs::path& p) {
  std::ifstream in(p);
  std::stringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

Table read_table(const fs::path& p) {
  Table t;
  std::istringstream in(slurp(p));
  std::string line;
  while (std::getline(in, line)) {
    std::vector<std::string> row;
    std::stringstream ls(line);
    std::string cell;
    while (std::getline(ls, cell, ',')) row.push_back(cell);
    t.push_back(row);
  }
  return t;
}

// Compares two tables column by column, skipping the named timing columns.
void check_same_except(const Table& a, const Table& b, std::initializer_list<std::string> timing) {
  REQUIRE(a.size() == b.size());
  REQUIRE_FALSE(a.empty());
  const auto& header = a.front();
  for (std::size_t r = 0; r < a.size(); ++r) {
    REQUIRE(a[r].size() == b[r].size());
    for (std::size_t c = 0; c < a[r].size(); ++c) {
      if (std::find(timing.begin(), timing.end(), header[c]) != timing.end()) continue;
      CHECK_MESSAGE(a[r][c] == b[r][c], "row " << r << " column " << header[c]);
    }
  }
}

struct Scratch {
  Scratch() {
    fs::remove_all(scratch);
    fs::create_directories(scratch);
  }
};

const std::string kSummaryHeader =
    "command,method,step,t,n,q,iterations,time_ms,objective,residual,reference_objective,rel_gap,termination";

}  // namespace

TEST_CASE_FIXTURE(Scratch, "proj-bench output is schema-stable and reproducible") {
  const std::string args = "--cmd proj-bench --n 10,50 --reps 5 --cert-samples 8 --seed 3";
  REQUIRE(run(args + " --out \"" + (scratch / "a").string() + "\"", "pb_a") == 0);
  REQUIRE(run(args + " --out \"" + (scratch / "b").string() + "\"", "pb_b") == 0);
  const Table a = read_table(scratch / "a" / "proj-bench-3" / "proj_bench.csv");
  const Table b = read_table(scratch / "b" / "proj-bench-3" / "proj_bench.csv");
  REQUIRE(a.size() == 3);
  CHECK(a[0] == std::vector<std::string>{"n", "time_mean_s", "time_std_s", "infeas_mean", "infeas_std", "cert_gap_mean",
                                          "cert_gap_std"});
  CHECK(a[1][0] == "10");
  CHECK(a[2][0] == "50");
  check_same_except(a, b, {"time_mean_s", "time_std_s"});
  CHECK(fs::exists(scratch / "a" / "proj-bench-3" / "config.ini"));
}

TEST_CASE_FIXTURE(Scratch, "reg-solve output is schema-stable and reproducible") {
  const std::string args = "--cmd reg-solve --t 30 --n 20 --sparsity 4 --max-iter 300";
  REQUIRE(run(args + " --out \"" + (scratch / "a").string() + "\"", "rs_a") == 0);
  REQUIRE(run(args + " --out \"" + (scratch / "b").string() + "\"", "rs_b") == 0);
  const fs::path da = scratch / "a" / "reg-solve-0", db = scratch / "b" / "reg-solve-0";
  for (const char* f : {"summary.csv", "trace.csv", "reference_trace.csv", "config.ini"}) CHECK(fs::exists(da / f));

  const Table sa = read_table(da / "summary.csv");
  REQUIRE(sa.size() == 2);
  CHECK(slurp(da / "summary.csv").rfind(kSummaryHeader + "\n", 0) == 0);
  CHECK(sa[1][0] == "reg-solve");
  CHECK(sa[1][12] == "target_reached");
  CHECK(std::stod(sa[1][11]) <= 1e-3);
  check_same_except(sa, read_table(db / "summary.csv"), {"time_ms"});

  const Table ta = read_table(da / "trace.csv");
  CHECK(ta[0] == std::vector<std::string>{"k", "f", "step", "residual", "time_ms"});
  CHECK(ta[1][0] == "0");
  CHECK(std::stod(ta[1][1]) == 0.0);
  check_same_except(ta, read_table(db / "trace.csv"), {"time_ms"});

  // Rerunning from the echoed config reproduces the run; the command line wins
  // for --out.
  REQUIRE(run("--config \"" + (da / "config.ini").string() + "\" --out \"" + (scratch / "c").string() + "\"", "rs_c") ==
          0);
  check_same_except(sa, read_table(scratch / "c" / "reg-solve-0" / "summary.csv"), {"time_ms"});
}

TEST_CASE_FIXTURE(Scratch, "group-solve and trace commands") {
  REQUIRE(run("--cmd group-solve --t 30 --n 12 --q 3 --seed 2 --out \"" + scratch.string() + "\"", "gs") == 0);
  const Table s = read_table(scratch / "group-solve-2" / "summary.csv");
  REQUIRE(s.size() == 2);
  CHECK(s[1][5] == "3");

  CHECK(run("--cmd group-solve --n 12 --out \"" + scratch.string() + "\"", "gs_noq") != 0);
  CHECK(slurp(scratch / "gs_noq.stderr").find("error: code=invalid_argument") != std::string::npos);
  CHECK(run("--cmd group-solve --n 12 --q 13 --out \"" + scratch.string() + "\"", "gs_bigq") != 0);

  REQUIRE(run("--cmd trace --t 30 --n 15 --max-iter 100 --seed 1 --out \"" + scratch.string() + "\"", "tr") == 0);
  for (const char* m : {"pg", "fista"})
    for (const char* st : {"const", "backtrack"}) {
      const fs::path f = scratch / "trace-1" / (std::string("trace-") + m + "-" + st + ".csv");
      CHECK_MESSAGE(fs::exists(f), f.string());
    }
  CHECK(fs::exists(scratch / "trace-1" / "summary.csv"));
}

TEST_CASE_FIXTURE(Scratch, "dataset-backed solve") {
  const std::string data = std::string(CAPRSOC_TEST_DATA_DIR) + "/toy_housing.csv";
  const std::string schema = std::string(CAPRSOC_TEST_DATA_DIR) + "/toy_housing.schema";
  REQUIRE(run("--cmd reg-solve --data \"" + data + "\" --schema \"" + schema + "\" --max-iter 500 --out \"" +
                  scratch.string() + "\"",
              "ds") == 0);
  const auto j = nlohmann::json::parse(slurp(scratch / "reg-solve-0" / "encoding.json"));
  CHECK(j["rows"] == 40);
  CHECK(j["interactions"].size() == 6);
  const Table s = read_table(scratch / "reg-solve-0" / "summary.csv");
  CHECK(s[1][3] == "40");
  CHECK(s[1][4] == "11");
}

TEST_CASE_FIXTURE(Scratch, "usage errors") {
  CHECK(run("--bogus", "bogus") == 2);
  CHECK(run("--cmd nope", "nope") == 2);
  CHECK(run("--cmd reg-solve --data /nonexistent.csv --schema a:numeric --out \"" + scratch.string() + "\"", "io") !=
        0);
  CHECK(slurp(scratch / "io.stderr").find("error: code=io") != std::string::npos);
}
