#include <algorithm>
#include <sstream>
#include <string>
#include <vector>

#include "doctest.h"

#include "cbn/cli.hpp"
#include "temp_dir.hpp"

using cbn::run_cli;

namespace {

struct Run {
  int code;
  std::string out;
  std::string err;
};

Run cli(std::vector<std::string> args) {
  std::ostringstream out, err;
  const int code = run_cli(args, out, err);
  return {code, out.str(), err.str()};
}

std::string p(const TempDir& d, const std::string& name) { return d.file(name).string(); }

}  // namespace

TEST_CASE("usage errors") {
  CHECK(cli({}).code == cbn::kExitUsage);
  CHECK(cli({"frobnicate"}).code == cbn::kExitUsage);
  CHECK(cli({"cluster", "--input", "x.csv"}).code == cbn::kExitUsage);
  CHECK(cli({"cluster", "--input", "x.csv", "--out", "y.csv", "--bogus"}).code == cbn::kExitUsage);
  CHECK(cli({"cluster", "--input", "x.csv", "--out", "y.csv", "--tau0", "abc"}).code == cbn::kExitUsage);
  CHECK(cli({"cluster", "--input", "x.csv", "--out", "y.csv", "--mode", "medium"}).code ==
        cbn::kExitUsage);
  CHECK(cli({"--help"}).code == cbn::kExitOk);
}

TEST_CASE("help lists defaults") {
  auto r = cli({"cluster", "--help"});
  CHECK(r.code == cbn::kExitOk);
  CHECK(r.out.find("--grid-size") != std::string::npos);
  CHECK(r.out.find("100") != std::string::npos);
  CHECK(r.out.find("0.01") != std::string::npos);
  CHECK(r.out.find("auto") != std::string::npos);
}

TEST_CASE("input and algorithm errors") {
  TempDir d("cli_err");
  CHECK(cli({"cluster", "--input", p(d, "missing.csv"), "--out", p(d, "o.csv")}).code ==
        cbn::kExitInput);
  d.write("one.csv", "x,y\n1,2\n");
  CHECK(cli({"cluster", "--input", p(d, "one.csv"), "--out", p(d, "o.csv")}).code ==
        cbn::kExitAlgorithm);
  d.write("bad.csv", "x,y\n1,oops\n");
  CHECK(cli({"cluster", "--input", p(d, "bad.csv"), "--out", p(d, "o.csv")}).code ==
        cbn::kExitInput);
}

TEST_CASE("evaluate") {
  TempDir d("cli_eval");
  d.write("a.csv", "id,label\n1,0\n2,0\n3,1\n");
  d.write("b.csv", "id,label\n1,0\n2,1\n3,1\n");
  d.write("c.csv", "id,label\n1,0\n2,1\n9,1\n");

  auto self = cli({"evaluate", "--reference", p(d, "a.csv"), "--candidate", p(d, "a.csv"),
                   "--format", "csv"});
  CHECK(self.code == cbn::kExitOk);
  CHECK(self.out == "points,tp,tn,fp,fn,rand,jaccard\n3,1,2,0,0,1.000000,1.000000\n");

  auto hand = cli({"evaluate", "--reference", p(d, "a.csv"), "--candidate", p(d, "b.csv"),
                   "--format", "csv"});
  CHECK(hand.out == "points,tp,tn,fp,fn,rand,jaccard\n3,0,1,1,1,0.333333,0.000000\n");

  auto json = cli({"evaluate", "--reference", p(d, "a.csv"), "--candidate", p(d, "b.csv")});
  CHECK(json.out.find("\"tn\": 1") != std::string::npos);

  CHECK(cli({"evaluate", "--reference", p(d, "a.csv"), "--candidate", p(d, "c.csv")}).code ==
        cbn::kExitInput);
}

TEST_CASE("generate, cluster and compare") {
  TempDir d("cli_flow");
  REQUIRE(cli({"generate", "--benchmark13", "--seed", "7", "--out", p(d, "data.csv"), "--truth",
               p(d, "truth.csv")})
              .code == cbn::kExitOk);
  REQUIRE(cli({"generate", "--benchmark13", "--seed", "7", "--out", p(d, "again.csv")}).code ==
          cbn::kExitOk);
  CHECK(d.read("data.csv") == d.read("again.csv"));
  CHECK(d.read("data.csv").rfind("x,y,label,is_noise\n", 0) == 0);

  auto one = cli({"cluster", "--input", p(d, "data.csv"), "--out", p(d, "p1.csv"), "--threads", "1",
                  "--format", "csv", "--betti-out", p(d, "betti.csv"), "--summary-out",
                  p(d, "summary.csv")});
  REQUIRE(one.code == cbn::kExitOk);
  CHECK(one.out.find("tau_rule") != std::string::npos);
  auto eight = cli({"cluster", "--input", p(d, "data.csv"), "--out", p(d, "p8.csv"), "--threads",
                    "8", "--format", "csv"});
  REQUIRE(eight.code == cbn::kExitOk);
  CHECK(d.read("p1.csv") == d.read("p8.csv"));
  CHECK(one.out == eight.out);

  auto summary = d.read("summary.csv");
  CHECK(std::count(summary.begin(), summary.end(), '\n') == 101);
  auto betti = d.read("betti.csv");
  CHECK(std::count(betti.begin(), betti.end(), '\n') == 3801);

  auto score = cli({"evaluate", "--reference", p(d, "truth.csv"), "--candidate", p(d, "p1.csv"),
                    "--format", "csv"});
  REQUIRE(score.code == cbn::kExitOk);
  const auto row = score.out.substr(score.out.find('\n') + 1);
  std::vector<std::string> fields;
  std::stringstream ss(row);
  for (std::string f; std::getline(ss, f, ',');) fields.push_back(f);
  REQUIRE(fields.size() == 7);
  CHECK(std::stod(fields[5]) >= 0.98);
}

TEST_CASE("baselines from the command line") {
  TempDir d("cli_base");
  d.write("pts.csv", "x\n0\n1\n2\n10\n11\n");
  REQUIRE(cli({"baseline", "--input", p(d, "pts.csv"), "--out", p(d, "k.csv"), "--algorithm",
               "kmeans", "--k", "2", "--seed", "1"})
              .code == cbn::kExitOk);
  CHECK(d.read("k.csv") == "id,label\n0,0\n1,0\n2,0\n3,1\n4,1\n");
  REQUIRE(cli({"baseline", "--input", p(d, "pts.csv"), "--out", p(d, "h.csv"), "--algorithm",
               "hierarchical", "--cut-height", "5", "--dendrogram-out", p(d, "tree.csv")})
              .code == cbn::kExitOk);
  CHECK(d.read("h.csv") == "id,label\n0,0\n1,0\n2,0\n3,1\n4,1\n");
  REQUIRE(cli({"baseline", "--input", p(d, "pts.csv"), "--out", p(d, "db.csv"), "--algorithm",
               "dbscan", "--eps", "1.5", "--min-pts", "3"})
              .code == cbn::kExitOk);
  CHECK(d.read("db.csv") == "id,label\n0,0\n1,0\n2,0\n3,-1\n4,-1\n");
  CHECK(cli({"baseline", "--input", p(d, "pts.csv"), "--out", p(d, "x.csv"), "--algorithm",
             "kmeans", "--k", "9"})
            .code == cbn::kExitAlgorithm);
  CHECK(cli({"baseline", "--input", p(d, "pts.csv"), "--out", p(d, "x.csv"), "--algorithm",
             "spectral"})
            .code == cbn::kExitUsage);
}

TEST_CASE("ingest from the command line") {
  TempDir d("cli_ingest");
  d.write("obs.csv",
          "site,day,tss,lat,lon\n"
          "S1,2000-01-10,1,38.0,-76.0\n"
          "S1,2000-02-10,2,38.0,-76.0\n"
          "S1,2000-03-10,4,38.0,-76.0\n"
          "S2,2000-01-11,3,38.1,-76.0\n"
          "S2,2000-03-11,NA,38.1,-76.0\n"
          "S2,2000-02-11,5,38.1,-76.0\n");
  auto r = cli({"ingest", "--input", p(d, "obs.csv"), "--out", p(d, "cloud.csv"), "--window",
                "2000-01:2000-03", "--col-station", "site", "--col-date", "day", "--col-value", "tss",
                "--col-lat", "lat", "--col-lon", "lon"});
  REQUIRE(r.code == cbn::kExitOk);
  CHECK(r.err.find("skipped 1") != std::string::npos);
  CHECK(d.read("cloud.csv").rfind("id,2000-01,2000-02,2000-03\nS1,", 0) == 0);
  CHECK(d.read("cloud.csv.imputation.csv") == "station,month,donor,value\nS2,2000-03,S1,4\n");
  CHECK(cli({"ingest", "--input", p(d, "obs.csv"), "--out", p(d, "c.csv"), "--window", "2000-01"})
            .code == cbn::kExitUsage);
}
