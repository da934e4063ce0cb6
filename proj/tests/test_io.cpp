#include <sstream>

#include "doctest.h"

#include "cbn/io.hpp"
#include "temp_dir.hpp"

using namespace cbn;

TEST_CASE("delimited splitting") {
  CHECK(split_delimited("a, b ,c", ',') == std::vector<std::string>{"a", "b", "c"});
  CHECK(split_delimited("\"x,y\",z", ',') == std::vector<std::string>{"x,y", "z"});
  CHECK(split_delimited("\"say \"\"hi\"\"\"", ',') == std::vector<std::string>{"say \"hi\""});
  CHECK(split_delimited("a\tb", '\t') == std::vector<std::string>{"a", "b"});
  CHECK(split_delimited("a,", ',') == std::vector<std::string>{"a", ""});
  CHECK_THROWS_AS(split_delimited("\"open", ','), ParseError);
}

TEST_CASE("strict numbers") {
  CHECK(parse_double("1.5") == 1.5);
  CHECK(parse_double(" -2e3 ") == -2000.0);
  CHECK(parse_double("+4") == 4.0);
  CHECK_THROWS_AS(parse_double("NA"), ParseError);
  CHECK_THROWS_AS(parse_double("1.5x"), ParseError);
  CHECK_THROWS_AS(parse_double(""), ParseError);
  CHECK_THROWS_AS(parse_double("inf"), ParseError);
}

TEST_CASE("ragged rows are rejected") {
  std::istringstream in("a,b\n1,2\n3\n");
  CHECK_THROWS_AS(read_delimited(in), ParseError);
}

TEST_CASE("point clouds") {
  TempDir dir("io");
  auto plain = dir.write("plain.csv", "x,y,label,is_noise\n0,0,0,0\n3,4,-1,1\n");
  auto cloud = read_point_cloud_csv(plain);
  CHECK(cloud.size() == 2);
  CHECK(cloud.dimension() == 2);
  CHECK_FALSE(cloud.has_ids());
  CHECK(cloud.point(1)[1] == 4.0);

  auto named = dir.write("named.csv", "id,a\nst2,0.1\nst1,0.2\n");
  auto ids = read_point_cloud_csv(named);
  CHECK(ids.id(0) == "st2");
  CHECK(ids.dimension() == 1);

  CHECK_THROWS_AS(read_point_cloud_csv(dir.write("bad.csv", "x\nfoo\n")), ParseError);
  CHECK_THROWS_AS(read_point_cloud_csv(dir.write("empty.csv", "")), ParseError);
  CHECK_THROWS_AS(read_point_cloud_csv(dir.write("dup.csv", "id,x\na,1\na,2\n")), ParseError);
  CHECK_THROWS_AS(read_point_cloud_csv(dir.path / "missing.csv"), ParseError);

  std::ostringstream out;
  PointCloud exact({{0.1, 1.0 / 3.0}}, {"p"});
  write_point_cloud_csv(out, exact, {"u", "v"});
  auto round = dir.write("round.csv", out.str());
  auto back = read_point_cloud_csv(round);
  CHECK(back.point(0)[0] == 0.1);
  CHECK(back.point(0)[1] == 1.0 / 3.0);
}

TEST_CASE("distance matrices") {
  TempDir dir("io");
  auto m = read_distance_matrix_csv(dir.write("m.csv", "0,1\n1,0\n"));
  CHECK(m(0, 1) == 1.0);
  CHECK_THROWS_AS(read_distance_matrix_csv(dir.write("r.csv", "0,1\n1\n")), ParseError);
}

TEST_CASE("partitions") {
  TempDir dir("io");
  std::ostringstream out;
  write_partition_csv(out, {"a", "b", "c"}, Partition{{0, -1, 0}});
  CHECK(out.str() == "id,label\na,0\nb,-1\nc,0\n");

  auto ref = read_partition_csv(dir.write("ref.csv", "id,label\na,5\nb,5\nc,2\n"));
  CHECK(ref.partition.labels == std::vector<int>{0, 0, 1});
  auto cand = read_partition_csv(dir.write("cand.csv", "label,id\n1,c\n0,a\n0,b\n"));
  CHECK(align_partition(ref, cand).labels == std::vector<int>{1, 1, 0});

  auto other = read_partition_csv(dir.write("other.csv", "id,label\na,0\nb,0\nz,0\n"));
  CHECK_THROWS_AS(align_partition(ref, other), ParseError);
  CHECK_THROWS_AS(read_partition_csv(dir.write("bad.csv", "id,label\na,x\n")), ParseError);
  CHECK_THROWS_AS(read_partition_csv(dir.write("neg.csv", "id,label\na,-2\n")), ParseError);
  CHECK_THROWS_AS(read_partition_csv(dir.write("cols.csv", "id,cluster\na,1\n")), ParseError);
}
