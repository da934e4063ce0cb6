#pragma once

#include <filesystem>
#include <iosfwd>
#include <stdexcept>
#include <string>
#include <vector>

#include "cbn/core.hpp"
#include "cbn/partition.hpp"

namespace cbn {

/// Malformed or unreadable input data.
class ParseError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

struct CsvTable {
  std::vector<std::string> header;
  std::vector<std::vector<std::string>> rows;

  /// Index of `name` in the header, or -1.
  long column(const std::string& name) const;
};

/// Splits one delimited line; double quotes protect delimiters and `""` escapes a quote.
std::vector<std::string> split_delimited(const std::string& line, char delimiter);

/// Reads a delimited file whose first nonblank line is the header. Every row
/// must have the header's field count.
CsvTable read_delimited(std::istream& in, char delimiter = ',');
CsvTable read_delimited_file(const std::filesystem::path& path, char delimiter = ',');

/// Strict decimal parse of the whole field.
double parse_double(const std::string& field);

/// Points from a CSV with a header. An `id` column supplies identifiers;
/// `label` and `is_noise` columns are ignored; every other column is a coordinate.
PointCloud read_point_cloud_csv(const std::filesystem::path& path);

/// `id,<names...>` rows, values printed round-trip exact.
void write_point_cloud_csv(std::ostream& out, const PointCloud& cloud,
                           const std::vector<std::string>& column_names);

/// Square matrix of numbers, one row per line, no header.
DistanceMatrix read_distance_matrix_csv(const std::filesystem::path& path);

struct LabeledPartition {
  std::vector<std::string> ids;
  Partition partition;
};

/// `id,label` with noise as -1.
void write_partition_csv(std::ostream& out, const std::vector<std::string>& ids,
                         const Partition& partition);
LabeledPartition read_partition_csv(const std::filesystem::path& path);

/// Reorders `candidate` to the id order of `reference`. Throws ParseError
/// when the id sets differ.
Partition align_partition(const LabeledPartition& reference, const LabeledPartition& candidate);

}  // namespace cbn
