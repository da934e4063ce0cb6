#include "cbn/io.hpp"

#include <charconv>
#include <cmath>
#include <fstream>
#include <istream>
#include <ostream>
#include <unordered_map>

#include <fmt/format.h>
#include <fmt/ostream.h>

namespace cbn {
namespace {

std::string trim(const std::string& s) {
  const auto first = s.find_first_not_of(" \t\r\n");
  if (first == std::string::npos) return {};
  const auto last = s.find_last_not_of(" \t\r\n");
  return s.substr(first, last - first + 1);
}

std::ifstream open_input(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) throw ParseError(fmt::format("cannot open '{}'", path.string()));
  return in;
}

}  // namespace

long CsvTable::column(const std::string& name) const {
  for (std::size_t i = 0; i < header.size(); ++i) {
    if (header[i] == name) return static_cast<long>(i);
  }
  return -1;
}

std::vector<std::string> split_delimited(const std::string& line, char delimiter) {
  std::vector<std::string> fields;
  std::string current;
  bool quoted = false;
  for (std::size_t i = 0; i < line.size(); ++i) {
    const char ch = line[i];
    if (quoted) {
      if (ch == '"') {
        if (i + 1 < line.size() && line[i + 1] == '"') {
          current.push_back('"');
          ++i;
        } else {
          quoted = false;
        }
      } else {
        current.push_back(ch);
      }
    } else if (ch == '"') {
      quoted = true;
    } else if (ch == delimiter) {
      fields.push_back(trim(current));
      current.clear();
    } else {
      current.push_back(ch);
    }
  }
  if (quoted) throw ParseError("unterminated quoted field");
  fields.push_back(trim(current));
  return fields;
}

CsvTable read_delimited(std::istream& in, char delimiter) {
  CsvTable table;
  std::string line;
  std::size_t line_no = 0;
  bool have_header = false;
  while (std::getline(in, line)) {
    ++line_no;
    if (trim(line).empty()) continue;
    auto fields = split_delimited(line, delimiter);
    if (!have_header) {
      table.header = std::move(fields);
      have_header = true;
      continue;
    }
    if (fields.size() != table.header.size()) {
      throw ParseError(fmt::format("line {}: expected {} fields, found {}", line_no,
                                   table.header.size(), fields.size()));
    }
    table.rows.push_back(std::move(fields));
  }
  return table;
}

CsvTable read_delimited_file(const std::filesystem::path& path, char delimiter) {
  auto in = open_input(path);
  try {
    return read_delimited(in, delimiter);
  } catch (const ParseError& e) {
    throw ParseError(fmt::format("{}: {}", path.string(), e.what()));
  }
}

double parse_double(const std::string& field) {
  const std::string s = trim(field);
  double value = 0.0;
  const char* begin = s.data();
  const char* end = s.data() + s.size();
  if (!s.empty() && *begin == '+') ++begin;
  const auto [ptr, ec] = std::from_chars(begin, end, value);
  if (s.empty() || ec != std::errc() || ptr != end || !std::isfinite(value)) {
    throw ParseError(fmt::format("'{}' is not a finite number", field));
  }
  return value;
}

PointCloud read_point_cloud_csv(const std::filesystem::path& path) {
  const auto table = read_delimited_file(path, ',');
  if (table.header.empty()) throw ParseError(fmt::format("{}: missing header", path.string()));
  if (table.rows.empty()) throw ParseError(fmt::format("{}: no points", path.string()));

  const long id_col = table.column("id");
  std::vector<std::size_t> coord_cols;
  for (std::size_t c = 0; c < table.header.size(); ++c) {
    const auto& name = table.header[c];
    if (static_cast<long>(c) == id_col || name == "label" || name == "is_noise") continue;
    coord_cols.push_back(c);
  }
  if (coord_cols.empty()) throw ParseError(fmt::format("{}: no coordinate columns", path.string()));

  std::vector<double> coords;
  coords.reserve(table.rows.size() * coord_cols.size());
  std::vector<std::string> ids;
  for (std::size_t r = 0; r < table.rows.size(); ++r) {
    for (std::size_t c : coord_cols) {
      try {
        coords.push_back(parse_double(table.rows[r][c]));
      } catch (const ParseError& e) {
        throw ParseError(fmt::format("{}: row {}, column '{}': {}", path.string(), r + 1,
                                     table.header[c], e.what()));
      }
    }
    if (id_col >= 0) ids.push_back(table.rows[r][static_cast<std::size_t>(id_col)]);
  }
  try {
    return PointCloud(coord_cols.size(), std::move(coords), std::move(ids));
  } catch (const std::invalid_argument& e) {
    throw ParseError(fmt::format("{}: {}", path.string(), e.what()));
  }
}

void write_point_cloud_csv(std::ostream& out, const PointCloud& cloud,
                           const std::vector<std::string>& column_names) {
  if (column_names.size() != cloud.dimension()) {
    throw std::invalid_argument("column name count differs from the point dimension");
  }
  out << "id";
  for (const auto& name : column_names) out << ',' << name;
  out << '\n';
  for (std::size_t i = 0; i < cloud.size(); ++i) {
    out << cloud.id(i);
    for (double v : cloud.point(i)) fmt::print(out, ",{:.17g}", v);
    out << '\n';
  }
}

DistanceMatrix read_distance_matrix_csv(const std::filesystem::path& path) {
  auto in = open_input(path);
  std::vector<std::vector<double>> rows;
  std::string line;
  while (std::getline(in, line)) {
    if (trim(line).empty()) continue;
    std::vector<double> row;
    for (const auto& f : split_delimited(line, ',')) row.push_back(parse_double(f));
    rows.push_back(std::move(row));
  }
  DistanceMatrix m(rows.size());
  for (std::size_t i = 0; i < rows.size(); ++i) {
    if (rows[i].size() != rows.size()) {
      throw ParseError(fmt::format("{}: matrix row {} has {} entries, expected {}", path.string(),
                                   i + 1, rows[i].size(), rows.size()));
    }
    for (std::size_t j = 0; j < rows.size(); ++j) m(i, j) = rows[i][j];
  }
  return m;
}

void write_partition_csv(std::ostream& out, const std::vector<std::string>& ids,
                         const Partition& partition) {
  if (ids.size() != partition.size()) {
    throw std::invalid_argument("identifier count differs from the partition size");
  }
  out << "id,label\n";
  for (std::size_t i = 0; i < ids.size(); ++i) out << ids[i] << ',' << partition.labels[i] << '\n';
}

LabeledPartition read_partition_csv(const std::filesystem::path& path) {
  const auto table = read_delimited_file(path, ',');
  const long id_col = table.column("id");
  const long label_col = table.column("label");
  if (id_col < 0 || label_col < 0) {
    throw ParseError(fmt::format("{}: partition files need 'id' and 'label' columns", path.string()));
  }
  LabeledPartition result;
  std::vector<int> raw;
  for (const auto& row : table.rows) {
    const auto& field = row[static_cast<std::size_t>(label_col)];
    int label = 0;
    const auto [ptr, ec] = std::from_chars(field.data(), field.data() + field.size(), label);
    if (ec != std::errc() || ptr != field.data() + field.size() || label < Partition::kNoise) {
      throw ParseError(fmt::format("{}: invalid label '{}'", path.string(), field));
    }
    result.ids.push_back(row[static_cast<std::size_t>(id_col)]);
    raw.push_back(label);
  }
  result.partition = Partition::canonical(raw);
  return result;
}

Partition align_partition(const LabeledPartition& reference, const LabeledPartition& candidate) {
  if (reference.ids.size() != candidate.ids.size()) {
    throw ParseError(fmt::format("partitions cover {} and {} points", reference.ids.size(),
                                 candidate.ids.size()));
  }
  std::unordered_map<std::string, std::size_t> position;
  for (std::size_t i = 0; i < candidate.ids.size(); ++i) {
    if (!position.emplace(candidate.ids[i], i).second) {
      throw ParseError(fmt::format("duplicate point id '{}'", candidate.ids[i]));
    }
  }
  Partition aligned;
  aligned.labels.reserve(reference.ids.size());
  for (const auto& id : reference.ids) {
    const auto it = position.find(id);
    if (it == position.end()) throw ParseError(fmt::format("point id '{}' missing from candidate", id));
    aligned.labels.push_back(candidate.partition.labels[it->second]);
  }
  return aligned;
}

}  // namespace cbn
