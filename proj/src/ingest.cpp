#include "cbn/ingest.hpp"

#include <algorithm>
#include <charconv>
#include <cmath>
#include <fstream>
#include <istream>
#include <map>
#include <numbers>
#include <ostream>
#include <stdexcept>

#include <fmt/format.h>
#include <fmt/ostream.h>

#include "cbn/io.hpp"

namespace cbn {
namespace {

bool parse_int(std::string_view s, int& out) {
  if (s.empty()) return false;
  const auto [ptr, ec] = std::from_chars(s.data(), s.data() + s.size(), out);
  return ec == std::errc() && ptr == s.data() + s.size();
}

bool valid_date(int y, int m, int d) {
  if (m < 1 || m > 12 || d < 1) return false;
  static constexpr int kDays[] = {31, 28, 31, 30, 31, 30, 31, 31, 30, 31, 30, 31};
  const bool leap = (y % 4 == 0 && y % 100 != 0) || y % 400 == 0;
  return d <= kDays[m - 1] + ((m == 2 && leap) ? 1 : 0);
}

}  // namespace

std::optional<CalendarDate> parse_date(const std::string& raw) {
  std::string_view text(raw);
  while (!text.empty() && std::isspace(static_cast<unsigned char>(text.front()))) text.remove_prefix(1);
  while (!text.empty() && std::isspace(static_cast<unsigned char>(text.back()))) text.remove_suffix(1);
  CalendarDate d;
  if (text.size() >= 10 && text[4] == '-' && text[7] == '-') {
    if (text.size() > 10 && text[10] != 'T' && text[10] != ' ') return std::nullopt;
    if (!parse_int(text.substr(0, 4), d.year) || !parse_int(text.substr(5, 2), d.month) ||
        !parse_int(text.substr(8, 2), d.day)) {
      return std::nullopt;
    }
  } else if (text.size() == 10 && text[2] == '/' && text[5] == '/') {
    if (!parse_int(text.substr(0, 2), d.month) || !parse_int(text.substr(3, 2), d.day) ||
        !parse_int(text.substr(6, 4), d.year)) {
      return std::nullopt;
    }
  } else {
    return std::nullopt;
  }
  if (!valid_date(d.year, d.month, d.day)) return std::nullopt;
  return d;
}

YearMonth YearMonth::from_ordinal(long ordinal) {
  return {static_cast<int>(ordinal / 12), static_cast<int>(ordinal % 12) + 1};
}

std::string YearMonth::str() const { return fmt::format("{:04d}-{:02d}", year, month); }

YearMonth parse_year_month(const std::string& text) {
  YearMonth ym;
  if (text.size() != 7 || text[4] != '-' || !parse_int(std::string_view(text).substr(0, 4), ym.year) ||
      !parse_int(std::string_view(text).substr(5, 2), ym.month) || ym.month < 1 || ym.month > 12) {
    throw std::invalid_argument(fmt::format("'{}' is not a YYYY-MM month", text));
  }
  return ym;
}

MonthWindow MonthWindow::parse(const std::string& text) {
  const auto colon = text.find(':');
  if (colon == std::string::npos) {
    throw std::invalid_argument(fmt::format("window '{}' must look like YYYY-MM:YYYY-MM", text));
  }
  MonthWindow w{parse_year_month(text.substr(0, colon)), parse_year_month(text.substr(colon + 1))};
  if (w.last < w.first) throw std::invalid_argument("window ends before it starts");
  return w;
}

double great_circle_km(const GeoLocation& a, const GeoLocation& b) {
  constexpr double kRadiusKm = 6371.0;
  constexpr double kRad = std::numbers::pi / 180.0;
  const double dlat = (b.latitude - a.latitude) * kRad;
  const double dlon = (b.longitude - a.longitude) * kRad;
  const double h = std::sin(dlat / 2) * std::sin(dlat / 2) +
                   std::cos(a.latitude * kRad) * std::cos(b.latitude * kRad) *
                       std::sin(dlon / 2) * std::sin(dlon / 2);
  return 2.0 * kRadiusKm * std::asin(std::min(1.0, std::sqrt(h)));
}

LoadedObservations load_observations(std::istream& in, const ColumnMapping& columns) {
  const char delimiter = columns.delimiter ? columns.delimiter : ',';
  LoadedObservations loaded;
  std::string line;
  std::vector<std::string> header;
  std::size_t line_no = 0;
  while (header.empty() && std::getline(in, line)) {
    ++line_no;
    if (line.find_first_not_of(" \t\r\n") != std::string::npos) header = split_delimited(line, delimiter);
  }
  if (header.empty()) throw ParseError("zero valid rows");

  auto find_column = [&](const std::string& name) -> std::size_t {
    const auto it = std::find(header.begin(), header.end(), name);
    if (it == header.end()) throw ParseError(fmt::format("missing required column '{}'", name));
    return static_cast<std::size_t>(it - header.begin());
  };
  const std::size_t station_col = find_column(columns.station);
  const std::size_t date_col = find_column(columns.date);
  const std::size_t value_col = find_column(columns.value);
  if (columns.latitude.has_value() != columns.longitude.has_value()) {
    throw ParseError("latitude and longitude columns must be given together");
  }
  std::optional<std::size_t> lat_col;
  std::optional<std::size_t> lon_col;
  if (columns.latitude) {
    lat_col = find_column(*columns.latitude);
    lon_col = find_column(*columns.longitude);
  }

  auto skip = [&](const std::string& reason) {
    ++loaded.skipped;
    loaded.skip_reasons.push_back(fmt::format("line {}: {}", line_no, reason));
  };
  while (std::getline(in, line)) {
    ++line_no;
    if (line.find_first_not_of(" \t\r\n") == std::string::npos) continue;
    std::vector<std::string> fields;
    try {
      fields = split_delimited(line, delimiter);
    } catch (const ParseError& e) {
      skip(e.what());
      continue;
    }
    if (fields.size() != header.size()) {
      skip(fmt::format("expected {} fields, found {}", header.size(), fields.size()));
      continue;
    }
    ObservationRecord rec;
    rec.station = fields[station_col];
    if (rec.station.empty()) {
      skip("empty station id");
      continue;
    }
    const auto date = parse_date(fields[date_col]);
    if (!date) {
      skip(fmt::format("unparseable date '{}'", fields[date_col]));
      continue;
    }
    rec.date = *date;
    try {
      rec.value = parse_double(fields[value_col]);
    } catch (const ParseError&) {
      skip(fmt::format("unparseable value '{}'", fields[value_col]));
      continue;
    }
    if (lat_col && !(fields[*lat_col].empty() && fields[*lon_col].empty())) {
      try {
        rec.location = GeoLocation{parse_double(fields[*lat_col]), parse_double(fields[*lon_col])};
      } catch (const ParseError&) {
        skip("unparseable coordinates");
        continue;
      }
    }
    loaded.records.push_back(std::move(rec));
  }
  if (loaded.records.empty()) throw ParseError("zero valid rows");
  return loaded;
}

LoadedObservations load_observations(const std::filesystem::path& path, ColumnMapping columns) {
  std::ifstream in(path);
  if (!in) throw ParseError(fmt::format("cannot open '{}'", path.string()));
  if (columns.delimiter == 0) {
    const auto ext = path.extension().string();
    columns.delimiter = (ext == ".tsv" || ext == ".tab") ? '\t' : ',';
  }
  try {
    return load_observations(in, columns);
  } catch (const ParseError& e) {
    throw ParseError(fmt::format("{}: {}", path.string(), e.what()));
  }
}

std::size_t StationSeries::missing_count() const {
  return static_cast<std::size_t>(
      std::count_if(values.begin(), values.end(), [](const auto& v) { return !v.has_value(); }));
}

std::vector<StationSeries> monthly_average(const std::vector<ObservationRecord>& records,
                                           const MonthWindow& window) {
  if (window.last < window.first) throw std::invalid_argument("empty month window");
  const std::size_t length = window.length();
  struct Accumulator {
    std::optional<GeoLocation> location;
    std::vector<double> sum;
    std::vector<std::size_t> count;
  };
  std::map<std::string, Accumulator> stations;
  for (const auto& rec : records) {
    auto& acc = stations[rec.station];
    if (acc.sum.empty()) {
      acc.sum.assign(length, 0.0);
      acc.count.assign(length, 0);
    }
    if (!acc.location && rec.location) acc.location = rec.location;
    const long slot = YearMonth{rec.date.year, rec.date.month}.ordinal() - window.first.ordinal();
    if (slot < 0 || slot >= static_cast<long>(length)) continue;
    acc.sum[static_cast<std::size_t>(slot)] += rec.value;
    ++acc.count[static_cast<std::size_t>(slot)];
  }

  std::vector<StationSeries> out;
  out.reserve(stations.size());
  for (auto& [id, acc] : stations) {
    StationSeries s{id, acc.location, window.first, std::vector<std::optional<double>>(length)};
    for (std::size_t t = 0; t < length; ++t) {
      if (acc.count[t] > 0) s.values[t] = acc.sum[t] / static_cast<double>(acc.count[t]);
    }
    out.push_back(std::move(s));
  }
  return out;
}

ImputationResult impute_from_neighbors(const std::vector<StationSeries>& series) {
  ImputationResult result;
  result.series = series;
  if (series.empty()) return result;
  const std::size_t length = series.front().values.size();
  for (const auto& s : series) {
    if (s.values.size() != length) throw std::invalid_argument("station series differ in length");
  }

  // Visit stations in id order so equidistant donors resolve to the lower id.
  std::vector<std::size_t> by_id(series.size());
  for (std::size_t i = 0; i < by_id.size(); ++i) by_id[i] = i;
  std::sort(by_id.begin(), by_id.end(),
            [&](std::size_t a, std::size_t b) { return series[a].station < series[b].station; });

  for (std::size_t si : by_id) {
    const auto& self = series[si];
    if (self.missing_count() == 0) continue;
    std::optional<double> own_mean;
    {
      double sum = 0.0;
      std::size_t count = 0;
      for (const auto& v : self.values) {
        if (v) {
          sum += *v;
          ++count;
        }
      }
      if (count > 0) own_mean = sum / static_cast<double>(count);
    }
    for (std::size_t t = 0; t < length; ++t) {
      if (self.values[t]) continue;
      const StationSeries* donor = nullptr;
      double best = 0.0;
      if (self.location) {
        for (std::size_t di : by_id) {
          const auto& other = series[di];
          if (di == si || !other.location || !other.values[t]) continue;
          const double d = great_circle_km(*self.location, *other.location);
          if (!donor || d < best) {
            donor = &other;
            best = d;
          }
        }
      } else {
        const bool anyone_observed = std::any_of(series.begin(), series.end(), [&](const auto& o) {
          return &o != &self && o.values[t].has_value();
        });
        if (anyone_observed) {
          throw std::invalid_argument(
              fmt::format("station '{}' has no location for neighbor imputation", self.station));
        }
      }
      ImputedCell cell{self.station, YearMonth::from_ordinal(self.first_month.ordinal() + static_cast<long>(t)),
                       {}, 0.0};
      if (donor) {
        cell.donor = donor->station;
        cell.value = *donor->values[t];
      } else if (own_mean) {
        cell.value = *own_mean;
      } else {
        throw std::invalid_argument(fmt::format(
            "month {} is missing at every station and '{}' has no observations", cell.month.str(),
            self.station));
      }
      result.series[si].values[t] = cell.value;
      result.report.push_back(std::move(cell));
    }
  }
  return result;
}

std::vector<StationSeries> zscale(const std::vector<StationSeries>& series) {
  std::vector<StationSeries> out = series;
  for (auto& s : out) {
    const std::size_t n = s.values.size();
    if (s.missing_count() > 0) {
      throw std::invalid_argument(fmt::format("station '{}' still has missing months", s.station));
    }
    if (n < 2) throw std::invalid_argument(fmt::format("station '{}' has fewer than 2 values", s.station));
    double mean = 0.0;
    for (const auto& v : s.values) mean += *v;
    mean /= static_cast<double>(n);
    double ss = 0.0;
    for (const auto& v : s.values) ss += (*v - mean) * (*v - mean);
    const double sd = std::sqrt(ss / static_cast<double>(n - 1));
    if (!(sd > 0.0)) {
      throw std::invalid_argument(fmt::format("station '{}' is constant (zero variance)", s.station));
    }
    for (auto& v : s.values) v = (*v - mean) / sd;
  }
  return out;
}

PointCloud to_point_cloud(const std::vector<StationSeries>& series) {
  if (series.empty()) throw std::invalid_argument("no station series");
  std::vector<const StationSeries*> sorted;
  for (const auto& s : series) sorted.push_back(&s);
  std::sort(sorted.begin(), sorted.end(),
            [](const auto* a, const auto* b) { return a->station < b->station; });
  const std::size_t dim = sorted.front()->values.size();
  std::vector<double> coords;
  coords.reserve(dim * sorted.size());
  std::vector<std::string> ids;
  for (const auto* s : sorted) {
    if (s->values.size() != dim) throw std::invalid_argument("station series differ in length");
    for (const auto& v : s->values) {
      if (!v) throw std::invalid_argument(fmt::format("station '{}' has missing months", s->station));
      coords.push_back(*v);
    }
    ids.push_back(s->station);
  }
  return PointCloud(dim, std::move(coords), std::move(ids));
}

std::vector<std::string> month_column_names(const MonthWindow& window) {
  std::vector<std::string> names;
  for (long o = window.first.ordinal(); o <= window.last.ordinal(); ++o) {
    names.push_back(YearMonth::from_ordinal(o).str());
  }
  return names;
}

void write_imputation_report(std::ostream& out, const std::vector<ImputedCell>& report) {
  out << "station,month,donor,value\n";
  for (const auto& cell : report) {
    fmt::print(out, "{},{},{},{:.17g}\n", cell.station, cell.month.str(),
               cell.donor.empty() ? "self-mean" : cell.donor, cell.value);
  }
}

}  // namespace cbn
