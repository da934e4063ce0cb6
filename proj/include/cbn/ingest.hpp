#pragma once

#include <cstddef>
#include <filesystem>
#include <iosfwd>
#include <optional>
#include <string>
#include <vector>

#include "cbn/core.hpp"

namespace cbn {

struct CalendarDate {
  int year = 0;
  int month = 0;
  int day = 0;
};

/// Accepts `YYYY-MM-DD` (optionally followed by a time part) and `MM/DD/YYYY`.
std::optional<CalendarDate> parse_date(const std::string& text);

struct YearMonth {
  int year = 0;
  int month = 1;

  /// Months since year 0, for arithmetic.
  long ordinal() const { return static_cast<long>(year) * 12 + (month - 1); }
  static YearMonth from_ordinal(long ordinal);
  std::string str() const;  // YYYY-MM
  auto operator<=>(const YearMonth&) const = default;
};

YearMonth parse_year_month(const std::string& text);

/// Inclusive month range.
struct MonthWindow {
  YearMonth first;
  YearMonth last;

  std::size_t length() const { return static_cast<std::size_t>(last.ordinal() - first.ordinal() + 1); }
  /// `YYYY-MM:YYYY-MM`.
  static MonthWindow parse(const std::string& text);
};

struct GeoLocation {
  double latitude = 0.0;
  double longitude = 0.0;
};

/// Great-circle distance in kilometres (haversine, mean Earth radius 6371 km).
double great_circle_km(const GeoLocation& a, const GeoLocation& b);

struct ObservationRecord {
  std::string station;
  CalendarDate date;
  double value = 0.0;
  std::optional<GeoLocation> location;
};

struct ColumnMapping {
  std::string station = "station";
  std::string date = "date";
  std::string value = "value";
  std::optional<std::string> latitude;
  std::optional<std::string> longitude;
  /// 0 picks tab for `.tsv`/`.tab` files and comma otherwise.
  char delimiter = 0;
};

struct LoadedObservations {
  std::vector<ObservationRecord> records;
  std::size_t skipped = 0;
  /// One line per skipped row: "line N: reason".
  std::vector<std::string> skip_reasons;
};

LoadedObservations load_observations(std::istream& in, const ColumnMapping& columns);
LoadedObservations load_observations(const std::filesystem::path& path, ColumnMapping columns);

struct StationSeries {
  std::string station;
  std::optional<GeoLocation> location;
  YearMonth first_month;
  /// Monthly means; nullopt marks a month without observations.
  std::vector<std::optional<double>> values;

  std::size_t missing_count() const;
};

/// One series per station (ascending id), one slot per window month.
std::vector<StationSeries> monthly_average(const std::vector<ObservationRecord>& records,
                                           const MonthWindow& window);

struct ImputedCell {
  std::string station;
  YearMonth month;
  /// Donor station id, or empty when the station's own observed mean was used.
  std::string donor;
  double value = 0.0;
};

struct ImputationResult {
  std::vector<StationSeries> series;
  std::vector<ImputedCell> report;
};

/// Fills each missing month from the nearest station (great-circle distance)
/// that observed that month, ties to the lower station id; falls back to the
/// station's own observed mean when nobody observed the month.
ImputationResult impute_from_neighbors(const std::vector<StationSeries>& series);

/// Per-station (x - mean) / sd with the n - 1 sample standard deviation.
std::vector<StationSeries> zscale(const std::vector<StationSeries>& series);

/// One point per station in ascending id order, identifiers = station ids.
PointCloud to_point_cloud(const std::vector<StationSeries>& series);

/// Feature column names `YYYY-MM` for the window.
std::vector<std::string> month_column_names(const MonthWindow& window);

/// `station,month,donor,value`; an empty donor prints as `self-mean`.
void write_imputation_report(std::ostream& out, const std::vector<ImputedCell>& report);

}  // namespace cbn
