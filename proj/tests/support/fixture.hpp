#pragma once

#include <cstdint>
#include <filesystem>
#include <iosfwd>

namespace micromob::testing {

/// What the fixture generator planted, counted during construction so tests
/// can assert parse/filter accounting against it.
struct FixtureStats {
  uint64_t rows_total = 0;        ///< data rows written (header excluded)
  uint64_t rows_malformed = 0;    ///< rows built to fail parsing
  uint64_t rows_parsed = 0;       ///< rows_total - rows_malformed
  uint64_t dow_conflicts = 0;     ///< rows with a wrong Day of Week column
  uint64_t hour_conflicts = 0;    ///< rows with a wrong Hour column
  uint64_t rows_outside_filter = 0;  ///< parsed rows the default filter drops
  uint64_t bicycle_kept = 0;      ///< parsed+kept rows per vehicle type
  uint64_t scooter_kept = 0;
};

/// Writes the deterministic 10,000-row trips CSV (austin export layout,
/// 56 days starting 2018-12-01). Speeds are drawn around vehicle- and
/// regime-dependent means so the weekday/weekend and daytime/nighttime
/// clusters are recoverable; a small share of rows is malformed or falls
/// outside the default filter bounds.
FixtureStats write_fixture_csv(std::ostream& out);

/// write_fixture_csv into a file; throws on I/O failure.
FixtureStats write_fixture_file(const std::filesystem::path& path);

/// Unique scratch directory under the system temp root, removed on
/// destruction.
class TempDir {
 public:
  explicit TempDir(const char* tag);
  ~TempDir();
  TempDir(const TempDir&) = delete;
  TempDir& operator=(const TempDir&) = delete;

  const std::filesystem::path& path() const { return path_; }

 private:
  std::filesystem::path path_;
};

}  // namespace micromob::testing
