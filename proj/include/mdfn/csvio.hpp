#pragma once

#include <string>
#include <vector>

namespace mdfn {

/// Column-oriented CSV table. Headers carry units, values use '.' decimals,
/// and files open with '#'-prefixed metadata lines (config hash, provenance).
struct CsvTable {
  std::vector<std::string> metadata; //!< '#'-prefixed lines, without the '#'
  std::vector<std::string> header;
  std::vector<std::vector<std::string>> rows;

  std::size_t column(const std::string &name) const; //!< throws if absent
  double number(std::size_t row, std::size_t col) const;
};

/// Incremental CSV writer. All numeric formatting goes through this class so
/// every output file shares the same locale-independent conventions.
class CsvWriter {
public:
  explicit CsvWriter(std::vector<std::string> header);

  void add_metadata(const std::string &key, const std::string &value);
  void begin_row();
  void add(double value);
  void add(const std::string &value);
  void end_row();

  std::string str() const;
  void save(const std::string &path) const;

  static std::string format_number(double value);

private:
  std::vector<std::string> metadata_;
  std::vector<std::string> header_;
  std::vector<std::vector<std::string>> rows_;
  std::vector<std::string> current_;
  bool in_row_ = false;
};

/// Strict CSV loader: requires a rectangular body matching the header width;
/// leading '#' lines are collected as metadata. Used by the tests to validate
/// generated artifacts.
CsvTable load_csv(const std::string &path);
CsvTable parse_csv(const std::string &text);

} // namespace mdfn
