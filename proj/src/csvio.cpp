#include "mdfn/csvio.hpp"

#include "mdfn/errors.hpp"

#include <cmath>
#include <cstdio>
#include <fstream>
#include <sstream>

namespace mdfn {

std::size_t CsvTable::column(const std::string &name) const {
  for (std::size_t i = 0; i < header.size(); ++i)
    if (header[i] == name)
      return i;
  throw ConfigError("csv: no column named '" + name + "'");
}

double CsvTable::number(std::size_t row, std::size_t col) const {
  const std::string &s = rows.at(row).at(col);
  if (s == "nan")
    return std::nan("");
  std::size_t pos = 0;
  const double v = std::stod(s, &pos);
  if (pos != s.size())
    throw ConfigError("csv: cell '" + s + "' is not a number");
  return v;
}

CsvWriter::CsvWriter(std::vector<std::string> header) : header_(std::move(header)) {}

void CsvWriter::add_metadata(const std::string &key, const std::string &value) {
  metadata_.push_back(key + "=" + value);
}

void CsvWriter::begin_row() {
  if (in_row_)
    throw StateError("csv: begin_row while a row is open");
  current_.clear();
  in_row_ = true;
}

void CsvWriter::add(double value) { add(format_number(value)); }

void CsvWriter::add(const std::string &value) {
  if (!in_row_)
    throw StateError("csv: add outside a row");
  current_.push_back(value);
}

void CsvWriter::end_row() {
  if (!in_row_)
    throw StateError("csv: end_row without begin_row");
  if (current_.size() != header_.size())
    throw StateError("csv: row has " + std::to_string(current_.size()) +
                     " cells, header has " + std::to_string(header_.size()));
  rows_.push_back(current_);
  in_row_ = false;
}

std::string CsvWriter::format_number(double value) {
  if (std::isnan(value))
    return "nan";
  char buf[40];
  std::snprintf(buf, sizeof buf, "%.10g", value);
  return buf;
}

std::string CsvWriter::str() const {
  std::ostringstream out;
  for (const auto &m : metadata_)
    out << "# " << m << "\n";
  for (std::size_t i = 0; i < header_.size(); ++i)
    out << (i ? "," : "") << header_[i];
  out << "\n";
  for (const auto &row : rows_) {
    for (std::size_t i = 0; i < row.size(); ++i)
      out << (i ? "," : "") << row[i];
    out << "\n";
  }
  return out.str();
}

void CsvWriter::save(const std::string &path) const {
  std::ofstream f(path);
  if (!f)
    throw ConfigError("csv: cannot write '" + path + "'");
  f << str();
  if (!f)
    throw ConfigError("csv: write to '" + path + "' failed");
}

namespace {

std::vector<std::string> split_line(const std::string &line) {
  std::vector<std::string> cells;
  std::string cell;
  for (char c : line) {
    if (c == ',') {
      cells.push_back(cell);
      cell.clear();
    } else if (c != '\r') {
      cell += c;
    }
  }
  cells.push_back(cell);
  return cells;
}

} // namespace

CsvTable parse_csv(const std::string &text) {
  CsvTable t;
  std::istringstream in(text);
  std::string line;
  bool have_header = false;
  std::size_t line_no = 0;
  while (std::getline(in, line)) {
    ++line_no;
    if (!line.empty() && line.back() == '\r')
      line.pop_back();
    if (line.empty())
      continue;
    if (line[0] == '#') {
      if (have_header)
        throw ConfigError("csv: metadata after header at line " + std::to_string(line_no));
      std::size_t start = 1;
      while (start < line.size() && line[start] == ' ')
        ++start;
      t.metadata.push_back(line.substr(start));
      continue;
    }
    auto cells = split_line(line);
    if (!have_header) {
      t.header = std::move(cells);
      have_header = true;
      continue;
    }
    if (cells.size() != t.header.size())
      throw ConfigError("csv: line " + std::to_string(line_no) + " has " +
                        std::to_string(cells.size()) + " cells, header has " +
                        std::to_string(t.header.size()));
    t.rows.push_back(std::move(cells));
  }
  if (!have_header)
    throw ConfigError("csv: no header line");
  return t;
}

CsvTable load_csv(const std::string &path) {
  std::ifstream in(path);
  if (!in)
    throw ConfigError("csv: cannot read '" + path + "'");
  std::ostringstream ss;
  ss << in.rdbuf();
  return parse_csv(ss.str());
}

} // namespace mdfn
