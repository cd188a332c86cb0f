#include "treevote/csv.hpp"

#include <charconv>
#include <cmath>
#include <iterator>
#include <map>
#include <sstream>

#include "treevote/errors.hpp"

namespace treevote {

std::vector<std::vector<std::string>> parse_csv(std::string_view text) {
  std::vector<std::vector<std::string>> records;
  std::vector<std::string> record;
  std::string field;
  bool in_quotes = false;
  bool field_started = false;  // distinguishes an empty line from a record of one empty field

  auto end_record = [&] {
    if (field_started || !record.empty()) {
      record.push_back(std::move(field));
      records.push_back(std::move(record));
    }
    record.clear();
    field.clear();
    field_started = false;
  };

  for (std::size_t i = 0; i < text.size(); ++i) {
    const char ch = text[i];
    if (in_quotes) {
      if (ch == '"') {
        if (i + 1 < text.size() && text[i + 1] == '"') {
          field.push_back('"');
          ++i;
        } else {
          in_quotes = false;
        }
      } else {
        field.push_back(ch);
      }
      continue;
    }
    switch (ch) {
      case '"':
        in_quotes = true;
        field_started = true;
        break;
      case ',':
        record.push_back(std::move(field));
        field.clear();
        field_started = true;
        break;
      case '\r':
        if (i + 1 < text.size() && text[i + 1] == '\n') ++i;
        end_record();
        break;
      case '\n':
        end_record();
        break;
      default:
        field.push_back(ch);
        field_started = true;
    }
  }
  if (in_quotes) fail(ErrorCode::DataLoad, "csv: unterminated quoted field");
  end_record();
  return records;
}

namespace {

std::optional<double> parse_number(const std::string& text) {
  const char* first = text.data();
  const char* last = text.data() + text.size();
  while (first < last && (*first == ' ' || *first == '\t')) ++first;
  while (last > first && (last[-1] == ' ' || last[-1] == '\t')) --last;
  if (first < last && *first == '+') ++first;
  double value = 0.0;
  const auto [ptr, ec] = std::from_chars(first, last, value);
  if (ec != std::errc() || ptr != last || first == last || !std::isfinite(value)) return std::nullopt;
  return value;
}

}  // namespace

Dataset load_csv_text(std::string_view text, const Schema& schema) {
  const auto records = parse_csv(text);
  if (records.empty()) fail(ErrorCode::DataLoad, "csv: missing header row");
  const auto& header = records.front();
  const auto& cols = schema.columns();

  std::map<std::string, std::size_t> position;
  for (std::size_t i = 0; i < header.size(); ++i) {
    if (!schema.index_of(header[i])) fail(ErrorCode::DataLoad, "csv header: column '" + header[i] + "' is not in the schema");
    if (!position.emplace(header[i], i).second) fail(ErrorCode::DataLoad, "csv header: duplicate column '" + header[i] + "'");
  }
  for (const auto& c : cols) {
    if (!position.count(c.name)) fail(ErrorCode::DataLoad, "csv header: missing column '" + c.name + "'");
  }
  if (records.size() == 1) fail(ErrorCode::DataLoad, "csv: empty body");

  std::vector<Record> rows;
  rows.reserve(records.size() - 1);
  for (std::size_t r = 1; r < records.size(); ++r) {
    const auto& rec = records[r];
    const std::string where = "row " + std::to_string(r);
    if (rec.size() != header.size()) {
      fail(ErrorCode::DataLoad, where + ": expected " + std::to_string(header.size()) + " fields, got " +
                                    std::to_string(rec.size()));
    }
    Record row;
    row.reserve(cols.size());
    for (std::size_t c = 0; c < cols.size(); ++c) {
      const std::string& raw = rec[position.at(cols[c].name)];
      if (cols[c].kind == ColumnKind::Numeric) {
        const auto v = parse_number(raw);
        if (!v) {
          fail(ErrorCode::DataLoad, where + ", column '" + cols[c].name + "': cannot parse number '" + raw + "'");
        }
        row.emplace_back(*v);
      } else if (c == schema.target_index()) {
        if (raw.empty()) fail(ErrorCode::DataLoad, where + ", column '" + cols[c].name + "': missing target value");
        if (!schema.class_index(raw)) {
          fail(ErrorCode::DataLoad, where + ", column '" + cols[c].name + "': unknown target label '" + raw + "'");
        }
        row.emplace_back(raw);
      } else {
        row.emplace_back(raw.empty() ? std::string(kMissingToken) : raw);
      }
    }
    rows.push_back(std::move(row));
  }
  return Dataset(schema, rows);
}

Dataset load_csv(std::istream& in, const Schema& schema) {
  const std::string text{std::istreambuf_iterator<char>(in), std::istreambuf_iterator<char>()};
  return load_csv_text(text, schema);
}

std::string format_number(double value) {
  char buf[64];
  const auto [ptr, ec] = std::to_chars(buf, buf + sizeof buf, value, std::chars_format::fixed, 6);
  if (ec != std::errc()) fail(ErrorCode::InvalidArgument, "format_number: value out of range");
  std::string s(buf, ptr);
  while (!s.empty() && s.back() == '0') s.pop_back();
  if (!s.empty() && s.back() == '.') s.pop_back();
  if (s == "-0") s = "0";
  return s;
}

std::string quote_csv_field(const std::string& field) {
  if (field.find_first_of(",\"\r\n") == std::string::npos) return field;
  std::string out = "\"";
  for (char ch : field) {
    if (ch == '"') out.push_back('"');
    out.push_back(ch);
  }
  out.push_back('"');
  return out;
}

void write_csv(std::ostream& out, const Dataset& data) {
  const auto& cols = data.schema().columns();
  for (std::size_t c = 0; c < cols.size(); ++c) {
    if (c) out << ',';
    out << quote_csv_field(cols[c].name);
  }
  out << '\n';
  for (std::size_t r = 0; r < data.size(); ++r) {
    for (std::size_t c = 0; c < cols.size(); ++c) {
      if (c) out << ',';
      if (cols[c].kind == ColumnKind::Numeric) {
        out << format_number(data.numbers(c)[r]);
      } else {
        const auto& token = data.tokens(c)[r];
        // Empty cells load back as the missing token.
        out << (token == kMissingToken ? std::string() : quote_csv_field(token));
      }
    }
    out << '\n';
  }
}

std::string to_csv(const Dataset& data) {
  std::ostringstream out;
  write_csv(out, data);
  return out.str();
}

}  // namespace treevote
