#include "caprsoc/dataset.hpp"

#include <algorithm>
#include <charconv>
#include <fstream>
#include <istream>
#include <cmath>
#include <map>
#include <nlohmann/json.hpp>
#include <set>

#include "caprsoc/error.hpp"

namespace caprsoc {
namespace {

std::string trim(std::string_view s) {
  const auto b = s.find_first_not_of(" \t\r\n");
  if (b == std::string_view::npos) return {};
  const auto e = s.find_last_not_of(" \t\r\n");
  return std::string(s.substr(b, e - b + 1));
}

double parse_number(const std::string& cell, std::size_t row, const std::string& col) {
  const std::string s = trim(cell);
  double v = 0.0;
  const auto [ptr, ec] = std::from_chars(s.data(), s.data() + s.size(), v);
  if (s.empty() || ec != std::errc() || ptr != s.data() + s.size() || !std::isfinite(v))
    fail(ErrorCode::Parse, "row " + std::to_string(row + 1) + ", column '" + col + "': '" + cell + "' is not a number");
  return v;
}

}  // namespace

RawTable read_csv(std::istream& in) {
  std::vector<std::vector<std::string>> records;
  std::vector<std::string> rec;
  std::string field;
  bool quoted = false;
  bool field_started = false;
  bool any = false;
  char c = 0;
  auto end_field = [&] {
    rec.push_back(std::move(field));
    field.clear();
    field_started = false;
  };
  auto end_record = [&] {
    end_field();
    if (!(rec.size() == 1 && rec[0].empty())) records.push_back(std::move(rec));
    rec.clear();
  };
  while (in.get(c)) {
    any = true;
    if (quoted) {
      if (c == '"') {
        if (in.peek() == '"') {
          in.get(c);
          field.push_back('"');
        } else {
          quoted = false;
        }
      } else {
        field.push_back(c);
      }
      continue;
    }
    if (c == '"' && !field_started) {
      quoted = true;
      field_started = true;
    } else if (c == ',') {
      end_field();
    } else if (c == '\r') {
      if (in.peek() == '\n') in.get(c);
      end_record();
    } else if (c == '\n') {
      end_record();
    } else {
      field.push_back(c);
      field_started = true;
    }
  }
  if (quoted) fail(ErrorCode::Parse, "unterminated quoted field");
  if (any && (field_started || !rec.empty())) end_record();
  if (records.empty()) fail(ErrorCode::Parse, "CSV input has no header row");

  RawTable t;
  t.header = std::move(records.front());
  for (auto& h : t.header) h = trim(h);
  for (std::size_t i = 1; i < records.size(); ++i) {
    if (records[i].size() != t.header.size())
      fail(ErrorCode::Parse, "row " + std::to_string(i) + " has " + std::to_string(records[i].size()) +
                                 " fields, header has " + std::to_string(t.header.size()));
    t.rows.push_back(std::move(records[i]));
  }
  return t;
}

RawTable read_csv_file(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) fail(ErrorCode::Io, "cannot open '" + path + "'");
  return read_csv(in);
}

std::string_view to_string(ColumnType t) noexcept {
  switch (t) {
    case ColumnType::Numeric: return "numeric";
    case ColumnType::Categorical: return "categorical";
    case ColumnType::Id: return "id";
    case ColumnType::Response: return "response";
  }
  return "unknown";
}

Schema parse_schema(std::string_view text) {
  static const std::map<std::string, ColumnType, std::less<>> kinds = {{"numeric", ColumnType::Numeric},
                                                                       {"categorical", ColumnType::Categorical},
                                                                       {"id", ColumnType::Id},
                                                                       {"response", ColumnType::Response}};
  Schema out;
  std::size_t pos = 0;
  while (pos <= text.size()) {
    const std::size_t next = text.find_first_of(",\n", pos);
    const std::string item = trim(text.substr(pos, next == std::string_view::npos ? text.npos : next - pos));
    pos = next == std::string_view::npos ? text.size() + 1 : next + 1;
    if (item.empty() || item.front() == '#') continue;
    const auto colon = item.rfind(':');
    if (colon == std::string::npos) fail(ErrorCode::Parse, "schema entry '" + item + "' lacks ':type'");
    const std::string name = trim(item.substr(0, colon));
    const std::string kind = trim(item.substr(colon + 1));
    const auto it = kinds.find(kind);
    if (it == kinds.end()) fail(ErrorCode::Parse, "unknown column type '" + kind + "'");
    if (name.empty()) fail(ErrorCode::Parse, "schema entry with empty column name");
    if (std::any_of(out.begin(), out.end(), [&](const auto& e) { return e.first == name; }))
      fail(ErrorCode::Parse, "column '" + name + "' declared twice");
    out.emplace_back(name, it->second);
  }
  if (std::count_if(out.begin(), out.end(), [](const auto& e) { return e.second == ColumnType::Response; }) > 1)
    fail(ErrorCode::Parse, "at most one response column");
  return out;
}

std::string EncodingReport::to_json() const {
  nlohmann::ordered_json j;
  j["rows"] = rows;
  j["dropped_ids"] = dropped_ids;
  j["numeric"] = numeric;
  j["response"] = response ? nlohmann::ordered_json(*response) : nlohmann::ordered_json(nullptr);
  j["dummies"] = nlohmann::ordered_json::array();
  for (const auto& d : dummies) j["dummies"].push_back({{"column", d.column}, {"source", d.source}, {"level", d.level}});
  j["interactions"] = nlohmann::ordered_json::array();
  for (const auto& i : interactions)
    j["interactions"].push_back({{"column", i.column}, {"dummy", i.dummy}, {"numeric", i.numeric}});
  return j.dump(2) + "\n";
}

EncodedDataset encode_dataset(const RawTable& raw, const Schema& schema) {
  if (raw.rows.empty()) fail(ErrorCode::InvalidArgument, "table has no rows");
  std::map<std::string, std::size_t> index;
  for (std::size_t c = 0; c < raw.header.size(); ++c) index[raw.header[c]] = c;
  std::map<std::string, ColumnType> declared;
  for (const auto& [name, kind] : schema) {
    if (!index.count(name)) fail(ErrorCode::InvalidArgument, "schema column '" + name + "' not in the table");
    declared[name] = kind;
  }
  for (const auto& h : raw.header)
    if (!declared.count(h)) fail(ErrorCode::InvalidArgument, "column '" + h + "' has no declared type");

  EncodedDataset out;
  EncodingReport& rep = out.report;
  rep.rows = raw.rows.size();
  const auto nrows = static_cast<Eigen::Index>(raw.rows.size());

  std::vector<std::pair<std::string, Eigen::VectorXd>> numeric;
  std::vector<std::pair<std::string, Eigen::VectorXd>> dummies;
  for (const auto& name : raw.header) {
    const std::size_t c = index[name];
    switch (declared[name]) {
      case ColumnType::Id:
        rep.dropped_ids.push_back(name);
        break;
      case ColumnType::Numeric:
      case ColumnType::Response: {
        Eigen::VectorXd v(nrows);
        for (Eigen::Index r = 0; r < nrows; ++r) v[r] = parse_number(raw.rows[r][c], r, name);
        if (declared[name] == ColumnType::Response) {
          out.response = std::move(v);
          rep.response = name;
        } else {
          rep.numeric.push_back(name);
          numeric.emplace_back(name, std::move(v));
        }
        break;
      }
      case ColumnType::Categorical: {
        std::set<std::string> levels;
        for (const auto& row : raw.rows) levels.insert(row[c]);
        for (const auto& level : levels) {
          Eigen::VectorXd v(nrows);
          for (Eigen::Index r = 0; r < nrows; ++r) v[r] = raw.rows[r][c] == level ? 1.0 : 0.0;
          const std::string col = name + "=" + level;
          rep.dummies.push_back({name, level, col});
          dummies.emplace_back(col, std::move(v));
        }
        break;
      }
    }
  }
  if (numeric.empty() && dummies.empty()) fail(ErrorCode::InvalidArgument, "no feature columns after dropping ids");

  std::vector<std::pair<std::string, Eigen::VectorXd>> inter;
  for (const auto& [dn, dv] : dummies) {
    for (const auto& [nn, nv] : numeric) {
      const std::string col = dn + "*" + nn;
      rep.interactions.push_back({dn, nn, col});
      inter.emplace_back(col, dv.cwiseProduct(nv));
    }
  }
  std::sort(rep.interactions.begin(), rep.interactions.end(),
            [](const auto& a, const auto& b) { return a.column < b.column; });
  std::sort(inter.begin(), inter.end(), [](const auto& a, const auto& b) { return a.first < b.first; });

  const auto ncols = static_cast<Eigen::Index>(numeric.size() + dummies.size() + inter.size());
  out.matrix.resize(nrows, ncols);
  Eigen::Index k = 0;
  for (auto* group : {&numeric, &dummies, &inter}) {
    for (auto& [name, v] : *group) {
      out.columns.push_back(name);
      out.matrix.col(k++) = v;
    }
  }
  return out;
}

}  // namespace caprsoc
