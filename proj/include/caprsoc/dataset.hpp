#pragma once

// CSV ingestion and the dummy/interaction encoding used for the regression
// benchmarks. Column types are declared up front; nothing is inferred.

#include <Eigen/Core>
#include <iosfwd>
#include <optional>
#include <string>
#include <string_view>
#include <utility>
#include <vector>

namespace caprsoc {

struct RawTable {
  std::vector<std::string> header;
  std::vector<std::vector<std::string>> rows;
};

/// RFC 4180: comma separated, optional double quotes, "" escapes a quote,
/// quoted fields may span lines; CRLF or LF. A header row is required.
RawTable read_csv(std::istream& in);
RawTable read_csv_file(const std::string& path);

enum class ColumnType { Numeric, Categorical, Id, Response };

std::string_view to_string(ColumnType t) noexcept;

using Schema = std::vector<std::pair<std::string, ColumnType>>;

/// "name:type" entries separated by commas or newlines; type is one of
/// numeric, categorical, id, response. Blank entries and '#' lines are skipped.
Schema parse_schema(std::string_view text);

struct EncodingReport {
  struct Dummy {
    std::string source;
    std::string level;
    std::string column;
  };
  struct Interaction {
    std::string dummy;
    std::string numeric;
    std::string column;
  };
  std::vector<std::string> dropped_ids;
  std::vector<std::string> numeric;
  std::vector<Dummy> dummies;
  std::vector<Interaction> interactions;
  std::optional<std::string> response;
  std::size_t rows = 0;

  std::string to_json() const;
};

struct EncodedDataset {
  std::vector<std::string> columns;
  Eigen::MatrixXd matrix;
  std::optional<Eigen::VectorXd> response;
  EncodingReport report;
};

/// Drops id columns, keeps numeric columns in their original order, adds one
/// 0/1 column per categorical level (levels sorted), then one column per
/// (dummy, numeric) pair, sorted by name.
EncodedDataset encode_dataset(const RawTable& raw, const Schema& schema);

}  // namespace caprsoc
