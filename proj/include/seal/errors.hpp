#pragma once

#include <stdexcept>
#include <string>
#include <utility>
#include <vector>

namespace seal {

// One violated condition. `row`/`col` are -1 when not applicable.
struct ValidationIssue {
  std::string code;
  int row = -1;
  int col = -1;
  std::string message;
};

// Thrown when an input fails its contract (bad tree, bad probability vector,
// bad config). The CLI maps this to exit code 2 and a JSON report on stderr.
class ValidationError : public std::runtime_error {
 public:
  explicit ValidationError(const std::string& what,
                           std::vector<ValidationIssue> issues = {})
      : std::runtime_error(what), issues_(std::move(issues)) {}

  const std::vector<ValidationIssue>& issues() const { return issues_; }

 private:
  std::vector<ValidationIssue> issues_;
};

// CSV ingestion failure with position info. line/column are 1-based and -1
// when unknown; `code` is one of io_failure, empty_file, missing_label_column,
// non_numeric_feature, bad_row.
class CsvError : public std::runtime_error {
 public:
  CsvError(std::string code, const std::string& what, int line = -1,
           int column = -1)
      : std::runtime_error(what), code_(std::move(code)), line_(line),
        column_(column) {}

  const std::string& code() const { return code_; }
  int line() const { return line_; }
  int column() const { return column_; }

 private:
  std::string code_;
  int line_;
  int column_;
};

}  // namespace seal
