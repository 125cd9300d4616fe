#pragma once

#include <cstdint>
#include <filesystem>
#include <optional>
#include <string>
#include <utility>
#include <vector>

namespace dentseg {

/// p[j][i]: films with i teeth (1..N) of which j (0..i) were segmented.
class EvalMatrix {
 public:
  explicit EvalMatrix(std::size_t n_max);

  std::size_t n_max() const { return n_max_; }
  std::int64_t at(std::size_t j, std::size_t i) const;
  /// Cells with j > i are structurally zero and reject non-zero counts.
  void add(std::size_t j, std::size_t i, std::int64_t count = 1);
  EvalMatrix& operator+=(const EvalMatrix& other);

  bool operator==(const EvalMatrix&) const = default;

 private:
  std::size_t n_max_;
  std::vector<std::int64_t> cells_;  // (N+1) x (N+1), row j, column i
};

/// Exact ratio, converted to a percentage only at the boundary.
struct Fraction {
  std::int64_t numerator = 0;
  std::int64_t denominator = 1;

  double percent() const { return 100.0 * static_cast<double>(numerator) / static_cast<double>(denominator); }
};

/// F[k] = number of films with k + 1 teeth.
std::vector<std::int64_t> film_totals(const EvalMatrix& m);

Fraction optimality_fraction(const EvalMatrix& m);
Fraction failure_fraction(const EvalMatrix& m);
Fraction sub_optimality_fraction(const EvalMatrix& m, std::size_t order);

double optimality(const EvalMatrix& m);
double failure(const EvalMatrix& m);
double sub_optimality(const EvalMatrix& m, std::size_t order);

struct EvalReport {
  std::size_t n_max = 0;
  std::vector<std::int64_t> film_totals;
  std::int64_t sum_f_squared = 0;
  double optimality = 0.0;
  std::vector<double> sub_optimality;  // order 1 .. N-1
  double failure = 0.0;
  /// Exact check: the metric numerators add up to sum_f_squared.
  bool partition_ok = false;
};

/// All metrics. When `declared_totals` is given it must equal the column
/// sums of the matrix.
EvalReport make_report(const EvalMatrix& m,
                       const std::optional<std::vector<std::int64_t>>& declared_totals = std::nullopt);

/// One film per (segmented_ok, total_teeth) pair.
EvalMatrix accumulate(const std::vector<std::pair<std::size_t, std::size_t>>& results, std::size_t n_max);

struct EvalCsv {
  EvalMatrix matrix;
  std::optional<std::vector<std::int64_t>> declared_totals;
};

/// Header "j\i,1,..,N"; rows "j,p[j][1],..,p[j][N]" for j = 0..N; an optional
/// final row "F,F_1,..,F_N" declares the film totals.
EvalCsv parse_eval_csv(const std::string& text);
EvalCsv load_eval_csv(const std::filesystem::path& path);
std::string to_csv(const EvalMatrix& m);

/// Aligned text table with columns Opt, 1st, .., (N-1)th, Fail.
std::string format_report_table(const EvalReport& r);

}  // namespace dentseg
