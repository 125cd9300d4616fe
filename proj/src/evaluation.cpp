#include "dentseg/evaluation.hpp"

#include <cstdio>
#include <fstream>
#include <numeric>
#include <sstream>
#include <stdexcept>

namespace dentseg {
namespace {

std::vector<std::string> split(const std::string& line, char sep) {
  std::vector<std::string> out;
  std::string cell;
  std::istringstream in(line);
  while (std::getline(in, cell, sep)) {
    const auto b = cell.find_first_not_of(" \t\r");
    const auto e = cell.find_last_not_of(" \t\r");
    out.push_back(b == std::string::npos ? "" : cell.substr(b, e - b + 1));
  }
  return out;
}

std::int64_t parse_count(const std::string& cell, std::size_t line_no) {
  std::size_t used = 0;
  long long v = 0;
  try {
    v = std::stoll(cell, &used);
  } catch (const std::exception&) {
    used = 0;
  }
  if (used != cell.size() || cell.empty() || v < 0) {
    throw std::invalid_argument("line " + std::to_string(line_no) + ": expected a non-negative count, got '" +
                                cell + "'");
  }
  return v;
}

std::int64_t sum_f_squared(const std::vector<std::int64_t>& f) {
  std::int64_t total = 0;
  for (std::int64_t x : f) total += x * x;
  return total;
}

Fraction weighted(const EvalMatrix& m, auto&& cell_for_column) {
  const auto f = film_totals(m);
  const std::int64_t den = sum_f_squared(f);
  if (den == 0) throw std::domain_error("evaluation matrix is empty (no films counted)");
  std::int64_t num = 0;
  for (std::size_t i = 1; i <= m.n_max(); ++i) num += cell_for_column(i) * f[i - 1];
  return {num, den};
}

std::string ordinal(std::size_t n) {
  const char* suffix = "th";
  if (n % 100 < 11 || n % 100 > 13) {
    if (n % 10 == 1) suffix = "st";
    if (n % 10 == 2) suffix = "nd";
    if (n % 10 == 3) suffix = "rd";
  }
  return std::to_string(n) + suffix;
}

}  // namespace

EvalMatrix::EvalMatrix(std::size_t n_max) : n_max_(n_max), cells_((n_max + 1) * (n_max + 1), 0) {
  if (n_max < 1) throw std::invalid_argument("evaluation matrix needs N >= 1");
}

std::int64_t EvalMatrix::at(std::size_t j, std::size_t i) const {
  if (j > n_max_ || i < 1 || i > n_max_) throw std::out_of_range("evaluation matrix index out of range");
  return cells_[j * (n_max_ + 1) + i];
}

void EvalMatrix::add(std::size_t j, std::size_t i, std::int64_t count) {
  if (i < 1 || i > n_max_) {
    throw std::out_of_range("tooth count " + std::to_string(i) + " outside 1.." + std::to_string(n_max_));
  }
  if (j > i) {
    if (count != 0) {
      throw std::invalid_argument("cell p[" + std::to_string(j) + "][" + std::to_string(i) +
                                  "] must be zero: segmented count exceeds tooth count");
    }
    return;
  }
  if (count < 0) throw std::invalid_argument("counts must be non-negative");
  cells_[j * (n_max_ + 1) + i] += count;
}

EvalMatrix& EvalMatrix::operator+=(const EvalMatrix& other) {
  if (other.n_max_ != n_max_) throw std::invalid_argument("cannot merge matrices of different N");
  for (std::size_t k = 0; k < cells_.size(); ++k) cells_[k] += other.cells_[k];
  return *this;
}

std::vector<std::int64_t> film_totals(const EvalMatrix& m) {
  std::vector<std::int64_t> f(m.n_max(), 0);
  for (std::size_t i = 1; i <= m.n_max(); ++i) {
    for (std::size_t j = 0; j <= i; ++j) f[i - 1] += m.at(j, i);
  }
  return f;
}

Fraction optimality_fraction(const EvalMatrix& m) {
  return weighted(m, [&](std::size_t i) { return m.at(i, i); });
}

Fraction failure_fraction(const EvalMatrix& m) {
  return weighted(m, [&](std::size_t i) { return m.at(0, i); });
}

Fraction sub_optimality_fraction(const EvalMatrix& m, std::size_t order) {
  if (order < 1 || order + 1 > m.n_max()) {
    throw std::out_of_range("sub-optimality order " + std::to_string(order) + " outside 1.." +
                            std::to_string(m.n_max() - 1));
  }
  // Column i + order, row i: films missing exactly `order` teeth.
  return weighted(m, [&](std::size_t col) -> std::int64_t { return col > order ? m.at(col - order, col) : 0; });
}

double optimality(const EvalMatrix& m) { return optimality_fraction(m).percent(); }
double failure(const EvalMatrix& m) { return failure_fraction(m).percent(); }
double sub_optimality(const EvalMatrix& m, std::size_t order) { return sub_optimality_fraction(m, order).percent(); }

EvalReport make_report(const EvalMatrix& m, const std::optional<std::vector<std::int64_t>>& declared_totals) {
  EvalReport r;
  r.n_max = m.n_max();
  r.film_totals = film_totals(m);
  if (declared_totals && *declared_totals != r.film_totals) {
    throw std::invalid_argument("declared film totals do not match the matrix column sums");
  }
  r.sum_f_squared = sum_f_squared(r.film_totals);

  const Fraction opt = optimality_fraction(m);
  const Fraction fail = failure_fraction(m);
  std::int64_t mass = opt.numerator + fail.numerator;
  r.optimality = opt.percent();
  r.failure = fail.percent();
  for (std::size_t order = 1; order < m.n_max(); ++order) {
    const Fraction sub = sub_optimality_fraction(m, order);
    mass += sub.numerator;
    r.sub_optimality.push_back(sub.percent());
  }
  r.partition_ok = mass == r.sum_f_squared;
  return r;
}

EvalMatrix accumulate(const std::vector<std::pair<std::size_t, std::size_t>>& results, std::size_t n_max) {
  EvalMatrix m(n_max);
  for (auto [ok, total] : results) {
    if (total < 1 || total > n_max || ok > total) {
      throw std::out_of_range("result (" + std::to_string(ok) + ", " + std::to_string(total) +
                              ") violates 0 <= segmented <= teeth <= " + std::to_string(n_max));
    }
    m.add(ok, total);
  }
  return m;
}

EvalCsv parse_eval_csv(const std::string& text) {
  std::istringstream in(text);
  std::string line;
  std::vector<std::pair<std::size_t, std::vector<std::string>>> rows;
  std::size_t line_no = 0;
  while (std::getline(in, line)) {
    ++line_no;
    if (line.find_first_not_of(" \t\r") == std::string::npos || line[0] == '#') continue;
    rows.emplace_back(line_no, split(line, ','));
  }
  if (rows.empty()) throw std::invalid_argument("empty evaluation CSV");

  const auto& header = rows.front().second;
  const std::size_t n = header.size() - 1;
  if (n < 1) throw std::invalid_argument("CSV header must list tooth counts 1..N");
  for (std::size_t i = 1; i <= n; ++i) {
    if (header[i] != std::to_string(i)) {
      throw std::invalid_argument("CSV header column " + std::to_string(i) + " must be '" + std::to_string(i) + "'");
    }
  }

  EvalCsv out{EvalMatrix(n), std::nullopt};
  std::vector<bool> seen(n + 1, false);
  for (std::size_t r = 1; r < rows.size(); ++r) {
    const auto& [no, cells] = rows[r];
    if (cells.size() != n + 1) {
      throw std::invalid_argument("line " + std::to_string(no) + ": expected " + std::to_string(n + 1) + " cells");
    }
    if (cells[0] == "F") {
      std::vector<std::int64_t> totals;
      for (std::size_t i = 1; i <= n; ++i) totals.push_back(parse_count(cells[i], no));
      out.declared_totals = std::move(totals);
      continue;
    }
    const auto j = static_cast<std::size_t>(parse_count(cells[0], no));
    if (j > n) throw std::invalid_argument("line " + std::to_string(no) + ": row index beyond N");
    if (seen[j]) throw std::invalid_argument("line " + std::to_string(no) + ": duplicate row " + std::to_string(j));
    seen[j] = true;
    for (std::size_t i = 1; i <= n; ++i) out.matrix.add(j, i, parse_count(cells[i], no));
  }
  return out;
}

EvalCsv load_eval_csv(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) throw std::runtime_error("cannot open " + path.string());
  std::ostringstream buf;
  buf << in.rdbuf();
  return parse_eval_csv(buf.str());
}

std::string to_csv(const EvalMatrix& m) {
  std::ostringstream out;
  out << "j\\i";
  for (std::size_t i = 1; i <= m.n_max(); ++i) out << ',' << i;
  out << '\n';
  for (std::size_t j = 0; j <= m.n_max(); ++j) {
    out << j;
    for (std::size_t i = 1; i <= m.n_max(); ++i) out << ',' << (j > i ? 0 : m.at(j, i));
    out << '\n';
  }
  out << 'F';
  for (std::int64_t f : film_totals(m)) out << ',' << f;
  out << '\n';
  return out.str();
}

std::string format_report_table(const EvalReport& r) {
  std::vector<std::string> names{"Opt"};
  std::vector<double> values{r.optimality};
  for (std::size_t k = 0; k < r.sub_optimality.size(); ++k) {
    names.push_back(ordinal(k + 1));
    values.push_back(r.sub_optimality[k]);
  }
  names.push_back("Fail");
  values.push_back(r.failure);

  std::string head, body;
  char cell[32];
  for (std::size_t k = 0; k < names.size(); ++k) {
    std::snprintf(cell, sizeof cell, "%8s", names[k].c_str());
    head += cell;
    std::snprintf(cell, sizeof cell, "%8.2f", values[k]);
    body += cell;
  }
  return head + "\n" + body + "\n";
}

}  // namespace dentseg
