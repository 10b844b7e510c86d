#include "nliaudit/stats.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <limits>

#include "nliaudit/errors.hpp"

namespace nliaudit {

namespace {

constexpr int kMaxIterations = 1000;
constexpr double kEps = std::numeric_limits<double>::epsilon();
constexpr double kTiny = std::numeric_limits<double>::min() / kEps;

// Lower regularized gamma by power series: P(a,x) = x^a e^-x / Gamma(a) *
// sum x^n / (a(a+1)...(a+n)). Converges fast for x < a+1.
double gamma_p_series(double a, double x) {
  double ap = a;
  double term = 1.0 / a;
  double sum = term;
  for (int n = 0; n < kMaxIterations; ++n) {
    ap += 1.0;
    term *= x / ap;
    sum += term;
    if (std::fabs(term) < std::fabs(sum) * kEps)
      return sum * std::exp(-x + a * std::log(x) - std::lgamma(a));
  }
  throw NumericError("stats", "gamma series failed to converge");
}

// Upper regularized gamma by Lentz continued fraction; reliable for x >= a+1.
double gamma_q_fraction(double a, double x) {
  double b = x + 1.0 - a;
  double c = 1.0 / kTiny;
  double d = 1.0 / b;
  double h = d;
  for (int i = 1; i <= kMaxIterations; ++i) {
    double an = -i * (i - a);
    b += 2.0;
    d = an * d + b;
    if (std::fabs(d) < kTiny) d = kTiny;
    c = b + an / c;
    if (std::fabs(c) < kTiny) c = kTiny;
    d = 1.0 / d;
    double delta = d * c;
    h *= delta;
    if (std::fabs(delta - 1.0) <= kEps)
      return std::exp(-x + a * std::log(x) - std::lgamma(a)) * h;
  }
  throw NumericError("stats", "gamma continued fraction failed to converge");
}

void check_gamma_domain(double a, double x) {
  if (!(a > 0.0))
    throw NumericError("stats", "gamma shape must be positive");
  if (!std::isfinite(x) || x < 0.0)
    throw NumericError("stats", "gamma argument must be finite and non-negative");
}

}  // namespace

double regularized_gamma_p(double a, double x) {
  check_gamma_domain(a, x);
  if (x == 0.0) return 0.0;
  if (x < a + 1.0) return gamma_p_series(a, x);
  return 1.0 - gamma_q_fraction(a, x);
}

double regularized_gamma_q(double a, double x) {
  check_gamma_domain(a, x);
  if (x == 0.0) return 1.0;
  if (x < a + 1.0) return 1.0 - gamma_p_series(a, x);
  return gamma_q_fraction(a, x);
}

double chi_square_sf(double x, int df) {
  if (df < 1)
    throw NumericError("stats", "degrees of freedom must be >= 1");
  return regularized_gamma_q(0.5 * df, 0.5 * x);
}

double chi_square_cdf(double x, int df) {
  if (df < 1)
    throw NumericError("stats", "degrees of freedom must be >= 1");
  return regularized_gamma_p(0.5 * df, 0.5 * x);
}

std::string format_p_value(double p) {
  if (p < 1e-15) return "< 1e-15";
  char buf[32];
  std::snprintf(buf, sizeof(buf), "%.4g", p);
  return buf;
}

ContingencyTable ContingencyTable::from_counts(
    std::vector<ProtoRole> rows,
    std::vector<std::array<std::int64_t, kLabelCount>> observed) {
  if (rows.size() != observed.size())
    throw NumericError("stats", "row labels and observed counts differ in length");
  ContingencyTable t;
  t.rows = std::move(rows);
  t.observed = std::move(observed);
  t.row_totals.resize(t.rows.size(), 0);
  for (std::size_t i = 0; i < t.observed.size(); ++i) {
    for (std::size_t j = 0; j < kLabelCount; ++j) {
      std::int64_t o = t.observed[i][j];
      if (o < 0)
        throw NumericError("stats", "negative cell count");
      t.row_totals[i] += o;
      t.col_totals[j] += o;
      t.grand_total += o;
    }
  }
  return t;
}

ContingencyTable build_contingency(const TaggedSplit& tagged) {
  std::vector<std::array<std::int64_t, kLabelCount>> observed(
      kProtoRoleCount, std::array<std::int64_t, kLabelCount>{0, 0});
  for (std::size_t i = 0; i < tagged.size(); ++i) {
    if (!tagged.tags[i]) continue;
    ++observed[role_index(*tagged.tags[i])][label_index(tagged.labels[i])];
  }

  int non_empty = 0;
  for (const auto& row : observed)
    if (row[0] + row[1] > 0) ++non_empty;
  if (non_empty < 2)
    throw DataError("stats", "fewer than two non-empty roles; independence test undefined");

  std::vector<ProtoRole> rows(all_proto_roles().begin(), all_proto_roles().end());
  return ContingencyTable::from_counts(std::move(rows), std::move(observed));
}

ChiSquareResult chi_square(const ContingencyTable& table) {
  if (table.grand_total <= 0)
    throw NumericError("stats", "all-zero contingency table");

  ChiSquareResult result;
  std::vector<std::size_t> keep_rows, keep_cols;
  for (std::size_t i = 0; i < table.rows.size(); ++i) {
    if (table.row_totals[i] > 0)
      keep_rows.push_back(i);
    else
      result.dropped_rows.push_back(table.rows[i]);
  }
  for (std::size_t j = 0; j < kLabelCount; ++j) {
    if (table.col_totals[j] > 0)
      keep_cols.push_back(j);
    else
      result.dropped_cols.push_back(table.cols[j]);
  }
  if (keep_rows.size() < 2 || keep_cols.size() < 2)
    throw NumericError("stats",
                       "contingency table degenerates to fewer than 2x2 after "
                       "dropping zero marginals");

  for (std::size_t i : keep_rows) result.rows.push_back(table.rows[i]);
  for (std::size_t j : keep_cols) result.cols.push_back(table.cols[j]);

  const double grand = static_cast<double>(table.grand_total);
  result.expected.resize(keep_rows.size(), std::vector<double>(keep_cols.size()));
  double statistic = 0.0;
  for (std::size_t i = 0; i < keep_rows.size(); ++i) {
    for (std::size_t j = 0; j < keep_cols.size(); ++j) {
      double expected = static_cast<double>(table.row_totals[keep_rows[i]]) *
                        static_cast<double>(table.col_totals[keep_cols[j]]) / grand;
      result.expected[i][j] = expected;
      double diff = static_cast<double>(table.observed[keep_rows[i]][keep_cols[j]]) - expected;
      statistic += diff * diff / expected;
    }
  }

  result.statistic = statistic;
  result.df = static_cast<int>((keep_rows.size() - 1) * (keep_cols.size() - 1));
  result.p_value = chi_square_sf(statistic, result.df);
  return result;
}

}  // namespace nliaudit
