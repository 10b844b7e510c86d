#pragma once

#include <array>
#include <cstdint>
#include <string>
#include <vector>

#include "nliaudit/corpus.hpp"
#include "nliaudit/protorole.hpp"

namespace nliaudit {

// Regularized incomplete gamma functions, P(a,x) + Q(a,x) = 1. Series
// expansion below x < a+1, continued fraction above; absolute error target
// 1e-12 over the chi-square domain used here. No external numerics: the
// p-values in every report come from these two functions.
double regularized_gamma_p(double a, double x);
double regularized_gamma_q(double a, double x);

// Upper-tail probability of the chi-square distribution, Q(df/2, x/2).
// Monotone non-increasing in x; sf(0, df) == 1 exactly.
double chi_square_sf(double x, int df);
double chi_square_cdf(double x, int df);

// Human-readable p-value: fixed 4 significant digits, or "< 1e-15" below
// that floor (raw float is preserved separately in machine output).
std::string format_p_value(double p);

// Role-by-label observed counts. Rows are a subset of the role inventory in
// inventory order (the full table built from a tagged split is strictly
// 16x2); UNMATCHED records are excluded by construction.
struct ContingencyTable {
  std::vector<ProtoRole> rows;
  std::array<Label, kLabelCount> cols{Label::kEntailed, Label::kNotEntailed};
  std::vector<std::array<std::int64_t, kLabelCount>> observed;
  std::vector<std::int64_t> row_totals;
  std::array<std::int64_t, kLabelCount> col_totals{};
  std::int64_t grand_total = 0;

  // Computes marginals from the observed cells; rejects negative counts.
  static ContingencyTable from_counts(
      std::vector<ProtoRole> rows,
      std::vector<std::array<std::int64_t, kLabelCount>> observed);
};

// Full 16x2 table over matched records. DataError when fewer than two roles
// have a matched record (the independence test is undefined).
ContingencyTable build_contingency(const TaggedSplit& tagged);

struct ChiSquareResult {
  double statistic = 0.0;
  int df = 0;
  double p_value = 1.0;
  // The table actually tested, after zero-marginal rows/columns are dropped.
  std::vector<ProtoRole> rows;
  std::vector<Label> cols;
  std::vector<std::vector<double>> expected;  // rows.size() x cols.size()
  // Dropped slices are reported, never silently smoothed.
  std::vector<ProtoRole> dropped_rows;
  std::vector<Label> dropped_cols;
};

// Pearson chi-square test of independence: statistic = sum (O-E)^2/E with
// E[i][j] = rowTotal_i * colTotal_j / grandTotal, df = (rows-1)*(cols-1)
// after zero-marginal drops, p = upper-tail probability. NumericError when
// the table degenerates (all zero, or fewer than 2 rows/columns remain).
ChiSquareResult chi_square(const ContingencyTable& table);

}  // namespace nliaudit
