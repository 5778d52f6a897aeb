#pragma once

#include <string>
#include <vector>

namespace tdreg {

inline constexpr double kReturnFloor = -1e3;
inline constexpr double kMstdeCap = 3e5;

struct RunRow {
  int trial = 0;
  long long step = 0;
  double expected_return = 0.0;
  double mstde_est = 0.0;
  double mstde_true = 0.0;
  double eta = 0.0;
  bool diverged = false;

  bool operator==(const RunRow&) const = default;
};

/// Applies the reporting bounds: return >= -1e3, MSTDE <= 3e5. NaN stays NaN.
RunRow clamp_row(RunRow row);

std::string format_double(double x);
double parse_double(const std::string& text);

inline constexpr const char* kRunHeader = "trial,step,return,mstde_est,mstde_true,eta,diverged";

/// Rows are written as given; callers clamp first.
std::string rows_to_csv(const std::vector<RunRow>& rows);
std::vector<RunRow> rows_from_csv(const std::string& text);
void write_rows(const std::vector<RunRow>& rows, const std::string& path);
std::vector<RunRow> read_rows(const std::string& path);

struct AggregateRow {
  long long step = 0;
  int n = 0;
  double return_mean = 0.0;
  double return_ci = 0.0;
  double mstde_est_mean = 0.0;
  double mstde_est_ci = 0.0;
  double mstde_true_mean = 0.0;
  double mstde_true_ci = 0.0;
  int diverged = 0;
};

/// Per-step mean and 1.96 sigma / sqrt(n) half-width across trials (sample
/// std; 0 when n == 1). NaN entries are skipped per column.
std::vector<AggregateRow> aggregate(const std::vector<RunRow>& rows);
std::string aggregate_to_csv(const std::vector<AggregateRow>& rows);

/// Mean and CI half-width of one sample.
std::pair<double, double> mean_ci(const std::vector<double>& xs);

}  // namespace tdreg
