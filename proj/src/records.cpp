#include "tdreg/records.hpp"

#include <algorithm>
#include <charconv>
#include <cmath>
#include <fstream>
#include <map>
#include <sstream>

#include "tdreg/types.hpp"

namespace tdreg {

RunRow clamp_row(RunRow row) {
  if (!std::isnan(row.expected_return)) row.expected_return = std::max(row.expected_return, kReturnFloor);
  if (!std::isnan(row.mstde_est)) row.mstde_est = std::min(row.mstde_est, kMstdeCap);
  if (!std::isnan(row.mstde_true)) row.mstde_true = std::min(row.mstde_true, kMstdeCap);
  return row;
}

std::string format_double(double x) {
  if (std::isnan(x)) return "nan";
  if (std::isinf(x)) return x > 0 ? "inf" : "-inf";
  char buf[64];
  auto res = std::to_chars(buf, buf + sizeof buf, x);
  return std::string(buf, res.ptr);
}

double parse_double(const std::string& text) {
  if (text == "nan") return std::nan("");
  if (text == "inf") return std::numeric_limits<double>::infinity();
  if (text == "-inf") return -std::numeric_limits<double>::infinity();
  double x = 0.0;
  auto res = std::from_chars(text.data(), text.data() + text.size(), x);
  if (res.ec != std::errc() || res.ptr != text.data() + text.size())
    throw DataError("bad number '" + text + "'");
  return x;
}

std::string rows_to_csv(const std::vector<RunRow>& rows) {
  std::ostringstream os;
  os << kRunHeader << '\n';
  for (const RunRow& r : rows)
    os << r.trial << ',' << r.step << ',' << format_double(r.expected_return) << ','
       << format_double(r.mstde_est) << ',' << format_double(r.mstde_true) << ','
       << format_double(r.eta) << ',' << (r.diverged ? 1 : 0) << '\n';
  return os.str();
}

namespace {

std::vector<std::string> split(const std::string& line) {
  std::vector<std::string> out;
  std::string cell;
  std::istringstream is(line);
  while (std::getline(is, cell, ',')) out.push_back(cell);
  if (!line.empty() && line.back() == ',') out.emplace_back();
  return out;
}

long long parse_int(const std::string& text) {
  long long x = 0;
  auto res = std::from_chars(text.data(), text.data() + text.size(), x);
  if (res.ec != std::errc() || res.ptr != text.data() + text.size())
    throw DataError("bad integer '" + text + "'");
  return x;
}

}  // namespace

std::vector<RunRow> rows_from_csv(const std::string& text) {
  std::istringstream is(text);
  std::string line;
  if (!std::getline(is, line) || line != kRunHeader) throw DataError("missing run header");
  std::vector<RunRow> rows;
  while (std::getline(is, line)) {
    if (line.empty()) continue;
    const auto f = split(line);
    if (f.size() != 7) throw DataError("expected 7 fields: " + line);
    RunRow r;
    r.trial = static_cast<int>(parse_int(f[0]));
    r.step = parse_int(f[1]);
    r.expected_return = parse_double(f[2]);
    r.mstde_est = parse_double(f[3]);
    r.mstde_true = parse_double(f[4]);
    r.eta = parse_double(f[5]);
    r.diverged = parse_int(f[6]) != 0;
    rows.push_back(r);
  }
  return rows;
}

void write_rows(const std::vector<RunRow>& rows, const std::string& path) {
  std::ofstream os(path, std::ios::binary);
  if (!os) throw IoError("cannot write " + path);
  os << rows_to_csv(rows);
  if (!os) throw IoError("write failed: " + path);
}

std::vector<RunRow> read_rows(const std::string& path) {
  std::ifstream is(path, std::ios::binary);
  if (!is) throw IoError("cannot read " + path);
  std::ostringstream ss;
  ss << is.rdbuf();
  return rows_from_csv(ss.str());
}

std::pair<double, double> mean_ci(const std::vector<double>& xs) {
  std::vector<double> v;
  for (double x : xs)
    if (!std::isnan(x)) v.push_back(x);
  if (v.empty()) return {std::nan(""), std::nan("")};
  double mean = 0.0;
  for (double x : v) mean += x;
  mean /= static_cast<double>(v.size());
  if (v.size() < 2) return {mean, 0.0};
  double ss = 0.0;
  for (double x : v) ss += (x - mean) * (x - mean);
  const double sd = std::sqrt(ss / static_cast<double>(v.size() - 1));
  return {mean, 1.96 * sd / std::sqrt(static_cast<double>(v.size()))};
}

std::vector<AggregateRow> aggregate(const std::vector<RunRow>& rows) {
  struct Cols {
    std::vector<double> ret, est, tru;
    int diverged = 0;
  };
  std::map<long long, Cols> by_step;
  for (const RunRow& r : rows) {
    Cols& c = by_step[r.step];
    c.ret.push_back(r.expected_return);
    c.est.push_back(r.mstde_est);
    c.tru.push_back(r.mstde_true);
    c.diverged += r.diverged ? 1 : 0;
  }
  std::vector<AggregateRow> out;
  for (const auto& [step, c] : by_step) {
    AggregateRow a;
    a.step = step;
    a.n = static_cast<int>(c.ret.size());
    std::tie(a.return_mean, a.return_ci) = mean_ci(c.ret);
    std::tie(a.mstde_est_mean, a.mstde_est_ci) = mean_ci(c.est);
    std::tie(a.mstde_true_mean, a.mstde_true_ci) = mean_ci(c.tru);
    a.diverged = c.diverged;
    out.push_back(a);
  }
  return out;
}

std::string aggregate_to_csv(const std::vector<AggregateRow>& rows) {
  std::ostringstream os;
  os << "step,n,return_mean,return_ci95,mstde_est_mean,mstde_est_ci95,mstde_true_mean,"
        "mstde_true_ci95,diverged\n";
  for (const AggregateRow& a : rows)
    os << a.step << ',' << a.n << ',' << format_double(a.return_mean) << ','
       << format_double(a.return_ci) << ',' << format_double(a.mstde_est_mean) << ','
       << format_double(a.mstde_est_ci) << ',' << format_double(a.mstde_true_mean) << ','
       << format_double(a.mstde_true_ci) << ',' << a.diverged << '\n';
  return os.str();
}

}  // namespace tdreg
