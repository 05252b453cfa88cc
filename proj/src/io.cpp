#include "retdist/io.hpp"

#include <algorithm>
#include <charconv>
#include <cmath>
#include <fstream>
#include <sstream>

#include "retdist/version.hpp"

namespace retdist {

namespace {

std::vector<std::string> split_csv_line(const std::string& line) {
  std::vector<std::string> cells;
  std::string cell;
  std::stringstream ss(line);
  while (std::getline(ss, cell, ',')) cells.push_back(cell);
  if (!line.empty() && line.back() == ',') cells.emplace_back();
  return cells;
}

std::string trimmed(const std::string& s) {
  const auto first = s.find_first_not_of(" \t\r");
  if (first == std::string::npos) return "";
  const auto last = s.find_last_not_of(" \t\r");
  return s.substr(first, last - first + 1);
}

bool is_missing(const std::string& cell) {
  return cell.empty() || cell == "nan" || cell == "NaN" || cell == "NAN";
}

double parse_number(const std::string& cell, int line_no) {
  double v = 0.0;
  const auto res = std::from_chars(cell.data(), cell.data() + cell.size(), v);
  if (res.ec != std::errc{} || res.ptr != cell.data() + cell.size()) {
    throw DataError("line " + std::to_string(line_no) + ": non-numeric value '" + cell + "'");
  }
  return v;
}

struct RawTable {
  std::vector<std::string> tickers;
  std::vector<std::string> dates;
  std::vector<std::vector<double>> rows;  // NaN marks a missing cell
};

RawTable parse_table(const std::string& path, bool require_positive) {
  std::ifstream in(path);
  if (!in) throw DataError("cannot open '" + path + "'");

  RawTable table;
  std::string line;
  int line_no = 0;

  if (!std::getline(in, line)) throw DataError("'" + path + "' is empty");
  ++line_no;
  auto header = split_csv_line(line);
  if (header.size() < 2 || trimmed(header[0]) != "date") {
    throw DataError("line 1: header must be 'date,TICKER1,TICKER2,...'");
  }
  for (std::size_t j = 1; j < header.size(); ++j) {
    const std::string name = trimmed(header[j]);
    if (name.empty()) throw DataError("line 1: empty ticker name in header");
    table.tickers.push_back(name);
  }
  const std::size_t k = table.tickers.size();

  while (std::getline(in, line)) {
    ++line_no;
    if (trimmed(line).empty()) continue;
    const auto cells = split_csv_line(line);
    if (cells.size() != k + 1) {
      throw DataError("line " + std::to_string(line_no) + ": expected " + std::to_string(k + 1) +
                      " columns, got " + std::to_string(cells.size()));
    }
    const std::string date = trimmed(cells[0]);
    if (!table.dates.empty() && date <= table.dates.back()) {
      throw DataError("line " + std::to_string(line_no) + ": dates not strictly increasing ('" +
                      date + "' after '" + table.dates.back() + "')");
    }
    table.dates.push_back(date);
    std::vector<double> row(k);
    for (std::size_t j = 0; j < k; ++j) {
      const std::string cell = trimmed(cells[j + 1]);
      if (is_missing(cell)) {
        row[j] = std::numeric_limits<double>::quiet_NaN();
        continue;
      }
      const double v = parse_number(cell, line_no);
      if (!std::isfinite(v)) {
        row[j] = std::numeric_limits<double>::quiet_NaN();
        continue;
      }
      if (require_positive && !(v > 0.0)) {
        throw DataError("line " + std::to_string(line_no) + ": non-positive price " + cell +
                        " for " + table.tickers[j]);
      }
      row[j] = v;
    }
    table.rows.push_back(std::move(row));
  }
  if (table.rows.empty()) throw DataError("'" + path + "' has no data rows");
  return table;
}

// Drop columns with missing cells and pack the rest into a K x T matrix.
void pack_table(const RawTable& table, std::vector<std::string>* tickers, Matrix* values,
                std::vector<std::string>* dropped) {
  const std::size_t k = table.tickers.size();
  const std::size_t t = table.rows.size();
  std::vector<bool> missing(k, false);
  for (const auto& row : table.rows) {
    for (std::size_t j = 0; j < k; ++j) {
      if (std::isnan(row[j])) missing[j] = true;
    }
  }
  std::vector<int> kept;
  for (std::size_t j = 0; j < k; ++j) {
    if (missing[j]) {
      dropped->push_back(table.tickers[j]);
    } else {
      kept.push_back(static_cast<int>(j));
    }
  }
  if (kept.empty()) throw DataError("all tickers have missing values");
  tickers->clear();
  values->resize(static_cast<long>(kept.size()), static_cast<long>(t));
  for (std::size_t i = 0; i < kept.size(); ++i) {
    tickers->push_back(table.tickers[kept[i]]);
    for (std::size_t s = 0; s < t; ++s) (*values)(static_cast<long>(i), static_cast<long>(s)) =
        table.rows[s][kept[i]];
  }
}

}  // namespace

PriceMatrix load_prices(const std::string& path) {
  const RawTable table = parse_table(path, /*require_positive=*/true);
  PriceMatrix prices;
  prices.dates = table.dates;
  pack_table(table, &prices.tickers, &prices.prices, &prices.dropped);
  return prices;
}

ReturnMatrix load_returns(const std::string& path, int interval) {
  if (interval < 1) throw std::invalid_argument("load_returns: interval must be positive");
  const RawTable table = parse_table(path, /*require_positive=*/false);
  ReturnMatrix returns;
  returns.interval = interval;
  std::vector<std::string> dropped;
  pack_table(table, &returns.tickers, &returns.values, &dropped);
  return returns;
}

ReturnMatrix compute_returns(const PriceMatrix& prices, int dt) {
  const long t = prices.prices.cols();
  if (dt < 1) throw std::invalid_argument("compute_returns: dt must be positive");
  if (dt >= t) {
    throw std::invalid_argument("compute_returns: dt = " + std::to_string(dt) +
                                " needs more than " + std::to_string(t) + " price rows");
  }
  const long k = prices.prices.rows();
  const long t_out = (t - 1) / dt;
  ReturnMatrix out;
  out.tickers = prices.tickers;
  out.interval = dt;
  out.values.resize(k, t_out);
  for (long s = 0; s < t_out; ++s) {
    const long t0 = s * dt;
    for (long i = 0; i < k; ++i) {
      const double p0 = prices.prices(i, t0);
      out.values(i, s) = (prices.prices(i, t0 + dt) - p0) / p0;
    }
  }
  return out;
}

ReturnMatrix aggregate_returns(const ReturnMatrix& returns, int dt) {
  if (dt < 1) throw std::invalid_argument("aggregate_returns: dt must be positive");
  const long t = returns.values.cols();
  if (dt > t) {
    throw std::invalid_argument("aggregate_returns: dt exceeds the number of observations");
  }
  const long k = returns.values.rows();
  const long t_out = t / dt;
  ReturnMatrix out;
  out.tickers = returns.tickers;
  out.interval = returns.interval * dt;
  out.values.resize(k, t_out);
  for (long s = 0; s < t_out; ++s) {
    for (long i = 0; i < k; ++i) {
      double gross = 1.0;
      for (int j = 0; j < dt; ++j) gross *= 1.0 + returns.values(i, s * dt + j);
      out.values(i, s) = gross - 1.0;
    }
  }
  return out;
}

ReturnMatrix generate_synthetic(const EnsembleSpec& spec, int t, RngStream& rng) {
  spec.validate();
  if (t < 1) throw std::invalid_argument("generate_synthetic: t must be positive");
  const int k = spec.cov_model.size();
  ReturnMatrix out;
  out.interval = 1;
  out.values.resize(k, t);
  for (int i = 0; i < k; ++i) out.tickers.push_back("A" + std::to_string(i + 1));
  for (int s = 0; s < t; ++s) out.values.col(s) = sample_mixture_return(spec, rng);
  return out;
}

HistogramSpec auto_histogram_spec(const std::vector<double>& samples, int bins) {
  if (samples.empty()) throw std::invalid_argument("auto_histogram_spec: no samples");
  const auto [lo, hi] = std::minmax_element(samples.begin(), samples.end());
  HistogramSpec spec;
  spec.lo = *lo;
  spec.hi = *hi;
  spec.bins = bins;
  if (spec.lo == spec.hi) {
    spec.lo -= 0.5;
    spec.hi += 0.5;
  }
  return spec;
}

Histogram make_histogram(const std::vector<double>& samples, const HistogramSpec& spec) {
  if (samples.empty()) throw std::invalid_argument("make_histogram: no samples");
  if (!(spec.lo < spec.hi) || spec.bins < 1) {
    throw std::invalid_argument("make_histogram: invalid bin spec");
  }
  Histogram hist;
  hist.spec = spec;
  const double width = (spec.hi - spec.lo) / spec.bins;
  hist.counts.assign(spec.bins, 0);
  for (double v : samples) {
    if (!std::isfinite(v)) throw DataError("make_histogram: non-finite sample");
    long bin = static_cast<long>(std::floor((v - spec.lo) / width));
    bin = std::clamp(bin, 0L, static_cast<long>(spec.bins) - 1);
    ++hist.counts[bin];
  }
  const double m = static_cast<double>(samples.size());
  for (int b = 0; b < spec.bins; ++b) {
    hist.centers.push_back(spec.lo + (b + 0.5) * width);
    hist.density.push_back(static_cast<double>(hist.counts[b]) / (m * width));
  }
  return hist;
}

void write_histogram(const Histogram& hist, const std::string& path,
                     const std::vector<std::string>& provenance) {
  std::ofstream out(path);
  if (!out) throw DataError("cannot write '" + path + "'");
  for (const auto& line : provenance) out << "# " << line << "\n";
  out << "bin_center,count,density\n";
  for (std::size_t b = 0; b < hist.centers.size(); ++b) {
    out << format_double(hist.centers[b]) << "," << hist.counts[b] << ","
        << format_double(hist.density[b]) << "\n";
  }
  if (!out) throw DataError("write failed for '" + path + "'");
}

nlohmann::json fit_result_json(const FitResult& result, double alpha, std::uint64_t seed,
                               const nlohmann::json& config) {
  return nlohmann::json{
      {"tool", kToolName},
      {"version", kVersion},
      {"method", result.method == FitMethod::kMinDistCvm ? "min_dist_cvm" : "mle"},
      {"n_hat", result.n_hat},
      {"alpha", alpha},
      {"objective", result.objective},
      {"seed", seed},
      {"config", config},
      {"sample_count", result.diagnostics.sample_count},
      {"ks_distance", result.diagnostics.ks_distance},
      {"iterations", result.diagnostics.iterations},
      {"boundary", result.diagnostics.boundary},
  };
}

void write_json(const nlohmann::json& j, const std::string& path) {
  std::ofstream out(path);
  if (!out) throw DataError("cannot write '" + path + "'");
  out << j.dump(2) << "\n";
  if (!out) throw DataError("write failed for '" + path + "'");
}

nlohmann::json read_json(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw DataError("cannot open '" + path + "'");
  nlohmann::json j;
  in >> j;
  return j;
}

std::string format_double(double v) {
  char buf[40];
  const auto res = std::to_chars(buf, buf + sizeof(buf), v);
  return std::string(buf, res.ptr);
}

}  // namespace retdist
