#pragma once

#include <cstdint>
#include <string>
#include <vector>

#include "json.hpp"
#include "retdist/ensemble.hpp"
#include "retdist/fit.hpp"

namespace retdist {

struct PriceMatrix {
  std::vector<std::string> tickers;
  std::vector<std::string> dates;  // ISO-8601, strictly increasing
  Matrix prices;                   // K x T, positive
  std::vector<std::string> dropped;  // tickers removed for missing values
};

struct ReturnMatrix {
  std::vector<std::string> tickers;
  Matrix values;  // K x T'
  int interval = 1;  // return interval in trading days
};

// Price CSV with header `date,TICKER1,TICKER2,...` and one row per trading
// day. Tickers with missing cells (empty or nan) are dropped and listed in
// `dropped`; any other malformation is an error naming the line.
PriceMatrix load_prices(const std::string& path);

// Same layout, but the cells are returns at the given interval.
ReturnMatrix load_returns(const std::string& path, int interval = 1);

// Non-overlapping simple returns r(t) = (S(t+dt) - S(t)) / S(t) sampled at
// t = 0, dt, 2dt, ...; yields floor((T-1)/dt) columns.
ReturnMatrix compute_returns(const PriceMatrix& prices, int dt);

// Compound disjoint blocks of dt consecutive returns into one:
// r' = prod(1 + r) - 1. Equivalent to recomputing returns from the
// underlying prices at interval dt * interval.
ReturnMatrix aggregate_returns(const ReturnMatrix& returns, int dt);

// T independent scale-mixture draws; columns are time steps.
ReturnMatrix generate_synthetic(const EnsembleSpec& spec, int t, RngStream& rng);

struct HistogramSpec {
  double lo = 0.0;
  double hi = 1.0;
  int bins = 50;
};

// Spec spanning [min, max] of the samples.
HistogramSpec auto_histogram_spec(const std::vector<double>& samples, int bins);

struct Histogram {
  HistogramSpec spec;
  std::vector<double> centers;
  std::vector<long> counts;
  std::vector<double> density;  // count / (M * bin width)
};

// Samples outside [lo, hi] are clipped into the edge bins, so the density
// always integrates to exactly one.
Histogram make_histogram(const std::vector<double>& samples, const HistogramSpec& spec);

// CSV `bin_center,count,density` preceded by `# `-prefixed provenance lines.
void write_histogram(const Histogram& hist, const std::string& path,
                     const std::vector<std::string>& provenance);

// Fit result as JSON with provenance (method, n_hat, alpha, objective, seed,
// config, sample_count, diagnostics).
nlohmann::json fit_result_json(const FitResult& result, double alpha, std::uint64_t seed,
                               const nlohmann::json& config);

void write_json(const nlohmann::json& j, const std::string& path);
nlohmann::json read_json(const std::string& path);

// Shortest round-trip formatting; keeps every writer byte-stable.
std::string format_double(double v);

}  // namespace retdist
