#pragma once

// Forecast error statistics: MAE, RMSE, MBE and the percentage errors MAPE/MPE,
// over masked (measured-target) pairs, whole-series and by quarters.

#include "solarcast/data_model.hpp"

#include <array>
#include <cmath>
#include <cstddef>
#include <cstdint>
#include <optional>
#include <span>
#include <stdexcept>
#include <vector>

namespace solarcast {

using Mask = std::vector<std::uint8_t>;

/// Observations with |o| at or below this are left out of MAPE/MPE.
inline constexpr double percentage_zero_threshold = 1e-9;

struct ErrorStats {
	double mae = 0.0;
	double rmse = 0.0;
	double mbe = 0.0;
	std::optional<double> mape_pct;
	std::optional<double> mpe_pct;  // sign convention (p - o) / o
	std::size_t n = 0;
	std::size_t n_pct_excluded = 0;  // pairs dropped from MAPE/MPE for |o| ~ 0
};

inline ErrorStats compute_stats(std::span<const double> pred, std::span<const double> obs,
                                std::span<const std::uint8_t> mask) {
	if (pred.size() != obs.size() || pred.size() != mask.size()) {
		throw std::invalid_argument("compute_stats: length mismatch");
	}
	double abs_sum = 0.0;
	double sq_sum = 0.0;
	double bias_sum = 0.0;
	double ape_sum = 0.0;
	double pe_sum = 0.0;
	std::size_t n = 0;
	std::size_t n_pct = 0;
	for (std::size_t i = 0; i < pred.size(); ++i) {
		if (!mask[i]) {
			continue;
		}
		const double e = pred[i] - obs[i];
		abs_sum += std::abs(e);
		sq_sum += e * e;
		bias_sum += e;
		++n;
		if (std::abs(obs[i]) > percentage_zero_threshold) {
			ape_sum += std::abs(e) / std::abs(obs[i]);
			pe_sum += e / obs[i];
			++n_pct;
		}
	}
	if (n == 0) {
		throw DataError("compute_stats: no comparable pairs after masking");
	}
	ErrorStats s;
	const double dn = static_cast<double>(n);
	s.n = n;
	s.mae = abs_sum / dn;
	s.rmse = std::sqrt(sq_sum / dn);
	s.mbe = bias_sum / dn;
	s.n_pct_excluded = n - n_pct;
	if (n_pct > 0) {
		s.mape_pct = 100.0 * ape_sum / static_cast<double>(n_pct);
		s.mpe_pct = 100.0 * pe_sum / static_cast<double>(n_pct);
	}
	return s;
}

inline ErrorStats compute_stats(std::span<const double> pred, std::span<const double> obs) {
	const Mask all(pred.size(), 1);
	return compute_stats(pred, obs, all);
}

struct QuarterStats {
	std::array<std::optional<ErrorStats>, 4> quarters;  // empty when a quarter has no masked-in pair
	ErrorStats complete;
};

/// Day-major aligned series with `values_per_day` entries per day; quarters
/// follow quarter_ranges over the day count.
inline QuarterStats quarter_stats(std::span<const double> pred, std::span<const double> obs,
                                  std::span<const std::uint8_t> mask, std::size_t values_per_day) {
	if (values_per_day == 0 || pred.size() % values_per_day != 0) {
		throw std::invalid_argument("quarter_stats: series is not a whole number of days");
	}
	QuarterStats out;
	out.complete = compute_stats(pred, obs, mask);
	const auto ranges = quarter_ranges(pred.size() / values_per_day);
	for (std::size_t q = 0; q < 4; ++q) {
		const std::size_t begin = ranges[q].first * values_per_day;
		const std::size_t len = (ranges[q].second - ranges[q].first) * values_per_day;
		const auto m = mask.subspan(begin, len);
		bool any = false;
		for (auto v : m) {
			any = any || v != 0;
		}
		if (any) {
			out.quarters[q] = compute_stats(pred.subspan(begin, len), obs.subspan(begin, len), m);
		}
	}
	return out;
}

} // namespace solarcast
