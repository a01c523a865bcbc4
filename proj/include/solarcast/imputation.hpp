#pragma once

// Gap filling: sequential averaging rules on hourly clear-sky-index grids and
// temperature-range models (Hargreaves-Samani, logistic) for daily insolation.

#include "solarcast/data_model.hpp"
#include "solarcast/metrics.hpp"

#include <algorithm>
#include <cmath>
#include <cstddef>
#include <cstdint>
#include <random>
#include <span>
#include <stdexcept>
#include <string>
#include <vector>

namespace solarcast {

// ---------------------------------------------------------------------------
// Hourly rules

/// Fills every Missing slot of a kc grid, day by day in chronological order
/// and within a day at 6:00, then 7:00..17:00, then 18:00:
///  - first day: 1.0
///  - 6:00: mean(previous day 6:00, current 7:00), or previous day alone if 7:00 is missing
///  - 18:00: mean(current 17:00, previous day 18:00)
///  - otherwise: mean(previous day same hour, current h-1, current h+1), omitting h+1 if missing
/// Values filled earlier in the pass feed later ones. Measured slots are never changed.
inline HourlySeries impute_hourly(const HourlySeries &series) {
	if (series.unit() != HourlyUnit::ClearSkyIndex) {
		throw std::invalid_argument("impute_hourly expects clear-sky-index units");
	}
	HourlySeries out = series;
	const auto fill = [](Slot &slot, double v) { slot = Slot::imputed(v); };

	for (std::size_t d = 0; d < out.n_days(); ++d) {
		if (d == 0) {
			for (int h = first_hour; h <= last_hour; ++h) {
				if (out.at(0, h).is_missing()) {
					fill(out.at(0, h), 1.0);
				}
			}
			continue;
		}
		const auto prev = [&](int h) { return out.at(d - 1, h).value; };

		if (out.at(d, first_hour).is_missing()) {
			const Slot &next = out.at(d, first_hour + 1);
			fill(out.at(d, first_hour), next.has_value() ? (prev(first_hour) + next.value) / 2.0 : prev(first_hour));
		}
		for (int h = first_hour + 1; h < last_hour; ++h) {
			if (!out.at(d, h).is_missing()) {
				continue;
			}
			const Slot &next = out.at(d, h + 1);
			double sum = prev(h) + out.at(d, h - 1).value;
			double count = 2.0;
			if (next.has_value()) {
				sum += next.value;
				count += 1.0;
			}
			fill(out.at(d, h), sum / count);
		}
		if (out.at(d, last_hour).is_missing()) {
			fill(out.at(d, last_hour), (out.at(d, last_hour - 1).value + prev(last_hour)) / 2.0);
		}
	}
	return out;
}

// ---------------------------------------------------------------------------
// Temperature-range models for daily insolation

enum class TempModel { HargreavesSamani, Logistic };

inline std::string_view to_string(TempModel m) {
	return m == TempModel::HargreavesSamani ? "hs" : "logistic";
}

inline TempModel parse_temp_model(std::string_view s) {
	if (s == "hs" || s == "hargreaves-samani") {
		return TempModel::HargreavesSamani;
	}
	if (s == "logistic") {
		return TempModel::Logistic;
	}
	throw std::invalid_argument("unknown temperature model: " + std::string(s));
}

struct TempModelCoeffs {
	TempModel model = TempModel::HargreavesSamani;
	double a = 0.0;
	double b = 0.0;  // logistic only

	/// Predicted H/H0 for a temperature range. HS is clipped to [0, 1].
	double ratio(double temperature_range) const {
		if (model == TempModel::HargreavesSamani) {
			return std::clamp(a * std::sqrt(std::max(temperature_range, 0.0)), 0.0, 1.0);
		}
		return 1.0 / (1.0 + std::exp(-(a + b * temperature_range)));
	}
};

struct TempModelFit {
	TempModelCoeffs coeffs;
	std::size_t n_used = 0;
	std::size_t n_negative_range = 0;  // days skipped because Tmax < Tmin
	std::size_t iterations = 0;
	bool converged = true;
	std::vector<std::string> warnings;
};

inline constexpr std::size_t min_temp_fit_days = 30;

namespace detail {

inline double logit(double p) { return std::log(p / (1.0 - p)); }

inline double logistic_sse(double a, double b, std::span<const double> x, std::span<const double> y) {
	double s = 0.0;
	for (std::size_t i = 0; i < x.size(); ++i) {
		const double r = 1.0 / (1.0 + std::exp(-(a + b * x[i]))) - y[i];
		s += r * r;
	}
	return s;
}

} // namespace detail

/// Least-squares fit of H/H0 against the temperature range over days with
/// measured insolation and both temperatures. `h0` holds one value per day.
inline TempModelFit fit_temp_model(const DailySeries &daily, std::span<const double> h0, TempModel model) {
	if (h0.size() != daily.n_days()) {
		throw std::invalid_argument("fit_temp_model: h0 length differs from series");
	}
	TempModelFit fit;
	fit.coeffs.model = model;
	std::vector<double> x;
	std::vector<double> y;
	for (std::size_t d = 0; d < daily.n_days(); ++d) {
		const auto &e = daily.entries[d];
		if (!e.insolation.is_measured() || !e.t_max.is_measured() || !e.t_min.is_measured() || !(h0[d] > 0.0)) {
			continue;
		}
		const double dt = e.t_max.value - e.t_min.value;
		if (dt < 0.0) {
			++fit.n_negative_range;
			continue;
		}
		x.push_back(dt);
		y.push_back(e.insolation.value / h0[d]);
	}
	if (fit.n_negative_range > 0) {
		fit.warnings.push_back("skipped " + std::to_string(fit.n_negative_range) + " days with Tmax < Tmin");
	}
	if (x.size() < min_temp_fit_days) {
		throw DataError("fit_temp_model: fewer than 30 usable days");
	}
	fit.n_used = x.size();

	if (model == TempModel::HargreavesSamani) {
		double sxy = 0.0;
		double sxx = 0.0;
		for (std::size_t i = 0; i < x.size(); ++i) {
			const double r = std::sqrt(x[i]);
			sxy += r * y[i];
			sxx += r * r;
		}
		if (!(sxx > 0.0)) {
			throw DataError("fit_temp_model: all temperature ranges are zero");
		}
		fit.coeffs.a = sxy / sxx;
		return fit;
	}

	double mean_y = 0.0;
	for (double v : y) {
		mean_y += v;
	}
	mean_y /= static_cast<double>(y.size());
	double a = detail::logit(std::clamp(mean_y, 1e-6, 1.0 - 1e-6));
	double b = 0.0;
	double f = detail::logistic_sse(a, b, x, y);
	fit.converged = false;
	for (std::size_t it = 0; it < 100; ++it) {
		fit.iterations = it + 1;
		// gradient and Hessian of the squared error
		double ga = 0.0, gb = 0.0, haa = 0.0, hab = 0.0, hbb = 0.0;
		double gn_aa = 0.0, gn_ab = 0.0, gn_bb = 0.0;
		for (std::size_t i = 0; i < x.size(); ++i) {
			const double s = 1.0 / (1.0 + std::exp(-(a + b * x[i])));
			const double ds = s * (1.0 - s);
			const double d2s = ds * (1.0 - 2.0 * s);
			const double r = s - y[i];
			const double w = 2.0 * (ds * ds + r * d2s);
			const double wgn = 2.0 * ds * ds;
			ga += 2.0 * r * ds;
			gb += 2.0 * r * ds * x[i];
			haa += w;
			hab += w * x[i];
			hbb += w * x[i] * x[i];
			gn_aa += wgn;
			gn_ab += wgn * x[i];
			gn_bb += wgn * x[i] * x[i];
		}
		double det = haa * hbb - hab * hab;
		if (!(haa > 0.0) || !(det > 0.0)) {
			// indefinite: fall back to the Gauss-Newton curvature
			haa = gn_aa;
			hab = gn_ab;
			hbb = gn_bb;
			det = haa * hbb - hab * hab;
		}
		double step_a = 0.0;
		double step_b = 0.0;
		if (det > 1e-300 * std::max(1.0, haa * hbb)) {
			step_a = -(hbb * ga - hab * gb) / det;
			step_b = -(haa * gb - hab * ga) / det;
		} else if (haa > 0.0) {
			step_a = -ga / haa;  // singular in b (constant temperature range): move a only
		}
		double scale = 1.0;
		double f_new = detail::logistic_sse(a + step_a, b + step_b, x, y);
		for (int halving = 0; halving < 60 && !(f_new <= f); ++halving) {
			scale *= 0.5;
			f_new = detail::logistic_sse(a + scale * step_a, b + scale * step_b, x, y);
		}
		if (!(f_new <= f)) {
			fit.converged = true;  // no descent direction left
			break;
		}
		a += scale * step_a;
		b += scale * step_b;
		f = f_new;
		if (std::hypot(scale * step_a, scale * step_b) < 1e-8) {
			fit.converged = true;
			break;
		}
	}
	if (!fit.converged) {
		fit.warnings.push_back("logistic fit stopped at the iteration cap");
	}
	fit.coeffs.a = a;
	fit.coeffs.b = b;
	return fit;
}

struct DailyImputation {
	DailySeries series;
	std::size_t n_imputed = 0;
	std::vector<std::size_t> unfillable_days;  // missing insolation without a usable temperature range
};

/// Fills missing insolation with H0 * model(Tmax - Tmin).
inline DailyImputation impute_daily(const DailySeries &daily, const TempModelCoeffs &coeffs,
                                    std::span<const double> h0) {
	if (h0.size() != daily.n_days()) {
		throw std::invalid_argument("impute_daily: h0 length differs from series");
	}
	DailyImputation out{daily, 0, {}};
	for (std::size_t d = 0; d < daily.n_days(); ++d) {
		auto &e = out.series.entries[d];
		if (!e.insolation.is_missing()) {
			continue;
		}
		const auto dt = e.temperature_range();
		if (!dt || *dt < 0.0 || !(h0[d] >= 0.0)) {
			out.unfillable_days.push_back(d);
			continue;
		}
		e.insolation = Slot::imputed(h0[d] * coeffs.ratio(*dt));
		++out.n_imputed;
	}
	return out;
}

// ---------------------------------------------------------------------------
// Masked-holdout evaluation

namespace detail {

/// Seeded choice of max(1, round(fraction * n)) distinct measured indices.
inline std::vector<std::size_t> choose_holdout(std::vector<std::size_t> candidates, double mask_fraction,
                                               std::uint64_t seed) {
	if (!(mask_fraction > 0.0) || mask_fraction > 0.5) {
		throw std::invalid_argument("mask_fraction must be in (0, 0.5]");
	}
	if (candidates.empty()) {
		throw DataError("evaluate_imputation: nothing to mask");
	}
	const auto k = std::max<std::size_t>(
	    1, static_cast<std::size_t>(std::llround(mask_fraction * static_cast<double>(candidates.size()))));
	std::mt19937_64 rng(seed);
	for (std::size_t i = 0; i < k; ++i) {
		std::uniform_int_distribution<std::size_t> pick(i, candidates.size() - 1);
		std::swap(candidates[i], candidates[pick(rng)]);
	}
	candidates.resize(k);
	std::sort(candidates.begin(), candidates.end());
	return candidates;
}

} // namespace detail

/// Hides a seeded fraction of measured slots, runs `impute` on the masked
/// series and scores the filled values against the hidden measurements.
template <class Imputer>
ErrorStats evaluate_imputation(const HourlySeries &series, double mask_fraction, std::uint64_t seed,
                               Imputer &&impute) {
	std::vector<std::size_t> measured;
	const auto slots = series.slots();
	for (std::size_t i = 0; i < slots.size(); ++i) {
		if (slots[i].is_measured()) {
			measured.push_back(i);
		}
	}
	const auto held = detail::choose_holdout(std::move(measured), mask_fraction, seed);
	HourlySeries masked = series;
	for (auto i : held) {
		masked.slots()[i] = Slot::missing();
	}
	const HourlySeries filled = impute(static_cast<const HourlySeries &>(masked));
	if (filled.size() != series.size()) {
		throw std::logic_error("evaluate_imputation: imputer changed the series length");
	}
	std::vector<double> pred;
	std::vector<double> obs;
	for (auto i : held) {
		if (filled.slots()[i].is_missing()) {
			throw std::logic_error("evaluate_imputation: imputer left a held-out slot missing");
		}
		pred.push_back(filled.slots()[i].value);
		obs.push_back(slots[i].value);
	}
	return compute_stats(pred, obs);
}

inline ErrorStats evaluate_imputation(const HourlySeries &series, double mask_fraction, std::uint64_t seed) {
	return evaluate_imputation(series, mask_fraction, seed, [](const HourlySeries &s) { return impute_hourly(s); });
}

/// Daily variant: the temperature model is refitted on the masked series.
inline ErrorStats evaluate_imputation(const DailySeries &daily, std::span<const double> h0, double mask_fraction,
                                      std::uint64_t seed, TempModel model) {
	std::vector<std::size_t> candidates;
	for (std::size_t d = 0; d < daily.n_days(); ++d) {
		const auto &e = daily.entries[d];
		const auto dt = e.temperature_range();
		if (e.insolation.is_measured() && dt && *dt >= 0.0) {
			candidates.push_back(d);
		}
	}
	const auto held = detail::choose_holdout(std::move(candidates), mask_fraction, seed);
	DailySeries masked = daily;
	for (auto d : held) {
		masked.entries[d].insolation = Slot::missing();
	}
	const auto fit = fit_temp_model(masked, h0, model);
	const auto filled = impute_daily(masked, fit.coeffs, h0);
	std::vector<double> pred;
	std::vector<double> obs;
	for (auto d : held) {
		pred.push_back(filled.series.entries[d].insolation.value);
		obs.push_back(daily.entries[d].insolation.value);
	}
	return compute_stats(pred, obs);
}

} // namespace solarcast
