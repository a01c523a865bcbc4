#pragma once

// Seeded synthetic weather station: bounded AR(1) clear-sky index under a
// Markov mix of cloud regimes, converted to irradiance with the clear-sky
// model, plus temperatures whose range tracks the clearness index and injected
// gaps (single-slot gaps and multi-day outages).

#include "solarcast/data_model.hpp"
#include "solarcast/solar_geometry.hpp"

#include <algorithm>
#include <array>
#include <cmath>
#include <cstddef>
#include <cstdint>
#include <random>
#include <stdexcept>
#include <vector>

namespace solarcast {

struct SynthSpec {
	std::uint64_t seed = 0;
	std::size_t n_days = 365;
	/// Relative weights of Cloudy, PartiallyHighCloud, PartiallyLowCloud, Sunny, VerySunny.
	std::array<double, 5> regime_mix{0.35, 0.35, 0.2, 0.07, 0.03};
	double regime_persistence = 0.7;  // probability a day keeps the previous day's regime
	double ar_coefficient = 0.8;      // hour-to-hour AR(1) coefficient of the kc deviation
	double noise_sd = 0.06;
	double gap_fraction = 0.0;
	GeoPosition position{1.41, -78.28, 512.0};
	Date start = make_date(2005, 11, 26);
	std::string code = "SYN";
	std::string name = "Synthetic";
};

/// Mean clear-sky index of each regime, chosen so the resulting clearness
/// index of a regime day falls in that regime's class.
inline constexpr std::array<double, 5> regime_mean_kc{0.2, 0.42, 0.65, 0.88, 1.05};
inline constexpr double synth_kc_min = 0.05;
inline constexpr double synth_kc_max = 1.2;

struct SyntheticStation {
	StationMeta meta;
	HourlySeries hourly;  // irradiance, Wh/m^2
	DailySeries daily;    // insolation (sum of a fully measured day) and temperatures
	std::vector<double> true_kc;  // generating kc per slot, before gaps
};

inline StationMeta station_meta(const SynthSpec &spec) {
	StationMeta m;
	m.code = spec.code;
	m.name = spec.name;
	m.position = spec.position;
	m.start_date = spec.start;
	m.end_date = add_days(spec.start, static_cast<long>(spec.n_days) - 1);
	return m;
}

namespace detail {

/// Exactly round(fraction * n) missing flags: multi-day runs first, then
/// isolated single-slot gaps, topped up with random slots if needed.
inline std::vector<std::uint8_t> gap_mask(std::size_t n, double fraction, std::mt19937_64 &rng) {
	std::vector<std::uint8_t> missing(n, 0);
	const auto target = static_cast<std::size_t>(std::llround(fraction * static_cast<double>(n)));
	if (target == 0 || n == 0) {
		return missing;
	}
	std::size_t count = 0;
	const std::size_t singles = std::min<std::size_t>(target, std::max<std::size_t>(1, target / 50));
	std::uniform_int_distribution<std::size_t> where(0, n - 1);
	std::uniform_int_distribution<std::size_t> run_len(hours_per_day, 20 * hours_per_day);
	while (count + singles < target) {
		const std::size_t len = std::min(run_len(rng), target - singles - count);
		std::size_t i = where(rng);
		for (std::size_t k = 0; k < len && i < n && count + singles < target; ++k, ++i) {
			if (!missing[i]) {
				missing[i] = 1;
				++count;
			}
		}
	}
	if (n >= 3) {
		std::uniform_int_distribution<std::size_t> inner(1, n - 2);
		for (std::size_t attempt = 0; attempt < 1000 * singles && count < target; ++attempt) {
			const std::size_t i = inner(rng);
			if (!missing[i - 1] && !missing[i] && !missing[i + 1]) {
				missing[i] = 1;
				++count;
			}
		}
	}
	while (count < target) {
		const std::size_t i = where(rng);
		if (!missing[i]) {
			missing[i] = 1;
			++count;
		}
	}
	return missing;
}

} // namespace detail

inline SyntheticStation synthesize_station(const SynthSpec &spec) {
	if (spec.n_days < 30) {
		throw std::invalid_argument("synthesize_station: n_days must be at least 30");
	}
	if (!(spec.gap_fraction >= 0.0) || spec.gap_fraction >= 1.0) {
		throw std::invalid_argument("synthesize_station: gap_fraction must be in [0, 1)");
	}
	spec.position.validate();
	std::mt19937_64 rng(spec.seed);
	std::normal_distribution<double> normal(0.0, 1.0);
	std::uniform_real_distribution<double> unit(0.0, 1.0);
	std::discrete_distribution<int> regime_draw(spec.regime_mix.begin(), spec.regime_mix.end());

	SyntheticStation st;
	st.meta = station_meta(spec);
	st.hourly = HourlySeries(spec.start, spec.n_days, HourlyUnit::Irradiance);
	st.true_kc.resize(spec.n_days * hours_per_day);
	st.daily.start_date = spec.start;
	st.daily.entries.resize(spec.n_days);

	int regime = regime_draw(rng);
	double deviation = 0.0;
	std::vector<double> insolation(spec.n_days, 0.0);
	for (std::size_t d = 0; d < spec.n_days; ++d) {
		if (d > 0 && unit(rng) >= spec.regime_persistence) {
			regime = regime_draw(rng);
		}
		const Date date = st.hourly.date_of(d);
		const int doy = day_of_year(date);
		for (int h = first_hour; h <= last_hour; ++h) {
			deviation = spec.ar_coefficient * deviation + spec.noise_sd * normal(rng);
			const double kc =
			    std::clamp(regime_mean_kc[static_cast<std::size_t>(regime)] + deviation, synth_kc_min, synth_kc_max);
			const std::size_t idx = HourlySeries::index(d, h);
			st.true_kc[idx] = kc;
			const double clear = clear_sky_irradiance_or_zero(solar_position(spec.position, doy, h));
			const double value = kc * clear;
			st.hourly.slots()[idx] = Slot::measured(value);
			insolation[d] += value;
		}
		const double h0 = daily_extraterrestrial_insolation(spec.position, doy);
		const double kt = h0 > 0.0 ? insolation[d] / h0 : 0.0;
		const double range = std::max(0.5, 3.0 + 14.0 * kt + 0.7 * normal(rng));
		const double t_min = 17.0 + normal(rng);
		auto &e = st.daily.entries[d];
		e.t_min = Slot::measured(t_min);
		e.t_max = Slot::measured(t_min + range);
	}

	const auto missing = detail::gap_mask(st.hourly.size(), spec.gap_fraction, rng);
	for (std::size_t i = 0; i < missing.size(); ++i) {
		if (missing[i]) {
			st.hourly.slots()[i] = Slot::missing();
		}
	}
	for (std::size_t d = 0; d < spec.n_days; ++d) {
		const auto day = st.hourly.day(d);
		const bool complete = std::all_of(day.begin(), day.end(), [](const Slot &s) { return s.is_measured(); });
		st.daily.entries[d].insolation = complete ? Slot::measured(insolation[d]) : Slot::missing();
	}
	return st;
}

} // namespace solarcast
