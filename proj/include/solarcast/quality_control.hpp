#pragma once

#include "solarcast/data_model.hpp"
#include "solarcast/solar_geometry.hpp"

#include <cstddef>
#include <stdexcept>
#include <utility>

namespace solarcast {

inline constexpr double qc_lower_fraction = 0.03;

struct QcReport {
	std::size_t n_input = 0;
	std::size_t n_dropped_incomplete = 0;
	std::size_t n_dropped_above_upper = 0;
	std::size_t n_dropped_below_lower = 0;
	std::size_t n_retained = 0;

	bool reconciles() const {
		return n_input == n_dropped_incomplete + n_dropped_above_upper + n_dropped_below_lower + n_retained;
	}
};

struct QcBounds {
	double lower = 0.0;
	double upper = 0.0;
};

/// Physical limits [0.03 I_cst, I0] for one slot. With the sun at or below the
/// horizon both limits collapse to 0.
inline QcBounds qc_bounds(const GeoPosition &pos, Date date, int hour) {
	const auto instant = solar_position(pos, day_of_year(date), hour);
	if (instant.sin_beta <= 0.0) {
		return {0.0, 0.0};
	}
	return {qc_lower_fraction * clear_sky_irradiance(instant), extraterrestrial_irradiance(instant)};
}

struct QcResult {
	HourlySeries series;
	QcReport report;
};

/// Drops measured irradiance outside [0.03 I_cst, I0] (both inclusive); dropped
/// slots become Missing. `n_incomplete_rows` carries the stage-one count of
/// records removed at ingestion so the report covers all three stages.
/// Imputed slots pass through untouched and are not counted.
inline QcResult apply_qc(const HourlySeries &series, const GeoPosition &pos, std::size_t n_incomplete_rows = 0) {
	if (!pos.valid()) {
		throw std::invalid_argument("apply_qc: invalid station position");
	}
	if (series.unit() != HourlyUnit::Irradiance) {
		throw std::invalid_argument("apply_qc expects irradiance units");
	}
	QcResult out{series, {}};
	out.report.n_dropped_incomplete = n_incomplete_rows;
	out.report.n_input = n_incomplete_rows;
	for (std::size_t d = 0; d < series.n_days(); ++d) {
		const Date date = series.date_of(d);
		for (int h = first_hour; h <= last_hour; ++h) {
			Slot &slot = out.series.at(d, h);
			if (!slot.is_measured()) {
				continue;
			}
			++out.report.n_input;
			const auto bounds = qc_bounds(pos, date, h);
			if (slot.value > bounds.upper && bounds.upper > 0.0) {
				++out.report.n_dropped_above_upper;
				slot = Slot::missing();
			} else if (slot.value < bounds.lower || (bounds.upper == 0.0 && slot.value != 0.0)) {
				// nonzero readings with the sun below the horizon count as below-lower
				++out.report.n_dropped_below_lower;
				slot = Slot::missing();
			} else {
				++out.report.n_retained;
			}
		}
	}
	return out;
}

} // namespace solarcast
