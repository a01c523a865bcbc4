#pragma once

// Extraterrestrial and clear-sky irradiance on a horizontal surface
// (Kreith & Kreider transmittance), evaluated at whole local hours.

#include <cmath>
#include <numbers>
#include <stdexcept>

namespace solarcast {

inline constexpr double solar_constant = 1367.0;  // W/m^2
inline constexpr int first_hour = 6;
inline constexpr int last_hour = 18;
inline constexpr int hours_per_day = last_hour - first_hour + 1;

inline constexpr double deg_to_rad(double deg) { return deg * std::numbers::pi / 180.0; }

struct GeoPosition {
	double latitude_deg = 0.0;
	double longitude_deg = 0.0;
	double altitude_m = 0.0;

	bool valid() const {
		return std::isfinite(latitude_deg) && std::isfinite(longitude_deg) && std::isfinite(altitude_m) &&
		       latitude_deg >= -90.0 && latitude_deg <= 90.0 && longitude_deg >= -180.0 &&
		       longitude_deg <= 180.0 && altitude_m >= 0.0;
	}

	void validate() const {
		if (!valid()) {
			throw std::invalid_argument("GeoPosition out of range");
		}
	}
};

/// Sun geometry for one station at one whole local hour of one day of year.
struct SolarInstant {
	int julian_day = 1;
	int local_hour = 12;
	double declination_rad = 0.0;
	double hour_angle_rad = 0.0;
	double sin_beta = 0.0;  // sine of the solar elevation
};

/// Cooper's declination, in radians, for day of year `julian_day`.
inline double declination(int julian_day) {
	return deg_to_rad(23.45) * std::sin(deg_to_rad(360.0 * (284.0 + julian_day) / 365.0));
}

inline double sin_elevation(double latitude_rad, double declination_rad, double hour_angle_rad) {
	return std::cos(latitude_rad) * std::cos(declination_rad) * std::cos(hour_angle_rad) +
	       std::sin(latitude_rad) * std::sin(declination_rad);
}

inline SolarInstant solar_position(const GeoPosition &pos, int julian_day, int local_hour) {
	if (julian_day < 1 || julian_day > 366) {
		throw std::invalid_argument("julian_day must be in [1, 366]");
	}
	if (local_hour < first_hour || local_hour > last_hour) {
		throw std::invalid_argument("local_hour must be in [6, 18]");
	}
	SolarInstant s;
	s.julian_day = julian_day;
	s.local_hour = local_hour;
	s.declination_rad = declination(julian_day);
	s.hour_angle_rad = deg_to_rad(15.0 * (local_hour - 12));
	s.sin_beta = sin_elevation(deg_to_rad(pos.latitude_deg), s.declination_rad, s.hour_angle_rad);
	return s;
}

/// I0 in W/m^2; zero when the sun is at or below the horizon.
inline double extraterrestrial_irradiance(const SolarInstant &instant) {
	if (instant.sin_beta <= 0.0) {
		return 0.0;
	}
	const double orbit = 1.0 + 0.033 * std::cos(deg_to_rad(360.0 * (instant.julian_day - 3) / 365.0));
	return solar_constant * orbit * instant.sin_beta;
}

/// Kreith & Kreider atmospheric transmittance. Requires sin_beta > 0.
inline double transmittance(double sin_beta) {
	if (!(sin_beta > 0.0)) {
		throw std::domain_error("transmittance undefined for sun at or below the horizon");
	}
	return 0.56 * (std::exp(-0.65 / sin_beta) + std::exp(-0.095 / sin_beta));
}

/// I_cst = I0 * tau. Throws std::domain_error when sin_beta <= 0.
inline double clear_sky_irradiance(const SolarInstant &instant) {
	const double tau = transmittance(instant.sin_beta);
	return extraterrestrial_irradiance(instant) * tau;
}

/// Clear-sky irradiance with the night convention I_cst = 0 for sin_beta <= 0.
inline double clear_sky_irradiance_or_zero(const SolarInstant &instant) {
	return instant.sin_beta > 0.0 ? clear_sky_irradiance(instant) : 0.0;
}

/// H0: sum of the 13 hourly I0 values (6:00..18:00), Wh/(m^2 day).
inline double daily_extraterrestrial_insolation(const GeoPosition &pos, int julian_day) {
	double sum = 0.0;
	for (int h = first_hour; h <= last_hour; ++h) {
		sum += extraterrestrial_irradiance(solar_position(pos, julian_day, h));
	}
	return sum;
}

/// Sum of the hourly clear-sky irradiance over daylight hours, Wh/(m^2 day).
inline double daily_clear_sky_insolation(const GeoPosition &pos, int julian_day) {
	double sum = 0.0;
	for (int h = first_hour; h <= last_hour; ++h) {
		sum += clear_sky_irradiance_or_zero(solar_position(pos, julian_day, h));
	}
	return sum;
}

/// kc = measured / clear_sky. Not clamped: values above 1 are legitimate.
inline double clear_sky_index(double measured, double clear_sky) {
	if (!(clear_sky > 0.0)) {
		throw std::domain_error("clear-sky irradiance must be positive");
	}
	return measured / clear_sky;
}

/// Kt = H / H0.
inline double clearness_index(double daily_insolation, double h0) {
	if (!(h0 > 0.0)) {
		throw std::domain_error("extraterrestrial insolation must be positive");
	}
	return daily_insolation / h0;
}

} // namespace solarcast
