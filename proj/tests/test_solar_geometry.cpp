#include "solarcast/solar_geometry.hpp"

#include <catch_amalgamated.hpp>

#include <cmath>

using namespace solarcast;
using Catch::Matchers::WithinAbs;
using Catch::Matchers::WithinRel;

namespace {

// straight transcription in degrees, kept separate from the library code
double oracle_i0(double lat, int day, int hour) {
	const double r = 3.14159265358979323846 / 180.0;
	const double decl = 23.45 * std::sin(r * 360.0 * (284.0 + day) / 365.0);
	const double sb = std::cos(lat * r) * std::cos(decl * r) * std::cos(15.0 * (hour - 12) * r) +
	                  std::sin(lat * r) * std::sin(decl * r);
	if (sb <= 0.0) {
		return 0.0;
	}
	return 1367.0 * (1.0 + 0.033 * std::cos(r * 360.0 * (day - 3) / 365.0)) * sb;
}

} // namespace

TEST_CASE("transmittance at the zenith") {
	CHECK_THAT(transmittance(1.0), WithinAbs(0.80159, 1e-4));
	CHECK_THAT(transmittance(1.0), WithinRel(0.56 * (std::exp(-0.65) + std::exp(-0.095)), 1e-15));
}

TEST_CASE("transmittance rejects a set sun") {
	CHECK_THROWS_AS(transmittance(0.0), std::domain_error);
	CHECK_THROWS_AS(transmittance(-0.2), std::domain_error);
}

TEST_CASE("declination extremes") {
	// Cooper: day 172 is close to the June solstice, day 355 to December
	CHECK_THAT(declination(172), WithinAbs(deg_to_rad(23.45), 1e-3));
	CHECK_THAT(declination(355), WithinAbs(-deg_to_rad(23.45), 1e-3));
	CHECK_THAT(declination(81), WithinAbs(0.0, 1e-2));
}

TEST_CASE("I0 matches an independent transcription") {
	const GeoPosition pos{-2.15, -79.9, 6.0};
	for (int day = 1; day <= 365; day += 7) {
		for (int h = first_hour; h <= last_hour; ++h) {
			const double got = extraterrestrial_irradiance(solar_position(pos, day, h));
			CHECK_THAT(got, WithinAbs(oracle_i0(pos.latitude_deg, day, h), 1e-9));
		}
	}
}

TEST_CASE("clear-sky never exceeds extraterrestrial") {
	for (double lat : {-60.0, -23.0, 0.0, 1.41, 45.0, 66.0}) {
		const GeoPosition pos{lat, 0.0, 0.0};
		for (int day = 1; day <= 366; ++day) {
			for (int h = first_hour; h <= last_hour; ++h) {
				const auto s = solar_position(pos, day, h);
				const double i0 = extraterrestrial_irradiance(s);
				const double ic = clear_sky_irradiance_or_zero(s);
				REQUIRE(ic >= 0.0);
				REQUIRE(ic <= i0);
				if (s.sin_beta <= 0.0) {
					REQUIRE(i0 == 0.0);
					REQUIRE_THROWS_AS(clear_sky_irradiance(s), std::domain_error);
				}
			}
		}
	}
}

TEST_CASE("noon is symmetric and maximal") {
	const GeoPosition pos{1.41, -78.28, 512.0};
	for (int day : {1, 100, 200, 300}) {
		const double noon = extraterrestrial_irradiance(solar_position(pos, day, 12));
		for (int k = 1; k <= 6; ++k) {
			const double am = extraterrestrial_irradiance(solar_position(pos, day, 12 - k));
			const double pm = extraterrestrial_irradiance(solar_position(pos, day, 12 + k));
			CHECK_THAT(am, WithinAbs(pm, 1e-9));
			CHECK(am <= noon);
		}
	}
}

TEST_CASE("daily sums") {
	const GeoPosition pos{0.0, 0.0, 0.0};
	double sum = 0.0;
	for (int h = first_hour; h <= last_hour; ++h) {
		sum += oracle_i0(0.0, 80, h);
	}
	CHECK_THAT(daily_extraterrestrial_insolation(pos, 80), WithinRel(sum, 1e-12));
	CHECK(daily_clear_sky_insolation(pos, 80) < sum);
}

TEST_CASE("input validation") {
	const GeoPosition pos{0.0, 0.0, 0.0};
	CHECK_THROWS_AS(solar_position(pos, 0, 12), std::invalid_argument);
	CHECK_THROWS_AS(solar_position(pos, 367, 12), std::invalid_argument);
	CHECK_THROWS_AS(solar_position(pos, 10, 5), std::invalid_argument);
	CHECK_THROWS_AS(solar_position(pos, 10, 19), std::invalid_argument);
	CHECK_THROWS_AS((GeoPosition{91.0, 0.0, 0.0}.validate()), std::invalid_argument);
	CHECK_THROWS_AS((GeoPosition{0.0, 0.0, -1.0}.validate()), std::invalid_argument);
	CHECK_THROWS_AS(clear_sky_index(1.0, 0.0), std::domain_error);
	CHECK(clear_sky_index(600.0, 500.0) == 1.2);
}

TEST_CASE("hand-evaluated irradiance examples") {
	// D=3 puts the orbital cosine at its peak
	SolarInstant s;
	s.julian_day = 3;
	s.sin_beta = 1.0;
	CHECK_THAT(extraterrestrial_irradiance(s), WithinAbs(1412.11, 1e-2));
	CHECK_THAT(clear_sky_irradiance(s), WithinAbs(1131.93, 1e-1));
	s.sin_beta = 0.5;
	CHECK_THAT(extraterrestrial_irradiance(s), WithinAbs(706.06, 1e-2));
	CHECK(clear_sky_irradiance(s) < 1131.9);
	s.sin_beta = 0.0;
	CHECK(extraterrestrial_irradiance(s) == 0.0);
	CHECK_THAT(transmittance(0.5), WithinAbs(0.615715, 1e-6));
	CHECK(transmittance(1e-4) < 1e-100);
}

TEST_CASE("elevation examples") {
	CHECK_THAT(solar_position(GeoPosition{0.0, 0.0, 0.0}, 81, 12).sin_beta, WithinAbs(1.0, 0.01));
	const double delta_deg = declination(150) * 180.0 / 3.14159265358979323846;
	CHECK_THAT(solar_position(GeoPosition{delta_deg, 0.0, 0.0}, 150, 12).sin_beta, WithinAbs(1.0, 1e-12));
	CHECK(solar_position(GeoPosition{1.41, 0.0, 0.0}, 1, 6).sin_beta <= 0.1);
}

TEST_CASE("daily sum examples") {
	CHECK(daily_extraterrestrial_insolation(GeoPosition{89.0, 0.0, 0.0}, 355) == 0.0);
	const GeoPosition eq{0.0, 0.0, 0.0};
	CHECK(daily_extraterrestrial_insolation(eq, 81) >= extraterrestrial_irradiance(solar_position(eq, 81, 12)));
	CHECK(clear_sky_index(1000.0, 1000.0) == 1.0);
	CHECK(clear_sky_index(0.0, 1000.0) == 0.0);
	CHECK(clear_sky_index(500.0, 1000.0) == 0.5);
}
