#include "solarcast/quality_control.hpp"
#include "solarcast/synthetic.hpp"

#include <catch_amalgamated.hpp>

using namespace solarcast;

namespace {

const GeoPosition quito{-0.2, -78.5, 2800.0};

HourlySeries constant_fraction(double frac_of_i0, std::size_t days) {
	HourlySeries s(make_date(2006, 1, 1), days, HourlyUnit::Irradiance);
	for (std::size_t d = 0; d < days; ++d) {
		for (int h = first_hour; h <= last_hour; ++h) {
			const auto b = qc_bounds(quito, s.date_of(d), h);
			s.at(d, h) = Slot::measured(frac_of_i0 * b.upper);
		}
	}
	return s;
}

} // namespace

TEST_CASE("bounds are inclusive") {
	const Date date = make_date(2006, 6, 1);
	HourlySeries s(date, 1, HourlyUnit::Irradiance);
	const auto b = qc_bounds(quito, date, 12);
	s.at(0, 10) = Slot::measured(qc_bounds(quito, date, 10).lower);
	s.at(0, 12) = Slot::measured(b.upper);
	s.at(0, 13) = Slot::measured(std::nextafter(qc_bounds(quito, date, 13).upper, 1e9));
	s.at(0, 14) = Slot::measured(std::nextafter(qc_bounds(quito, date, 14).lower, 0.0));
	const auto r = apply_qc(s, quito);
	CHECK(r.series.at(0, 10).is_measured());
	CHECK(r.series.at(0, 12).is_measured());
	CHECK(r.series.at(0, 13).is_missing());
	CHECK(r.series.at(0, 14).is_missing());
	CHECK(r.report.n_dropped_above_upper == 1);
	CHECK(r.report.n_dropped_below_lower == 1);
	CHECK(r.report.n_retained == 2);
	CHECK(r.report.reconciles());
}

TEST_CASE("night slots keep zeros and drop anything else") {
	const GeoPosition north{60.0, 0.0, 0.0};
	const Date winter = make_date(2006, 12, 21);
	REQUIRE(qc_bounds(north, winter, 6).upper == 0.0);
	HourlySeries s(winter, 1, HourlyUnit::Irradiance);
	s.at(0, 6) = Slot::measured(0.0);
	s.at(0, 18) = Slot::measured(3.0);
	const auto r = apply_qc(s, north);
	CHECK(r.series.at(0, 6).is_measured());
	CHECK(r.series.at(0, 18).is_missing());
	CHECK(r.report.n_dropped_below_lower == 1);
}

TEST_CASE("QC is idempotent and reconciles with ingestion losses") {
	SynthSpec spec;
	spec.seed = 11;
	spec.n_days = 60;
	spec.gap_fraction = 0.1;
	auto st = synthesize_station(spec);
	for (std::size_t i = 0; i < st.hourly.size(); i += 17) {
		if (st.hourly.slots()[i].is_measured()) {
			st.hourly.slots()[i].value *= (i % 2) ? 5.0 : 0.001;
		}
	}
	const auto once = apply_qc(st.hourly, spec.position, 4);
	CHECK(once.report.reconciles());
	CHECK(once.report.n_dropped_incomplete == 4);
	const auto twice = apply_qc(once.series, spec.position);
	CHECK(twice.series == once.series);
	CHECK(twice.report.n_dropped_above_upper == 0);
	CHECK(twice.report.n_dropped_below_lower == 0);
}

TEST_CASE("clean clear-ish data passes untouched") {
	const auto s = constant_fraction(0.5, 30);
	// 0.5 I0 can sit below 0.03 I_cst only at night, where I0 is 0 and the value 0
	const auto r = apply_qc(s, quito);
	CHECK(r.series == s);
}

TEST_CASE("QC rejects wrong units and bad positions") {
	HourlySeries kc(make_date(2006, 1, 1), 2, HourlyUnit::ClearSkyIndex);
	CHECK_THROWS_AS(apply_qc(kc, quito), std::invalid_argument);
	HourlySeries s(make_date(2006, 1, 1), 2, HourlyUnit::Irradiance);
	CHECK_THROWS_AS(apply_qc(s, GeoPosition{100.0, 0.0, 0.0}), std::invalid_argument);
}

TEST_CASE("bound examples") {
	const Date date = make_date(2006, 3, 21);
	const auto inst = solar_position(quito, day_of_year(date), 11);
	const double i0 = extraterrestrial_irradiance(inst);
	const double ic = clear_sky_irradiance(inst);
	HourlySeries s(date, 1, HourlyUnit::Irradiance);
	s.at(0, 11) = Slot::measured(i0 + 1.0);
	auto r = apply_qc(s, quito);
	CHECK(r.report.n_dropped_above_upper == 1);
	s.at(0, 11) = Slot::measured(qc_lower_fraction * ic);
	CHECK(apply_qc(s, quito).report.n_retained == 1);
	s.at(0, 11) = Slot::measured(0.5 * ic);
	CHECK(apply_qc(s, quito).report.n_retained == 1);
}

TEST_CASE("a gap-free synthetic station survives QC whole") {
	SynthSpec spec;
	spec.seed = 3;
	spec.n_days = 90;
	const auto st = synthesize_station(spec);
	const auto r = apply_qc(st.hourly, spec.position);
	CHECK(r.series == st.hourly);
	CHECK(r.report.n_retained == st.hourly.size());
}
