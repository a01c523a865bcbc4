#include "solarcast/data_model.hpp"

#include <catch_amalgamated.hpp>

#include <sstream>

using namespace solarcast;
using Catch::Matchers::WithinAbs;

TEST_CASE("dates") {
	const Date d = make_date(2005, 11, 26);
	CHECK(format_date(d) == "2005-11-26");
	CHECK(format_timestamp(d, 7) == "2005-11-26T07:00:00");
	CHECK(day_of_year(make_date(2005, 1, 1)) == 1);
	CHECK(day_of_year(make_date(2004, 12, 31)) == 366);
	CHECK(days_between(d, add_days(d, 40)) == 40);
	CHECK(parse_date("2005-02-29") == std::nullopt);
	CHECK(parse_date("2004-02-29") == make_date(2004, 2, 29));
	CHECK(parse_date("2004-2-29") == std::nullopt);
}

TEST_CASE("timestamps") {
	const auto h = parse_timestamp("2006-01-02T13:00:00");
	REQUIRE(h);
	CHECK(h->hour == 13);
	const auto d = parse_timestamp("2006-01-02");
	REQUIRE(d);
	CHECK_FALSE(d->hour);
	CHECK_FALSE(parse_timestamp("2006-01-02T25:00:00"));
	CHECK_FALSE(parse_timestamp("garbage"));
}

TEST_CASE("day classes include their upper edge") {
	CHECK(classify_day(0.2) == DayClass::Cloudy);
	CHECK(classify_day(0.21) == DayClass::PartiallyHighCloud);
	CHECK(classify_day(0.4) == DayClass::PartiallyHighCloud);
	CHECK(classify_day(0.41) == DayClass::PartiallyLowCloud);
	CHECK(classify_day(0.6) == DayClass::PartiallyLowCloud);
	CHECK(classify_day(0.61) == DayClass::Sunny);
	CHECK(classify_day(0.75) == DayClass::Sunny);
	CHECK(classify_day(0.76) == DayClass::VerySunny);
	CHECK(classify_day(1.0) == DayClass::VerySunny);
	CHECK_THROWS_AS(classify_day(0.0), std::domain_error);
	CHECK_THROWS_AS(classify_day(1.01), std::domain_error);
	for (auto c : {DayClass::Cloudy, DayClass::Sunny, DayClass::VerySunny}) {
		CHECK(parse_day_class(to_string(c)) == c);
	}
}

TEST_CASE("quarters cover every day once") {
	for (std::size_t n : {4u, 5u, 7u, 365u, 366u, 1095u}) {
		const auto q = quarter_ranges(n);
		CHECK(q[0].first == 0);
		CHECK(q[3].second == n);
		for (int k = 0; k < 3; ++k) {
			CHECK(q[k].second == q[k + 1].first);
			CHECK(q[k].second - q[k].first >= q[k + 1].second - q[k + 1].first);
		}
		for (std::size_t d = 0; d < n; ++d) {
			const auto k = quarter_of_day(d, n);
			CHECK((d >= q[k].first && d < q[k].second));
		}
	}
}

TEST_CASE("missing report counts runs") {
	std::vector<Slot> s(26, Slot::measured(0.5));
	s[3] = Slot::missing();                           // single
	for (int i = 10; i < 24; ++i) s[i] = Slot::missing();  // run of 14
	s[25] = Slot::imputed(0.4);
	const auto r = missing_report(s, 13);
	CHECK(r.n_total == 26);
	CHECK(r.n_missing == 15);
	CHECK(r.n_imputed == 1);
	CHECK(r.n_measured == 10);
	CHECK(r.one_size_gap_count == 1);
	CHECK(r.long_gap_count == 1);
	CHECK(r.longest_gap == 14);
	CHECK_THAT(r.pct_missing, WithinAbs(100.0 * 15 / 26, 1e-12));
}

TEST_CASE("CSV round trip keeps values and provenance bit-exact") {
	HourlySeries s(make_date(2006, 3, 1), 3, HourlyUnit::ClearSkyIndex);
	for (std::size_t i = 0; i < s.size(); ++i) {
		s.slots()[i] = i % 5 == 0 ? Slot::missing() : (i % 7 == 0 ? Slot::imputed(0.1 * i + 1e-17) : Slot::measured(1.0 / (i + 3)));
	}
	std::stringstream io;
	write_csv_header(io);
	write_hourly_csv(io, "M001", "kc", s);
	const auto in = ingest_csv(io);
	const auto it = in.hourly.find(SeriesKey{"M001", "kc"});
	REQUIRE(it != in.hourly.end());
	CHECK(it->second == s);
}

TEST_CASE("ingestion rules") {
	std::stringstream io;
	io << "\xEF\xBB\xBFstation,variable,timestamp,value\n"
	   << "A,irradiance,2006-01-01T06:00:00,0\n"
	   << "A,irradiance,2006-01-01T07:00:00,100\n"
	   << "A,irradiance,2006-01-01T07:00:00,200\n"  // duplicate: first kept
	   << "A,irradiance,2006-01-01T08:00:00,\n"     // incomplete
	   << "A,irradiance,2006-01-02T12:00:00,not-a-number\n"
	   << "A,irradiance,2006-01-03T20:00:00,5\n"   // outside the day window
	   << "A,tmax,2006-01-01,30\n";
	const auto in = ingest_csv(io);
	const auto &h = in.hourly.at(SeriesKey{"A", "irradiance"});
	CHECK(h.n_days() == 1);
	CHECK(h.at(0, 7).value == 100.0);
	CHECK(h.at(0, 8).is_missing());
	CHECK(in.n_duplicates == 1);
	CHECK(in.n_dropped_incomplete >= 1);
	CHECK(in.n_malformed >= 1);
	CHECK(in.daily.count(SeriesKey{"A", "tmax"}) == 1);
}

TEST_CASE("bad header is a data error") {
	std::stringstream io("a,b,c\n1,2,3\n");
	CHECK_THROWS_AS(ingest_csv(io), DataError);
}

TEST_CASE("one complete day and an empty file") {
	std::stringstream io;
	io << "station,variable,timestamp,value\n";
	for (int h = 6; h <= 18; ++h) {
		io << "S,irradiance," << format_timestamp(make_date(2006, 5, 1), h) << "," << 10 * h << "\n";
	}
	const auto in = ingest_csv(io);
	const auto &s = in.hourly.at(SeriesKey{"S", "irradiance"});
	CHECK(s.n_days() == 1);
	CHECK(missing_report(s).n_missing == 0);
	CHECK(missing_report(s).pct_missing == 0.0);

	std::stringstream empty;
	const auto none = ingest_csv(empty);
	CHECK(none.hourly.empty());
	CHECK(none.n_dropped_incomplete == 0);
}

TEST_CASE("missing per quarter and single gaps") {
	std::vector<Slot> s(8, Slot::measured(1.0));
	s[0] = s[2] = s[4] = s[6] = Slot::missing();
	const auto r = missing_report(s, 1);
	CHECK(r.missing_per_quarter == std::array<std::size_t, 4>{1, 1, 1, 1});

	const std::vector<Slot> mgm{Slot::measured(1.0), Slot::missing(), Slot::measured(1.0)};
	const auto g = missing_report(mgm, 1);
	CHECK(g.one_size_gap_count == 1);
	CHECK(g.longest_gap == 1);
}
