#include "solarcast/solarcast.hpp"

#include <catch_amalgamated.hpp>

#include <sstream>

using namespace solarcast;
using Catch::Matchers::WithinAbs;
using Catch::Matchers::WithinRel;

namespace {

RunConfig small_config(std::vector<ModelKind> models, std::size_t days = 40, double gaps = 0.1) {
	RunConfig c;
	SynthSpec s;
	s.seed = 5;
	s.n_days = days;
	s.gap_fraction = gaps;
	c.synthetic = s;
	c.station = station_meta(s);
	c.models = std::move(models);
	c.seed = 2;
	return c;
}

} // namespace

TEST_CASE("detrend then retrend gives the irradiance back") {
	SynthSpec s;
	s.seed = 1;
	s.n_days = 30;
	const auto st = synthesize_station(s);
	const auto det = detrend(st.hourly, s.position);
	for (std::size_t d = 0; d < st.hourly.n_days(); ++d) {
		std::vector<double> kc(hours_per_day);
		for (int h = first_hour; h <= last_hour; ++h) {
			const Slot &k = det.kc.at(d, h);
			kc[static_cast<std::size_t>(h - first_hour)] = k.has_value() ? k.value : 0.7;
		}
		const auto r = retrend(kc, s.position, st.hourly.date_of(d));
		double sum = 0.0;
		for (int h = first_hour; h <= last_hour; ++h) {
			const double want = st.hourly.at(d, h).value;
			CHECK_THAT(r.hourly[static_cast<std::size_t>(h - first_hour)], WithinAbs(want, 1e-9));
			sum += r.hourly[static_cast<std::size_t>(h - first_hour)];
		}
		CHECK_THAT(r.insolation, WithinAbs(sum, 1e-9));
	}
}

TEST_CASE("daily detrend and retrend are inverse") {
	const GeoPosition pos{1.41, -78.28, 512.0};
	const Date date = make_date(2006, 4, 2);
	const double clear = daily_clear_sky_insolation(pos, day_of_year(date));
	CHECK_THAT(retrend_daily(0.6, pos, date), WithinRel(0.6 * clear, 1e-14));
}

TEST_CASE("ARIMA(0,1,0) without intercept repeats the last value") {
	auto c = small_config({ModelKind::ARIMA});
	c.arima_order = ArimaOrder{0, 1, 0};
	c.arima_intercept = false;
	c.window_days = 1;
	const auto r = run_prequential(c);
	const auto &rec = r.model(ModelKind::ARIMA).records;
	for (std::size_t i = 13; i < rec.size(); ++i) {
		REQUIRE(rec[i].kc_pred == rec[(i / 13) * 13 - 1].kc_obs);
	}

	// one value per day: this is the day-over-day persistence baseline itself
	c.track = Track::DailyInsolation;
	c.synthetic->n_days = 80;
	c.station = station_meta(*c.synthetic);
	const auto d = run_prequential(c);
	const auto &m = d.model(ModelKind::ARIMA);
	CHECK(m.kc.complete.mae == m.persistence_kc_mae);
	CHECK_FALSE(m.beats_persistence);
}

TEST_CASE("prequential bookkeeping") {
	auto c = small_config({ModelKind::SLFNN}, 30);
	const auto r = run_prequential(c);
	CHECK(r.first_target_day == 10);
	CHECK(r.n_steps == 20);
	const auto &m = r.model(ModelKind::SLFNN);
	CHECK(m.records.size() == 20 * 13);
	CHECK(m.records.front().day == 10);
	CHECK(m.train_steps == 20 - 9);  // training starts once ten pairs exist
	CHECK(r.qc);
	CHECK(r.qc->reconciles());
}

TEST_CASE("daily track runs with one value per day") {
	auto c = small_config({ModelKind::ARIMA, ModelKind::SLFNN}, 120, 0.2);
	c.track = Track::DailyInsolation;
	const auto r = run_prequential(c);
	const auto &m = r.model(ModelKind::SLFNN);
	CHECK(m.records.size() == 110);
	CHECK(m.records.front().hour == -1);
	CHECK(r.imputation.temp_model);
}

TEST_CASE("report CSV has one row per model, scope and statistic") {
	const auto r = run_prequential(small_config({ModelKind::ARIMA, ModelKind::LSTM}));
	std::stringstream out;
	write_report_csv(out, r);
	std::string line;
	std::getline(out, line);
	CHECK(line == "model,unit,scope,stat,value");
	std::size_t rows = 0;
	std::set<std::string> scopes;
	while (std::getline(out, line)) {
		++rows;
		const auto f = detail::split(line, ',');
		scopes.insert(std::string(f[2]));
	}
	CHECK(scopes == std::set<std::string>{"complete", "Q1", "Q2", "Q3", "Q4"});
	// per model and scope: kc mae,rmse,mbe,n and physical mae,rmse,mbe,mape,mpe,n
	CHECK(rows == 2 * 5 * (4 + 6));
	const auto j = report_json(r);
	CHECK(j.at("models").size() == 2);
}

TEST_CASE("forecast CSV layout") {
	const auto r = run_prequential(small_config({ModelKind::ARIMA}, 30));
	std::stringstream out;
	write_forecasts_csv(out, r);
	std::string line;
	std::getline(out, line);
	CHECK(line == "date,hour,model,kc_pred,phys_pred,observed,provenance");
	std::getline(out, line);
	CHECK(line.rfind(format_date(r.models[0].records[0].date) + ",6,ARIMA,", 0) == 0);
}

TEST_CASE("config parsing") {
	const auto j = json::parse(R"({
		"station": {"code": "M0001", "latitude": -0.2, "longitude": -78.5, "altitude": 2800},
		"track": "daily", "models": ["ARIMA", "LSTM"], "window_days": 7, "seed": 4,
		"imputation": {"temp_model": "hs"}, "arima": {"order": [2, 1, 1], "intercept": false},
		"input": {"daily_csv": "d.csv"}, "output": {"dir": "out"}
	})");
	const auto c = parse_run_config(j);
	CHECK(c.station.code == "M0001");
	CHECK(c.track == Track::DailyInsolation);
	CHECK(c.models == std::vector<ModelKind>{ModelKind::ARIMA, ModelKind::LSTM});
	CHECK(c.window_days == 7);
	CHECK(c.temp_model == TempModel::HargreavesSamani);
	REQUIRE(c.arima_order);
	CHECK(*c.arima_order == ArimaOrder{2, 1, 1});
	CHECK_FALSE(c.arima_intercept);
	CHECK(c.daily_csv == "d.csv");
	CHECK(c.out_dir == "out");
	CHECK_THROWS(parse_run_config(json::parse(R"({"models": ["ARIMA"]})")));
}

TEST_CASE("detrending examples") {
	const GeoPosition pos{1.41, -78.28, 512.0};
	const Date date = make_date(2006, 2, 10);
	const int doy = day_of_year(date);
	HourlySeries clear(date, 1, HourlyUnit::Irradiance), dark(date, 1, HourlyUnit::Irradiance);
	for (int h = first_hour; h <= last_hour; ++h) {
		clear.at(0, h) = Slot::measured(clear_sky_irradiance_or_zero(solar_position(pos, doy, h)));
		dark.at(0, h) = Slot::measured(0.0);
	}
	const auto k1 = detrend(clear, pos).kc;
	const auto k0 = detrend(dark, pos).kc;
	for (int h = first_hour; h <= last_hour; ++h) {
		if (k1.at(0, h).has_value()) {
			CHECK_THAT(k1.at(0, h).value, WithinAbs(1.0, 1e-15));
			CHECK(k0.at(0, h).value == 0.0);
		}
	}

	const std::vector<double> ones(13, 1.0), halves(13, 0.5), negative(13, -0.3);
	const auto r1 = retrend(ones, pos, date);
	for (int h = first_hour; h <= last_hour; ++h) {
		CHECK(r1.hourly[static_cast<std::size_t>(h - first_hour)] == clear.at(0, h).value);
	}
	CHECK_THAT(retrend(halves, pos, date).insolation, WithinRel(0.5 * daily_clear_sky_insolation(pos, doy), 1e-12));
	for (double v : retrend(negative, pos, date).hourly) {
		CHECK(v == 0.0);
	}
	CHECK(retrend_daily(-0.2, pos, date) == 0.0);
}

namespace {

PreparedSeries hand_prepared(std::size_t days, Provenance prov) {
	PreparedSeries p;
	p.start = make_date(2006, 1, 1);
	p.n_days = days;
	p.values_per_day = 1;
	for (std::size_t d = 0; d < days; ++d) {
		p.detrended.push_back(0.5 + 0.01 * static_cast<double>(d % 4));
		p.provenance.push_back(prov);
		p.observed_physical.push_back(4000.0);
	}
	return p;
}

} // namespace

TEST_CASE("an 11-day series gives exactly one evaluation step") {
	RunConfig c;
	c.station = station_meta(SynthSpec{});
	c.track = Track::DailyInsolation;
	c.models = {ModelKind::SLFNN};
	const auto r = run_prequential(c, hand_prepared(11, Provenance::Measured));
	CHECK(r.n_steps == 1);
	CHECK(r.model(ModelKind::SLFNN).records.size() == 1);
	CHECK_THROWS_AS(run_prequential(c, hand_prepared(10, Provenance::Measured)), DataError);
	CHECK_THROWS_AS(run_prequential(c, hand_prepared(20, Provenance::Imputed)), DataError);
}

TEST_CASE("daily totals equal the summed hourly forecasts") {
	const auto r = run_prequential(small_config({ModelKind::ARIMA, ModelKind::LSTM}, 30));
	for (const auto &m : r.models) {
		REQUIRE(m.daily_phys_pred.size() * 13 == m.records.size());
		for (std::size_t d = 0; d < m.daily_phys_pred.size(); ++d) {
			double sum = 0.0;
			for (std::size_t k = 0; k < 13; ++k) {
				sum += m.records[d * 13 + k].phys_pred;
			}
			CHECK_THAT(m.daily_phys_pred[d], WithinAbs(sum, 1e-9));
		}
	}
}

TEST_CASE("reports are identical across runs apart from runtime") {
	const auto c = small_config({ModelKind::ARIMA, ModelKind::SLFNN, ModelKind::MLFNN, ModelKind::LSTM}, 35);
	const auto a = run_prequential(c);
	const auto b = run_prequential(c);
	CHECK(report_json(a, false).dump() == report_json(b, false).dump());
}

TEST_CASE("synthetic station determinism") {
	SynthSpec s;
	s.seed = 9;
	s.n_days = 40;
	s.gap_fraction = 0.3;
	const auto a = synthesize_station(s);
	const auto b = synthesize_station(s);
	CHECK(a.hourly == b.hourly);
	CHECK(a.daily == b.daily);
	s.gap_fraction = 0.0;
	CHECK(missing_report(synthesize_station(s).hourly).n_missing == 0);
	s.n_days = 29;
	CHECK_THROWS_AS(synthesize_station(s), std::invalid_argument);
}
