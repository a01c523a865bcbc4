#pragma once

// End-to-end flow: quality control -> detrending to clear-sky index ->
// imputation -> prequential (test-then-train) sliding-window forecasting with
// ARIMA and the neural models -> error statistics by quarters.

#include "solarcast/arima.hpp"
#include "solarcast/data_model.hpp"
#include "solarcast/imputation.hpp"
#include "solarcast/metrics.hpp"
#include "solarcast/neural.hpp"
#include "solarcast/quality_control.hpp"
#include "solarcast/solar_geometry.hpp"
#include "solarcast/synthetic.hpp"

#include <algorithm>
#include <chrono>
#include <cmath>
#include <cstddef>
#include <cstdint>
#include <deque>
#include <map>
#include <optional>
#include <span>
#include <stdexcept>
#include <string>
#include <vector>

namespace solarcast {

enum class Track { HourlyIrradiance, DailyInsolation };

inline std::string_view to_string(Track t) { return t == Track::HourlyIrradiance ? "hourly" : "daily"; }

inline Track parse_track(std::string_view s) {
	if (s == "hourly" || s == "HourlyIrradiance") {
		return Track::HourlyIrradiance;
	}
	if (s == "daily" || s == "DailyInsolation") {
		return Track::DailyInsolation;
	}
	throw std::invalid_argument("unknown track: " + std::string(s));
}

enum class ModelKind { ARIMA, SLFNN, MLFNN, LSTM };

inline std::string_view to_string(ModelKind m) {
	switch (m) {
	case ModelKind::ARIMA:
		return "ARIMA";
	case ModelKind::SLFNN:
		return "SL-FNN";
	case ModelKind::MLFNN:
		return "ML-FNN";
	case ModelKind::LSTM:
		return "LSTM";
	}
	return "ARIMA";
}

inline ModelKind parse_model_kind(std::string_view s) {
	if (s == "ARIMA" || s == "arima") {
		return ModelKind::ARIMA;
	}
	switch (parse_net_kind(s)) {
	case NetKind::SLFNN:
		return ModelKind::SLFNN;
	case NetKind::MLFNN:
		return ModelKind::MLFNN;
	case NetKind::LSTM:
		return ModelKind::LSTM;
	}
	return ModelKind::ARIMA;
}

inline NetKind net_kind(ModelKind m) {
	switch (m) {
	case ModelKind::SLFNN:
		return NetKind::SLFNN;
	case ModelKind::MLFNN:
		return NetKind::MLFNN;
	case ModelKind::LSTM:
		return NetKind::LSTM;
	case ModelKind::ARIMA:
		break;
	}
	throw std::logic_error("ARIMA is not a network");
}

struct RunConfig {
	StationMeta station;
	Track track = Track::HourlyIrradiance;
	std::vector<ModelKind> models{ModelKind::ARIMA, ModelKind::SLFNN, ModelKind::MLFNN, ModelKind::LSTM};
	std::size_t window_days = 10;
	std::uint64_t seed = 0;
	TempModel temp_model = TempModel::Logistic;
	double learning_rate = 1e-2;
	std::size_t batch_windows = 10;
	bool lstm_one_step = false;
	std::optional<ArimaOrder> arima_order;  // fixed order instead of the AIC grid search
	bool arima_intercept = true;
	std::string hourly_csv;
	std::string daily_csv;
	std::optional<SynthSpec> synthetic;
	std::string out_dir;

	void validate() const {
		if (window_days < 1) {
			throw std::invalid_argument("window_days must be at least 1");
		}
		if (models.empty()) {
			throw std::invalid_argument("at least one model is required");
		}
		station.validate();
	}
};

// ---------------------------------------------------------------------------
// Detrending

struct HourlyDetrend {
	HourlySeries kc;
	std::size_t n_undefined = 0;  // present slots with no clear-sky irradiance (sun below the horizon)
};

/// kc = I / I_cst per slot; provenance is preserved. Slots where I_cst <= 0
/// become Missing and are counted.
inline HourlyDetrend detrend(const HourlySeries &irradiance, const GeoPosition &pos) {
	if (irradiance.unit() != HourlyUnit::Irradiance) {
		throw std::invalid_argument("detrend expects irradiance units");
	}
	HourlyDetrend out{irradiance, 0};
	out.kc.set_unit(HourlyUnit::ClearSkyIndex);
	for (std::size_t d = 0; d < irradiance.n_days(); ++d) {
		const int doy = day_of_year(irradiance.date_of(d));
		for (int h = first_hour; h <= last_hour; ++h) {
			Slot &s = out.kc.at(d, h);
			if (s.is_missing()) {
				continue;
			}
			const double clear = clear_sky_irradiance_or_zero(solar_position(pos, doy, h));
			if (!(clear > 0.0)) {
				s = Slot::missing();
				++out.n_undefined;
				continue;
			}
			s.value = clear_sky_index(s.value, clear);
		}
	}
	return out;
}

/// Daily ratio H / H_clear with H_clear the clear-sky insolation of the day.
inline DailySeries detrend(const DailySeries &daily, const GeoPosition &pos) {
	DailySeries out = daily;
	out.unit = DailyUnit::ClearSkyRatio;
	for (std::size_t d = 0; d < daily.n_days(); ++d) {
		Slot &s = out.entries[d].insolation;
		if (s.is_missing()) {
			continue;
		}
		const double clear = daily_clear_sky_insolation(pos, day_of_year(daily.date_of(d)));
		if (!(clear > 0.0)) {
			s = Slot::missing();
			continue;
		}
		s.value /= clear;
	}
	return out;
}

struct Retrended {
	std::vector<double> hourly;  // max(0, kc) * I_cst, zero with the sun below the horizon
	double insolation = 0.0;     // sum of the hourly values
};

inline Retrended retrend(std::span<const double> kc_forecast, const GeoPosition &pos, Date date) {
	if (kc_forecast.size() != static_cast<std::size_t>(hours_per_day)) {
		throw std::invalid_argument("retrend expects 13 hourly values");
	}
	Retrended out;
	out.hourly.resize(kc_forecast.size());
	const int doy = day_of_year(date);
	for (int h = first_hour; h <= last_hour; ++h) {
		const auto i = static_cast<std::size_t>(h - first_hour);
		const double clear = clear_sky_irradiance_or_zero(solar_position(pos, doy, h));
		out.hourly[i] = std::max(0.0, kc_forecast[i]) * clear;
		out.insolation += out.hourly[i];
	}
	return out;
}

inline double retrend_daily(double ratio, const GeoPosition &pos, Date date) {
	return std::max(0.0, ratio) * daily_clear_sky_insolation(pos, day_of_year(date));
}

// ---------------------------------------------------------------------------
// Prepared series: one complete detrended value grid plus what is needed to
// score forecasts in physical units.

struct StationData {
	HourlySeries hourly;  // irradiance
	DailySeries daily;
	std::size_t n_incomplete_rows = 0;
};

struct ImputationSummary {
	MissingReport before;
	std::size_t n_imputed = 0;
	std::size_t n_undefined_clear_sky = 0;
	std::size_t n_unfillable_days = 0;  // daily track: filled by carrying the previous ratio forward
	std::optional<TempModelCoeffs> temp_model;
};

struct PreparedSeries {
	Date start;
	std::size_t n_days = 0;
	std::size_t values_per_day = hours_per_day;
	std::vector<double> detrended;  // complete, day-major
	std::vector<Provenance> provenance;
	std::vector<double> observed_physical;  // meaningful where provenance is Measured
	std::optional<QcReport> qc;
	ImputationSummary imputation;
};

inline PreparedSeries prepare_hourly(const HourlySeries &raw, const GeoPosition &pos,
                                     std::size_t n_incomplete_rows = 0) {
	PreparedSeries p;
	auto qc = apply_qc(raw, pos, n_incomplete_rows);
	p.qc = qc.report;
	p.imputation.before = missing_report(qc.series);
	auto det = detrend(qc.series, pos);
	p.imputation.n_undefined_clear_sky = det.n_undefined;
	const auto filled = impute_hourly(det.kc);
	p.start = raw.start_date();
	p.n_days = raw.n_days();
	p.values_per_day = hours_per_day;
	for (std::size_t i = 0; i < filled.size(); ++i) {
		const Slot &s = filled.slots()[i];
		p.detrended.push_back(s.value);
		p.provenance.push_back(s.provenance);
		p.observed_physical.push_back(qc.series.slots()[i].value);
		p.imputation.n_imputed += s.provenance == Provenance::Imputed ? 1 : 0;
	}
	return p;
}

inline std::vector<double> daily_h0(const DailySeries &daily, const GeoPosition &pos) {
	std::vector<double> h0(daily.n_days());
	for (std::size_t d = 0; d < h0.size(); ++d) {
		h0[d] = daily_extraterrestrial_insolation(pos, day_of_year(daily.date_of(d)));
	}
	return h0;
}

/// Daily track: temperature-model imputation in physical units, then the
/// clear-sky ratio. Days the model cannot fill carry the previous ratio
/// forward (1.0 on the first day).
inline PreparedSeries prepare_daily(const DailySeries &raw, const GeoPosition &pos, TempModel model) {
	PreparedSeries p;
	p.start = raw.start_date;
	p.n_days = raw.n_days();
	p.values_per_day = 1;
	p.imputation.before = missing_report(raw);
	const auto h0 = daily_h0(raw, pos);
	DailySeries filled = raw;
	try {
		const auto fit = fit_temp_model(raw, h0, model);
		p.imputation.temp_model = fit.coeffs;
		auto imp = impute_daily(raw, fit.coeffs, h0);
		filled = std::move(imp.series);
		p.imputation.n_imputed = imp.n_imputed;
	} catch (const DataError &) {
		// too few complete days to fit: everything missing is carried forward
	}
	const auto ratio = detrend(filled, pos);
	double last = 1.0;
	for (std::size_t d = 0; d < p.n_days; ++d) {
		Slot s = ratio.entries[d].insolation;
		if (s.is_missing()) {
			s = Slot::imputed(last);
			++p.imputation.n_unfillable_days;
			++p.imputation.n_imputed;
		}
		last = s.value;
		p.detrended.push_back(s.value);
		p.provenance.push_back(s.provenance);
		p.observed_physical.push_back(raw.entries[d].insolation.value);
	}
	return p;
}

// ---------------------------------------------------------------------------
// Prequential run

struct ForecastRecord {
	std::size_t day = 0;  // target day index
	Date date;
	int hour = -1;  // -1 on the daily track
	double kc_pred = 0.0;
	double phys_pred = 0.0;
	double kc_obs = 0.0;
	double phys_obs = 0.0;
	Provenance provenance = Provenance::Missing;
};

struct ModelReport {
	ModelKind model = ModelKind::ARIMA;
	QuarterStats kc;
	QuarterStats physical;
	double persistence_kc_mae = 0.0;
	bool beats_persistence = false;
	bool diverged = false;
	std::optional<std::size_t> diverged_at_step;
	std::size_t train_steps = 0;
	std::vector<ForecastRecord> records;
	std::vector<double> daily_phys_pred;  // per evaluated day; hourly track: sum of the 13 retrended values
};

struct RunReport {
	RunConfig config;
	std::size_t n_steps = 0;
	std::size_t first_target_day = 0;
	std::optional<QcReport> qc;
	ImputationSummary imputation;
	std::vector<ModelReport> models;
	std::vector<ArimaOrder> arima_orders;  // selected order per step
	std::vector<std::string> events;
	double runtime_seconds = 0.0;

	bool all_diverged() const {
		return !models.empty() &&
		       std::all_of(models.begin(), models.end(), [](const ModelReport &m) { return m.diverged; });
	}
	const ModelReport &model(ModelKind k) const {
		for (const auto &m : models) {
			if (m.model == k) {
				return m;
			}
		}
		throw std::out_of_range("model not in report");
	}
};

/// Per-model statistics from forecast records; only Measured targets count.
inline void score_model(ModelReport &m, std::size_t values_per_day, std::span<const double> persistence_kc) {
	std::vector<double> kp, ko, pp, po;
	Mask mask;
	for (const auto &r : m.records) {
		kp.push_back(r.kc_pred);
		ko.push_back(r.kc_obs);
		pp.push_back(r.phys_pred);
		po.push_back(r.phys_obs);
		mask.push_back(r.provenance == Provenance::Measured ? 1 : 0);
	}
	m.kc = quarter_stats(kp, ko, mask, values_per_day);
	m.physical = quarter_stats(pp, po, mask, values_per_day);
	m.persistence_kc_mae = compute_stats(persistence_kc, ko, mask).mae;
	m.beats_persistence = m.kc.complete.mae < m.persistence_kc_mae;
}

namespace detail {

struct NetState {
	Network net;
	std::deque<std::pair<std::vector<double>, std::vector<double>>> pairs;
	bool frozen = false;
};

} // namespace detail

inline RunReport run_prequential(const RunConfig &config, const PreparedSeries &data) {
	config.validate();
	const auto t0 = std::chrono::steady_clock::now();
	const std::size_t V = data.values_per_day;
	const std::size_t W = config.window_days;
	if (data.n_days < W + 1) {
		throw DataError("series too short: need at least window_days + 1 days");
	}
	const auto &pos = config.station.position;

	RunReport rep;
	rep.config = config;
	rep.qc = data.qc;
	rep.imputation = data.imputation;
	rep.first_target_day = W;
	rep.n_steps = data.n_days - W;

	std::map<ModelKind, detail::NetState> nets;
	for (auto m : config.models) {
		ModelReport mr;
		mr.model = m;
		rep.models.push_back(std::move(mr));
		if (m == ModelKind::ARIMA) {
			continue;
		}
		auto nc = NetConfig::for_window(net_kind(m), W * V, V, config.seed);
		nc.learning_rate = config.learning_rate;
		nc.batch_windows = config.batch_windows;
		nc.lstm_one_step = config.lstm_one_step;
		nets.emplace(m, detail::NetState{Network(nc), {}, false});
	}
	const ArimaGrid grid = config.arima_order ? ArimaGrid::fixed(*config.arima_order) : ArimaGrid{};
	ArimaOptions arima_opt;
	arima_opt.with_intercept = config.arima_intercept;

	std::vector<double> persistence;
	for (std::size_t t = W - 1; t + 1 < data.n_days; ++t) {
		const std::size_t step = t - (W - 1);
		const std::size_t target = t + 1;
		const std::span<const double> window(data.detrended.data() + (t + 1 - W) * V, W * V);
		const std::span<const double> truth(data.detrended.data() + target * V, V);
		const Date date = add_days(data.start, static_cast<long>(target));
		persistence.insert(persistence.end(), window.end() - static_cast<std::ptrdiff_t>(V), window.end());

		for (auto &mr : rep.models) {
			std::vector<double> pred;
			if (mr.model == ModelKind::ARIMA) {
				try {
					const auto sel = select_order(window, grid, arima_opt);
					rep.arima_orders.push_back(sel.best.order);
					pred = forecast(sel.best, window, V);
				} catch (const DataError &e) {
					rep.events.push_back("ARIMA step " + std::to_string(step) + ": " + e.what() +
					                     "; persistence used");
					pred.assign(window.end() - static_cast<std::ptrdiff_t>(V), window.end());
				}
			} else {
				pred = forward(nets.at(mr.model).net, window);
			}
			std::vector<double> phys(V);
			double daily_total = 0.0;
			if (V == static_cast<std::size_t>(hours_per_day)) {
				const auto r = retrend(pred, pos, date);
				phys = r.hourly;
				daily_total = r.insolation;
			} else {
				phys[0] = retrend_daily(pred[0], pos, date);
				daily_total = phys[0];
			}
			mr.daily_phys_pred.push_back(daily_total);
			for (std::size_t k = 0; k < V; ++k) {
				ForecastRecord rec;
				rec.day = target;
				rec.date = date;
				rec.hour = V == 1 ? -1 : first_hour + static_cast<int>(k);
				rec.kc_pred = pred[k];
				rec.phys_pred = phys[k];
				rec.kc_obs = truth[k];
				rec.phys_obs = data.observed_physical[target * V + k];
				rec.provenance = data.provenance[target * V + k];
				mr.records.push_back(rec);
			}
		}

		// train after scoring: the pair (window, next day) is now known
		for (auto &mr : rep.models) {
			if (mr.model == ModelKind::ARIMA) {
				continue;
			}
			auto &ns = nets.at(mr.model);
			ns.pairs.emplace_back(std::vector<double>(window.begin(), window.end()),
			                      std::vector<double>(truth.begin(), truth.end()));
			const std::size_t batch = ns.net.config().batch_windows;
			while (ns.pairs.size() > batch) {
				ns.pairs.pop_front();
			}
			if (ns.frozen || ns.pairs.size() < batch) {
				continue;
			}
			Matrix inputs(static_cast<Eigen::Index>(W * V), static_cast<Eigen::Index>(batch));
			Matrix targets(static_cast<Eigen::Index>(V), static_cast<Eigen::Index>(batch));
			for (std::size_t b = 0; b < batch; ++b) {
				inputs.col(static_cast<Eigen::Index>(b)) = Network::column(ns.pairs[b].first);
				targets.col(static_cast<Eigen::Index>(b)) = Network::column(ns.pairs[b].second);
			}
			const auto res = train_step(ns.net, inputs, targets);
			if (res.diverged) {
				ns.frozen = true;
				mr.diverged = true;
				mr.diverged_at_step = step;
				rep.events.push_back(std::string(to_string(mr.model)) + " diverged at step " + std::to_string(step) +
				                     "; parameters frozen");
			}
			mr.train_steps = ns.net.step_count();
		}
	}

	for (auto &mr : rep.models) {
		score_model(mr, V, persistence);
		if (mr.model != ModelKind::ARIMA && !mr.beats_persistence) {
			rep.events.push_back(std::string(to_string(mr.model)) + " does not beat the persistence baseline (kc MAE)");
		}
	}
	rep.runtime_seconds = std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
	return rep;
}

inline PreparedSeries prepare(const RunConfig &config, const StationData &data) {
	return config.track == Track::HourlyIrradiance
	           ? prepare_hourly(data.hourly, config.station.position, data.n_incomplete_rows)
	           : prepare_daily(data.daily, config.station.position, config.temp_model);
}

inline StationData station_data(const SyntheticStation &st) { return {st.hourly, st.daily, 0}; }

/// Loads the configured input (CSV files or a synthetic station).
inline StationData load_station_data(const RunConfig &config) {
	if (config.synthetic) {
		return station_data(synthesize_station(*config.synthetic));
	}
	StationData out;
	const auto &code = config.station.code;
	if (!config.hourly_csv.empty()) {
		const auto in = ingest_csv(config.hourly_csv);
		out.n_incomplete_rows = in.n_dropped_incomplete;
		const auto it = in.hourly.find(SeriesKey{code, "irradiance"});
		if (it == in.hourly.end()) {
			throw DataError("no hourly irradiance records for station " + code);
		}
		out.hourly = it->second;
	}
	if (!config.daily_csv.empty()) {
		out.daily = assemble_daily(ingest_csv(config.daily_csv), code);
	}
	if (config.track == Track::HourlyIrradiance && out.hourly.empty()) {
		throw DataError("hourly track requires hourly_csv");
	}
	if (config.track == Track::DailyInsolation && out.daily.entries.empty()) {
		throw DataError("daily track requires daily_csv");
	}
	return out;
}

inline RunReport run_prequential(const RunConfig &config) {
	const auto data = load_station_data(config);
	return run_prequential(config, prepare(config, data));
}

} // namespace solarcast
