#pragma once

// JSON run configuration and report emission (report.json, report.csv,
// forecasts.csv, QC report).

#include "solarcast/pipeline.hpp"

#include <json.hpp>

#include <cstddef>
#include <fstream>
#include <optional>
#include <ostream>
#include <sstream>
#include <string>

namespace solarcast {

using nlohmann::json;

// ---------------------------------------------------------------------------
// Config

inline StationMeta parse_station(const json &j) {
	StationMeta s;
	s.code = j.at("code").get<std::string>();
	s.name = j.value("name", s.code);
	s.position.latitude_deg = j.at("latitude").get<double>();
	s.position.longitude_deg = j.at("longitude").get<double>();
	s.position.altitude_m = j.value("altitude", 0.0);
	s.region = parse_region(j.value("region", std::string("Pacific")));
	if (j.contains("start")) {
		const auto d = parse_date(j.at("start").get<std::string>());
		if (!d) {
			throw std::invalid_argument("station.start is not a YYYY-MM-DD date");
		}
		s.start_date = *d;
	}
	s.end_date = s.start_date;
	if (j.contains("end")) {
		const auto d = parse_date(j.at("end").get<std::string>());
		if (!d) {
			throw std::invalid_argument("station.end is not a YYYY-MM-DD date");
		}
		s.end_date = *d;
	}
	return s;
}

inline json station_json(const StationMeta &s) {
	return {{"code", s.code},
	        {"name", s.name},
	        {"latitude", s.position.latitude_deg},
	        {"longitude", s.position.longitude_deg},
	        {"altitude", s.position.altitude_m},
	        {"region", to_string(s.region)},
	        {"start", format_date(s.start_date)},
	        {"end", format_date(s.end_date)}};
}

/// Accepts either "regime": "<day class>" (single regime) or
/// "regime_mix": [5 weights].
inline SynthSpec parse_synth(const json &j) {
	SynthSpec s;
	s.seed = j.value("seed", s.seed);
	s.n_days = j.value("n_days", s.n_days);
	s.gap_fraction = j.value("gap_fraction", s.gap_fraction);
	s.ar_coefficient = j.value("ar_coefficient", s.ar_coefficient);
	s.noise_sd = j.value("noise_sd", s.noise_sd);
	s.regime_persistence = j.value("regime_persistence", s.regime_persistence);
	s.position.latitude_deg = j.value("latitude", s.position.latitude_deg);
	s.position.longitude_deg = j.value("longitude", s.position.longitude_deg);
	s.position.altitude_m = j.value("altitude", s.position.altitude_m);
	if (j.contains("regime")) {
		s.regime_mix.fill(0.0);
		s.regime_mix[static_cast<std::size_t>(parse_day_class(j.at("regime").get<std::string>()))] = 1.0;
	} else if (j.contains("regime_mix")) {
		const auto mix = j.at("regime_mix").get<std::vector<double>>();
		if (mix.size() != 5) {
			throw std::invalid_argument("regime_mix needs 5 weights");
		}
		std::copy(mix.begin(), mix.end(), s.regime_mix.begin());
	}
	if (j.contains("start")) {
		const auto d = parse_date(j.at("start").get<std::string>());
		if (!d) {
			throw std::invalid_argument("synthetic.start is not a YYYY-MM-DD date");
		}
		s.start = *d;
	}
	s.code = j.value("code", s.code);
	s.name = j.value("name", s.name);
	return s;
}

inline RunConfig parse_run_config(const json &j) {
	RunConfig c;
	if (j.contains("synthetic")) {
		c.synthetic = parse_synth(j.at("synthetic"));
	}
	if (j.contains("station")) {
		c.station = parse_station(j.at("station"));
	} else if (c.synthetic) {
		c.station = station_meta(*c.synthetic);
	} else {
		throw std::invalid_argument("config needs a station or a synthetic section");
	}
	if (c.synthetic) {
		c.synthetic->position = c.station.position;
		c.synthetic->code = c.station.code;
	}
	c.track = parse_track(j.value("track", std::string("hourly")));
	if (j.contains("models")) {
		c.models.clear();
		for (const auto &m : j.at("models")) {
			c.models.push_back(parse_model_kind(m.get<std::string>()));
		}
	}
	c.window_days = j.value("window_days", c.window_days);
	c.seed = j.value("seed", c.seed);
	c.learning_rate = j.value("learning_rate", c.learning_rate);
	c.batch_windows = j.value("batch_windows", c.batch_windows);
	c.lstm_one_step = j.value("lstm_one_step", c.lstm_one_step);
	if (j.contains("imputation")) {
		c.temp_model = parse_temp_model(j.at("imputation").value("temp_model", std::string("logistic")));
	}
	if (j.contains("arima")) {
		const auto &a = j.at("arima");
		if (a.contains("order")) {
			const auto o = a.at("order").get<std::vector<int>>();
			if (o.size() != 3) {
				throw std::invalid_argument("arima.order needs [p, d, q]");
			}
			c.arima_order = ArimaOrder{o[0], o[1], o[2]};
		}
		c.arima_intercept = a.value("intercept", c.arima_intercept);
	}
	if (j.contains("input")) {
		const auto &in = j.at("input");
		c.hourly_csv = in.value("hourly_csv", std::string());
		c.daily_csv = in.value("daily_csv", std::string());
	}
	if (j.contains("output")) {
		c.out_dir = j.at("output").value("dir", std::string());
	}
	c.validate();
	return c;
}

inline RunConfig load_run_config(const std::string &path) {
	std::ifstream in(path);
	if (!in) {
		throw DataError("cannot read config " + path);
	}
	return parse_run_config(json::parse(in));
}

inline json config_json(const RunConfig &c) {
	json models = json::array();
	for (auto m : c.models) {
		models.push_back(std::string(to_string(m)));
	}
	json j = {{"station", station_json(c.station)},
	          {"track", std::string(to_string(c.track))},
	          {"models", models},
	          {"window_days", c.window_days},
	          {"seed", c.seed},
	          {"learning_rate", c.learning_rate},
	          {"batch_windows", c.batch_windows},
	          {"lstm_one_step", c.lstm_one_step},
	          {"imputation", {{"temp_model", std::string(to_string(c.temp_model))}}},
	          {"arima", {{"intercept", c.arima_intercept}}}};
	if (c.arima_order) {
		j["arima"]["order"] = {c.arima_order->p, c.arima_order->d, c.arima_order->q};
	}
	if (c.synthetic) {
		const auto &s = *c.synthetic;
		j["synthetic"] = {{"seed", s.seed},
		                  {"n_days", s.n_days},
		                  {"gap_fraction", s.gap_fraction},
		                  {"regime_mix", s.regime_mix},
		                  {"ar_coefficient", s.ar_coefficient},
		                  {"noise_sd", s.noise_sd},
		                  {"regime_persistence", s.regime_persistence},
		                  {"start", format_date(s.start)}};
	} else {
		j["input"] = {{"hourly_csv", c.hourly_csv}, {"daily_csv", c.daily_csv}};
	}
	return j;
}

// ---------------------------------------------------------------------------
// Reports

inline json qc_json(const QcReport &r) {
	return {{"n_input", r.n_input},
	        {"n_dropped_incomplete", r.n_dropped_incomplete},
	        {"n_dropped_above_upper", r.n_dropped_above_upper},
	        {"n_dropped_below_lower", r.n_dropped_below_lower},
	        {"n_retained", r.n_retained}};
}

inline json missing_json(const MissingReport &r) {
	return {{"n_total", r.n_total},
	        {"n_measured", r.n_measured},
	        {"n_imputed", r.n_imputed},
	        {"n_missing", r.n_missing},
	        {"pct_missing", r.pct_missing},
	        {"missing_per_quarter", r.missing_per_quarter},
	        {"longest_gap", r.longest_gap},
	        {"one_size_gap_count", r.one_size_gap_count},
	        {"long_gap_count", r.long_gap_count}};
}

inline json stats_json(const std::optional<ErrorStats> &s) {
	if (!s) {
		return nullptr;
	}
	json j = {{"mae", s->mae}, {"rmse", s->rmse}, {"mbe", s->mbe}, {"n", s->n}};
	j["mape_pct"] = s->mape_pct ? json(*s->mape_pct) : json(nullptr);
	j["mpe_pct"] = s->mpe_pct ? json(*s->mpe_pct) : json(nullptr);
	j["n_pct_excluded"] = s->n_pct_excluded;
	return j;
}

inline json quarter_json(const QuarterStats &q) {
	json j = {{"complete", stats_json(q.complete)}};
	for (std::size_t i = 0; i < 4; ++i) {
		j["Q" + std::to_string(i + 1)] = stats_json(q.quarters[i]);
	}
	return j;
}

inline json report_json(const RunReport &r, bool include_runtime = true) {
	json models = json::object();
	for (const auto &m : r.models) {
		json mj = {{"kc", quarter_json(m.kc)},
		           {"physical", quarter_json(m.physical)},
		           {"persistence_kc_mae", m.persistence_kc_mae},
		           {"beats_persistence", m.beats_persistence},
		           {"diverged", m.diverged},
		           {"train_steps", m.train_steps}};
		if (m.diverged_at_step) {
			mj["diverged_at_step"] = *m.diverged_at_step;
		}
		if (m.model != ModelKind::ARIMA && !m.beats_persistence) {
			mj["flag"] = "does_not_beat_persistence";
		}
		models[std::string(to_string(m.model))] = mj;
	}
	std::map<std::string, std::size_t> histogram;
	json per_step = json::array();
	for (const auto &o : r.arima_orders) {
		++histogram[o.str()];
		per_step.push_back(o.str());
	}
	json imputation = {{"before", missing_json(r.imputation.before)},
	                   {"n_imputed", r.imputation.n_imputed},
	                   {"n_undefined_clear_sky", r.imputation.n_undefined_clear_sky},
	                   {"n_unfillable_days", r.imputation.n_unfillable_days}};
	if (r.imputation.temp_model) {
		imputation["temp_model"] = {{"model", std::string(to_string(r.imputation.temp_model->model))},
		                            {"a", r.imputation.temp_model->a},
		                            {"b", r.imputation.temp_model->b}};
	}
	json j = {{"config", config_json(r.config)},
	          {"n_steps", r.n_steps},
	          {"models", models},
	          {"imputation", imputation},
	          {"arima_orders", {{"histogram", histogram}, {"per_step", per_step}}},
	          {"events", r.events},
	          {"initialization", "weights uniform(+-1/sqrt(fan_in)), biases 0, LSTM forget-gate bias 1"}};
	if (r.qc) {
		j["qc"] = qc_json(*r.qc);
	}
	if (include_runtime) {
		j["runtime_seconds"] = r.runtime_seconds;
	}
	return j;
}

/// One row per model x unit x scope x statistic. Percentage errors are
/// reported on the physical scale only.
inline void write_report_csv(std::ostream &out, const RunReport &r) {
	out << "model,unit,scope,stat,value\n";
	const auto value = [](const std::optional<double> &v) { return v ? detail::format_double(*v) : "NA"; };
	for (const auto &m : r.models) {
		for (const char *unit : {"kc", "physical"}) {
			const QuarterStats &q = std::string_view(unit) == "kc" ? m.kc : m.physical;
			for (std::size_t scope = 0; scope < 5; ++scope) {
				const std::optional<ErrorStats> s = scope == 0 ? std::optional<ErrorStats>(q.complete) : q.quarters[scope - 1];
				const std::string scope_name = scope == 0 ? "complete" : "Q" + std::to_string(scope);
				const auto row = [&](const char *stat, const std::string &v) {
					out << to_string(m.model) << ',' << unit << ',' << scope_name << ',' << stat << ',' << v << '\n';
				};
				row("mae", value(s ? std::optional(s->mae) : std::nullopt));
				row("rmse", value(s ? std::optional(s->rmse) : std::nullopt));
				row("mbe", value(s ? std::optional(s->mbe) : std::nullopt));
				if (std::string_view(unit) == "physical") {
					row("mape_pct", value(s ? s->mape_pct : std::nullopt));
					row("mpe_pct", value(s ? s->mpe_pct : std::nullopt));
				}
				row("n", s ? std::to_string(s->n) : "0");
			}
		}
	}
}

inline void write_forecasts_csv(std::ostream &out, const RunReport &r) {
	out << "date,hour,model,kc_pred,phys_pred,observed,provenance\n";
	for (const auto &m : r.models) {
		for (const auto &rec : m.records) {
			out << format_date(rec.date) << ',' << (rec.hour >= 0 ? std::to_string(rec.hour) : "") << ','
			    << to_string(m.model) << ',' << detail::format_double(rec.kc_pred) << ','
			    << detail::format_double(rec.phys_pred) << ','
			    << (rec.provenance == Provenance::Measured ? detail::format_double(rec.phys_obs) : "") << ','
			    << to_string(rec.provenance) << '\n';
		}
	}
}

} // namespace solarcast
