// forecast: command-line front end for the solarcast pipeline.
//
//   forecast run --config run.json --out outdir
//   forecast qc --input hourly.csv --station station.json [--output qc.csv] [--qc-report qc.json]
//   forecast impute --input file.csv --station station.json --impute hourly|daily
//                   [--temp-model hs|logistic] [--mask-eval f] [--seed n] [--output out.csv]
//   forecast synth --out-dir dir [--seed n] [--days n] [--gap-fraction f] [--regime cloudy|...]
//   forecast gradcheck [--model slfnn|mlfnn|lstm] [--instances n] [--seed n]
//
// Exit codes: 0 success, 1 usage/internal error, 2 data error, 3 every model diverged.

#include "solarcast/solarcast.hpp"

#include <CLI11.hpp>

#include <filesystem>
#include <fstream>
#include <iostream>
#include <random>
#include <string>

namespace fs = std::filesystem;
using namespace solarcast;

namespace {

constexpr int exit_data_error = 2;
constexpr int exit_all_diverged = 3;

std::ofstream open_out(const fs::path &p) {
	std::ofstream out(p);
	if (!out) {
		throw DataError("cannot write " + p.string());
	}
	return out;
}

StationMeta load_station(const std::string &path) {
	std::ifstream in(path);
	if (!in) {
		throw DataError("cannot read station file " + path);
	}
	auto s = parse_station(json::parse(in));
	s.validate();
	return s;
}

void print_warnings(const IngestResult &in) {
	for (const auto &w : in.warnings) {
		std::cerr << "warning: " << w << '\n';
	}
	if (in.n_malformed > 0) {
		std::cerr << "warning: skipped " << in.n_malformed << " malformed rows\n";
	}
	if (in.n_dropped_incomplete > 0) {
		std::cerr << "warning: dropped " << in.n_dropped_incomplete << " incomplete rows\n";
	}
}

int cmd_run(const std::string &config_path, const std::string &out_dir) {
	auto config = load_run_config(config_path);
	if (!out_dir.empty()) {
		config.out_dir = out_dir;
	}
	if (config.out_dir.empty()) {
		throw std::invalid_argument("no output directory (--out or output.dir)");
	}
	const auto report = run_prequential(config);
	const fs::path dir(config.out_dir);
	fs::create_directories(dir);
	open_out(dir / "report.json") << report_json(report).dump(2) << '\n';
	{
		auto out = open_out(dir / "report.csv");
		write_report_csv(out, report);
	}
	{
		auto out = open_out(dir / "forecasts.csv");
		write_forecasts_csv(out, report);
	}
	for (const auto &e : report.events) {
		std::cerr << "note: " << e << '\n';
	}
	for (const auto &m : report.models) {
		std::cout << to_string(m.model) << ": kc MAE " << m.kc.complete.mae << ", RMSE " << m.kc.complete.rmse
		          << ", MBE " << m.kc.complete.mbe << " (n=" << m.kc.complete.n << ")\n";
	}
	return report.all_diverged() ? exit_all_diverged : 0;
}

int cmd_qc(const std::string &input, const std::string &station_path, const std::string &output,
           const std::string &qc_report) {
	const auto station = load_station(station_path);
	const auto data = ingest_csv(input);
	print_warnings(data);
	const auto it = data.hourly.find(SeriesKey{station.code, "irradiance"});
	if (it == data.hourly.end()) {
		throw DataError("no hourly irradiance records for station " + station.code);
	}
	const auto result = apply_qc(it->second, station.position, data.n_dropped_incomplete);
	const auto report = qc_json(result.report);
	if (!qc_report.empty()) {
		open_out(qc_report) << report.dump(2) << '\n';
	} else {
		std::cout << report.dump(2) << '\n';
	}
	if (!output.empty()) {
		auto out = open_out(output);
		write_csv_header(out);
		write_hourly_csv(out, station.code, "irradiance", result.series);
	}
	return 0;
}

int cmd_impute(const std::string &input, const std::string &station_path, const std::string &mode,
               const std::string &temp_model, double mask_eval, std::uint64_t seed, const std::string &output) {
	const auto station = load_station(station_path);
	const auto data = ingest_csv(input);
	print_warnings(data);
	json summary;
	if (mode == "hourly") {
		HourlySeries kc;
		if (const auto it = data.hourly.find(SeriesKey{station.code, "kc"}); it != data.hourly.end()) {
			kc = it->second;
		} else if (const auto raw = data.hourly.find(SeriesKey{station.code, "irradiance"}); raw != data.hourly.end()) {
			const auto qc = apply_qc(raw->second, station.position, data.n_dropped_incomplete);
			summary["qc"] = qc_json(qc.report);
			kc = detrend(qc.series, station.position).kc;
		} else {
			throw DataError("no hourly kc or irradiance records for station " + station.code);
		}
		summary["missing_before"] = missing_json(missing_report(kc));
		if (mask_eval > 0.0) {
			summary["mask_eval"] = stats_json(evaluate_imputation(kc, mask_eval, seed));
		}
		const auto filled = impute_hourly(kc);
		if (!output.empty()) {
			auto out = open_out(output);
			write_csv_header(out);
			write_hourly_csv(out, station.code, "kc", filled);
		}
	} else if (mode == "daily") {
		const auto daily = assemble_daily(data, station.code);
		const auto h0 = daily_h0(daily, station.position);
		const auto model = parse_temp_model(temp_model);
		summary["missing_before"] = missing_json(missing_report(daily));
		const auto fit = fit_temp_model(daily, h0, model);
		for (const auto &w : fit.warnings) {
			std::cerr << "warning: " << w << '\n';
		}
		summary["temp_model"] = {{"model", std::string(to_string(model))}, {"a", fit.coeffs.a}, {"b", fit.coeffs.b},
		                         {"n_used", fit.n_used}};
		if (mask_eval > 0.0) {
			summary["mask_eval"] = stats_json(evaluate_imputation(daily, h0, mask_eval, seed, model));
		}
		const auto filled = impute_daily(daily, fit.coeffs, h0);
		summary["n_imputed"] = filled.n_imputed;
		summary["unfillable_days"] = filled.unfillable_days.size();
		if (!output.empty()) {
			auto out = open_out(output);
			write_csv_header(out);
			write_daily_csv(out, station.code, filled.series);
		}
	} else {
		throw std::invalid_argument("--impute must be hourly or daily");
	}
	std::cout << summary.dump(2) << '\n';
	return 0;
}

int cmd_synth(const SynthSpec &spec, const std::string &out_dir) {
	const auto st = synthesize_station(spec);
	const fs::path dir(out_dir);
	fs::create_directories(dir);
	{
		auto out = open_out(dir / "hourly.csv");
		write_csv_header(out);
		write_hourly_csv(out, st.meta.code, "irradiance", st.hourly);
	}
	{
		auto out = open_out(dir / "daily.csv");
		write_csv_header(out);
		write_daily_csv(out, st.meta.code, st.daily);
	}
	open_out(dir / "station.json") << station_json(st.meta).dump(2) << '\n';
	std::cout << missing_json(missing_report(st.hourly)).dump(2) << '\n';
	return 0;
}

int cmd_gradcheck(const std::string &model, std::size_t instances, std::uint64_t seed, std::size_t window,
                  std::size_t outputs) {
	const auto kind = parse_net_kind(model);
	std::mt19937_64 rng(seed);
	std::uniform_real_distribution<double> unit(0.05, 1.0);
	double worst = 0.0;
	for (std::size_t k = 0; k < instances; ++k) {
		Network net(NetConfig::for_window(kind, window, outputs, seed + k));
		Matrix x(static_cast<Eigen::Index>(window), 1);
		Matrix t(static_cast<Eigen::Index>(outputs), 1);
		for (auto &v : x.reshaped()) {
			v = unit(rng);
		}
		for (auto &v : t.reshaped()) {
			v = unit(rng);
		}
		worst = std::max(worst, gradient_check(net, x, t));
	}
	std::cout << to_string(kind) << ": max relative gradient error over " << instances << " instances = " << worst
	          << '\n';
	return 0;
}

} // namespace

int main(int argc, char **argv) {
	CLI::App app{"One-day-ahead solar irradiance and insolation forecasting"};
	app.require_subcommand(1);

	std::string config_path, out_dir;
	auto *run = app.add_subcommand("run", "Run the prequential forecasting pipeline");
	run->add_option("--config", config_path, "JSON run configuration")->required();
	run->add_option("--out", out_dir, "Output directory (overrides output.dir)");

	std::string input, station_path, output, qc_report;
	auto *qc = app.add_subcommand("qc", "Apply physical-limit quality control to hourly irradiance");
	qc->add_option("--input", input, "Input CSV")->required();
	qc->add_option("--station", station_path, "Station JSON")->required();
	qc->add_option("--output", output, "Filtered CSV");
	qc->add_option("--qc-report", qc_report, "QC report JSON (stdout if omitted)");

	std::string mode = "hourly", temp_model = "logistic";
	double mask_eval = 0.0;
	std::uint64_t seed = 0;
	auto *imp = app.add_subcommand("impute", "Fill gaps in hourly kc or daily insolation");
	imp->add_option("--input", input, "Input CSV")->required();
	imp->add_option("--station", station_path, "Station JSON")->required();
	imp->add_option("--impute", mode, "hourly or daily")->check(CLI::IsMember({"hourly", "daily"}));
	imp->add_option("--temp-model", temp_model, "hs or logistic")->check(CLI::IsMember({"hs", "logistic"}));
	imp->add_option("--mask-eval", mask_eval, "Hold out this fraction of measured values and score the fill");
	imp->add_option("--seed", seed, "Seed for the holdout mask");
	imp->add_option("--output", output, "Imputed CSV");

	SynthSpec spec;
	std::string regime;
	std::string synth_dir;
	auto *syn = app.add_subcommand("synth", "Generate a synthetic station");
	syn->add_option("--out-dir", synth_dir, "Output directory")->required();
	syn->add_option("--seed", spec.seed);
	syn->add_option("--days", spec.n_days);
	syn->add_option("--gap-fraction", spec.gap_fraction);
	syn->add_option("--regime", regime, "Single cloud regime (default: mixed)");
	syn->add_option("--latitude", spec.position.latitude_deg);
	syn->add_option("--longitude", spec.position.longitude_deg);
	syn->add_option("--altitude", spec.position.altitude_m);
	syn->add_option("--code", spec.code);

	std::string gc_model = "lstm";
	std::size_t instances = 100, gc_window = 10, gc_outputs = 1;
	std::uint64_t gc_seed = 1;
	auto *gc = app.add_subcommand("gradcheck", "Compare analytic and finite-difference gradients");
	gc->add_option("--model", gc_model, "slfnn, mlfnn or lstm");
	gc->add_option("--instances", instances);
	gc->add_option("--seed", gc_seed);
	gc->add_option("--window", gc_window, "Input length (and hidden size)");
	gc->add_option("--outputs", gc_outputs);

	CLI11_PARSE(app, argc, argv);

	try {
		if (run->parsed()) {
			return cmd_run(config_path, out_dir);
		}
		if (qc->parsed()) {
			return cmd_qc(input, station_path, output, qc_report);
		}
		if (imp->parsed()) {
			return cmd_impute(input, station_path, mode, temp_model, mask_eval, seed, output);
		}
		if (syn->parsed()) {
			if (!regime.empty()) {
				spec.regime_mix.fill(0.0);
				spec.regime_mix[static_cast<std::size_t>(parse_day_class(regime))] = 1.0;
			}
			return cmd_synth(spec, synth_dir);
		}
		if (gc->parsed()) {
			return cmd_gradcheck(gc_model, instances, gc_seed, gc_window, gc_outputs);
		}
	} catch (const DataError &e) {
		std::cerr << "data error: " << e.what() << '\n';
		return exit_data_error;
	} catch (const json::exception &e) {
		std::cerr << "config error: " << e.what() << '\n';
		return exit_data_error;
	} catch (const std::exception &e) {
		std::cerr << "error: " << e.what() << '\n';
		return 1;
	}
	return 0;
}
