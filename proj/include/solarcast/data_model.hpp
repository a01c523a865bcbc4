#pragma once

// Station metadata, hourly/daily series containers, CSV ingestion and
// serialization, day classification and missing-value accounting.

#include "solarcast/solar_geometry.hpp"

#include <algorithm>
#include <array>
#include <charconv>
#include <chrono>
#include <cmath>
#include <cstddef>
#include <cstdint>
#include <cstdio>
#include <fstream>
#include <istream>
#include <map>
#include <optional>
#include <ostream>
#include <span>
#include <sstream>
#include <stdexcept>
#include <string>
#include <string_view>
#include <utility>
#include <vector>

namespace solarcast {

/// Raised for malformed or insufficient input data (CLI exit code 2).
class DataError : public std::runtime_error {
public:
	using std::runtime_error::runtime_error;
};

// ---------------------------------------------------------------------------
// Calendar helpers

using Date = std::chrono::year_month_day;

inline Date make_date(int y, unsigned m, unsigned d) {
	return Date{std::chrono::year{y}, std::chrono::month{m}, std::chrono::day{d}};
}

inline Date add_days(Date d, long n) {
	return Date{std::chrono::sys_days{d} + std::chrono::days{n}};
}

/// Signed number of days from `from` to `to`.
inline long days_between(Date from, Date to) {
	return (std::chrono::sys_days{to} - std::chrono::sys_days{from}).count();
}

inline int day_of_year(Date d) {
	const Date jan1{d.year(), std::chrono::January, std::chrono::day{1}};
	return static_cast<int>(days_between(jan1, d)) + 1;
}

inline std::string format_date(Date d) {
	char buf[16];
	std::snprintf(buf, sizeof buf, "%04d-%02u-%02u", static_cast<int>(d.year()), static_cast<unsigned>(d.month()),
	              static_cast<unsigned>(d.day()));
	return buf;
}

inline std::string format_timestamp(Date d, int hour) {
	char buf[16];
	std::snprintf(buf, sizeof buf, "T%02d:00:00", hour);
	return format_date(d) + buf;
}

namespace detail {

inline std::optional<int> parse_fixed_int(std::string_view s) {
	if (s.empty()) {
		return std::nullopt;
	}
	int v = 0;
	auto [ptr, ec] = std::from_chars(s.data(), s.data() + s.size(), v);
	if (ec != std::errc{} || ptr != s.data() + s.size()) {
		return std::nullopt;
	}
	return v;
}

inline std::string_view trim(std::string_view s) {
	while (!s.empty() && (s.front() == ' ' || s.front() == '\t')) {
		s.remove_prefix(1);
	}
	while (!s.empty() && (s.back() == ' ' || s.back() == '\t' || s.back() == '\r' || s.back() == '\n')) {
		s.remove_suffix(1);
	}
	return s;
}

inline std::optional<double> parse_double(std::string_view s) {
	s = trim(s);
	if (s.empty()) {
		return std::nullopt;
	}
	double v = 0.0;
	auto [ptr, ec] = std::from_chars(s.data(), s.data() + s.size(), v);
	if (ec != std::errc{} || ptr != s.data() + s.size() || !std::isfinite(v)) {
		return std::nullopt;
	}
	return v;
}

/// Shortest representation that parses back to the same bits.
inline std::string format_double(double v) {
	char buf[32];
	auto [ptr, ec] = std::to_chars(buf, buf + sizeof buf, v);
	return std::string(buf, ptr);
}

inline std::vector<std::string_view> split(std::string_view line, char sep) {
	std::vector<std::string_view> out;
	std::size_t start = 0;
	while (true) {
		const auto pos = line.find(sep, start);
		if (pos == std::string_view::npos) {
			out.push_back(trim(line.substr(start)));
			break;
		}
		out.push_back(trim(line.substr(start, pos - start)));
		start = pos + 1;
	}
	return out;
}

} // namespace detail

inline std::optional<Date> parse_date(std::string_view s) {
	s = detail::trim(s);
	if (s.size() != 10 || s[4] != '-' || s[7] != '-') {
		return std::nullopt;
	}
	const auto y = detail::parse_fixed_int(s.substr(0, 4));
	const auto m = detail::parse_fixed_int(s.substr(5, 2));
	const auto d = detail::parse_fixed_int(s.substr(8, 2));
	if (!y || !m || !d || *m < 1 || *d < 1) {
		return std::nullopt;
	}
	const Date date = make_date(*y, static_cast<unsigned>(*m), static_cast<unsigned>(*d));
	if (!date.ok()) {
		return std::nullopt;
	}
	return date;
}

struct Timestamp {
	Date date;
	std::optional<int> hour;  // empty for date-only (daily) timestamps
};

/// Accepts `YYYY-MM-DD`, `YYYY-MM-DDTHH[:MM[:SS]]` and the same with a space
/// separator. Minutes and seconds must be zero: records are hourly.
inline std::optional<Timestamp> parse_timestamp(std::string_view s) {
	s = detail::trim(s);
	const auto date = parse_date(s.substr(0, std::min<std::size_t>(s.size(), 10)));
	if (!date) {
		return std::nullopt;
	}
	if (s.size() == 10) {
		return Timestamp{*date, std::nullopt};
	}
	if (s[10] != 'T' && s[10] != ' ') {
		return std::nullopt;
	}
	const auto time = s.substr(11);
	const auto parts = detail::split(time, ':');
	if (parts.empty() || parts.size() > 3 || parts[0].size() != 2) {
		return std::nullopt;
	}
	const auto hour = detail::parse_fixed_int(parts[0]);
	if (!hour || *hour < 0 || *hour > 23) {
		return std::nullopt;
	}
	for (std::size_t i = 1; i < parts.size(); ++i) {
		const auto v = detail::parse_fixed_int(parts[i]);
		if (parts[i].size() != 2 || !v || *v != 0) {
			return std::nullopt;
		}
	}
	return Timestamp{*date, *hour};
}

// ---------------------------------------------------------------------------
// Station metadata

enum class Region { Pacific, Andean, Amazonia };

inline std::string to_string(Region r) {
	switch (r) {
	case Region::Pacific:
		return "Pacific";
	case Region::Andean:
		return "Andean";
	case Region::Amazonia:
		return "Amazonia";
	}
	return "Pacific";
}

inline Region parse_region(std::string_view s) {
	if (s == "Pacific") {
		return Region::Pacific;
	}
	if (s == "Andean") {
		return Region::Andean;
	}
	if (s == "Amazonia") {
		return Region::Amazonia;
	}
	throw std::invalid_argument("unknown region: " + std::string(s));
}

struct StationMeta {
	std::string code;
	std::string name;
	GeoPosition position;
	Region region = Region::Pacific;
	Date start_date = make_date(2000, 1, 1);
	Date end_date = make_date(2000, 1, 1);

	void validate() const {
		if (code.empty()) {
			throw std::invalid_argument("station code must be nonempty");
		}
		if (days_between(start_date, end_date) < 0) {
			throw std::invalid_argument("station period start is after its end");
		}
		position.validate();
	}
};

// ---------------------------------------------------------------------------
// Series containers

enum class Provenance : std::uint8_t { Missing, Measured, Imputed };

inline std::string_view to_string(Provenance p) {
	switch (p) {
	case Provenance::Missing:
		return "missing";
	case Provenance::Measured:
		return "measured";
	case Provenance::Imputed:
		return "imputed";
	}
	return "missing";
}

struct Slot {
	Provenance provenance = Provenance::Missing;
	double value = 0.0;

	static Slot measured(double v) { return {Provenance::Measured, v}; }
	static Slot imputed(double v) { return {Provenance::Imputed, v}; }
	static Slot missing() { return {}; }

	bool is_missing() const { return provenance == Provenance::Missing; }
	bool is_measured() const { return provenance == Provenance::Measured; }
	bool is_imputed() const { return provenance == Provenance::Imputed; }
	bool has_value() const { return provenance != Provenance::Missing; }

	friend bool operator==(const Slot &, const Slot &) = default;
};

enum class HourlyUnit { Irradiance, ClearSkyIndex };

/// Day-major grid of 13 slots per day covering local hours 6..18.
class HourlySeries {
public:
	HourlySeries() = default;
	HourlySeries(Date start, std::size_t n_days, HourlyUnit unit)
	    : start_(start), unit_(unit), slots_(n_days * hours_per_day) {}

	Date start_date() const { return start_; }
	HourlyUnit unit() const { return unit_; }
	void set_unit(HourlyUnit u) { unit_ = u; }
	std::size_t n_days() const { return slots_.size() / hours_per_day; }
	std::size_t size() const { return slots_.size(); }
	bool empty() const { return slots_.empty(); }
	Date date_of(std::size_t day) const { return add_days(start_, static_cast<long>(day)); }

	Slot &at(std::size_t day, int hour) { return slots_.at(index(day, hour)); }
	const Slot &at(std::size_t day, int hour) const { return slots_.at(index(day, hour)); }

	std::span<Slot> slots() { return slots_; }
	std::span<const Slot> slots() const { return slots_; }
	std::span<const Slot> day(std::size_t d) const {
		return std::span<const Slot>(slots_).subspan(d * hours_per_day, hours_per_day);
	}

	static std::size_t index(std::size_t day, int hour) {
		return day * hours_per_day + static_cast<std::size_t>(hour - first_hour);
	}

	friend bool operator==(const HourlySeries &, const HourlySeries &) = default;

private:
	Date start_ = make_date(2000, 1, 1);
	HourlyUnit unit_ = HourlyUnit::Irradiance;
	std::vector<Slot> slots_;
};

/// One value per day for a single daily variable (e.g. raw tmax records).
struct DailyValues {
	Date start = make_date(2000, 1, 1);
	std::vector<Slot> slots;
};

enum class DailyUnit { Insolation, ClearSkyRatio };

struct DailyEntry {
	Slot insolation;
	Slot t_max;
	Slot t_min;

	/// Tmax - Tmin when both temperatures are present.
	std::optional<double> temperature_range() const {
		if (!t_max.has_value() || !t_min.has_value()) {
			return std::nullopt;
		}
		return t_max.value - t_min.value;
	}

	friend bool operator==(const DailyEntry &, const DailyEntry &) = default;
};

struct DailySeries {
	Date start_date = make_date(2000, 1, 1);
	DailyUnit unit = DailyUnit::Insolation;
	std::vector<DailyEntry> entries;

	std::size_t n_days() const { return entries.size(); }
	Date date_of(std::size_t day) const { return add_days(start_date, static_cast<long>(day)); }

	std::vector<Slot> insolation_slots() const {
		std::vector<Slot> out;
		out.reserve(entries.size());
		for (const auto &e : entries) {
			out.push_back(e.insolation);
		}
		return out;
	}

	friend bool operator==(const DailySeries &, const DailySeries &) = default;
};

// ---------------------------------------------------------------------------
// Day classification by clearness index

enum class DayClass { Cloudy, PartiallyHighCloud, PartiallyLowCloud, Sunny, VerySunny };

inline std::string_view to_string(DayClass c) {
	switch (c) {
	case DayClass::Cloudy:
		return "cloudy";
	case DayClass::PartiallyHighCloud:
		return "partially_high_cloud";
	case DayClass::PartiallyLowCloud:
		return "partially_low_cloud";
	case DayClass::Sunny:
		return "sunny";
	case DayClass::VerySunny:
		return "very_sunny";
	}
	return "cloudy";
}

inline DayClass parse_day_class(std::string_view s) {
	for (auto c : {DayClass::Cloudy, DayClass::PartiallyHighCloud, DayClass::PartiallyLowCloud, DayClass::Sunny,
	               DayClass::VerySunny}) {
		if (to_string(c) == s) {
			return c;
		}
	}
	throw std::invalid_argument("unknown day class: " + std::string(s));
}

/// Upper edges are inclusive; kt must lie in (0, 1].
inline DayClass classify_day(double kt) {
	if (!(kt > 0.0) || kt > 1.0) {
		throw std::domain_error("clearness index outside (0, 1]");
	}
	if (kt <= 0.2) {
		return DayClass::Cloudy;
	}
	if (kt <= 0.4) {
		return DayClass::PartiallyHighCloud;
	}
	if (kt <= 0.6) {
		return DayClass::PartiallyLowCloud;
	}
	if (kt <= 0.75) {
		return DayClass::Sunny;
	}
	return DayClass::VerySunny;
}

// ---------------------------------------------------------------------------
// Quarters and missing-value accounting

using DayRange = std::pair<std::size_t, std::size_t>;  // [first, last)

/// Four contiguous day spans of near-equal length; earlier quarters take the
/// remainder days.
inline std::array<DayRange, 4> quarter_ranges(std::size_t n_days) {
	std::array<DayRange, 4> out{};
	const std::size_t base = n_days / 4;
	const std::size_t rem = n_days % 4;
	std::size_t begin = 0;
	for (std::size_t q = 0; q < 4; ++q) {
		const std::size_t len = base + (q < rem ? 1 : 0);
		out[q] = {begin, begin + len};
		begin += len;
	}
	return out;
}

inline std::size_t quarter_of_day(std::size_t day, std::size_t n_days) {
	const auto ranges = quarter_ranges(n_days);
	for (std::size_t q = 0; q < 4; ++q) {
		if (day < ranges[q].second) {
			return q;
		}
	}
	throw std::out_of_range("day index beyond series");
}

struct MissingReport {
	std::size_t n_total = 0;
	std::size_t n_measured = 0;
	std::size_t n_imputed = 0;
	std::size_t n_missing = 0;
	double pct_missing = 0.0;
	std::array<std::size_t, 4> missing_per_quarter{};
	std::size_t longest_gap = 0;
	std::size_t one_size_gap_count = 0;  // single missing slot between two present slots
	std::size_t long_gap_count = 0;      // runs of at least one full day of slots
	std::size_t long_gap_threshold = 0;
};

/// Accounting over a day-major slot sequence with `slots_per_day` slots per day.
inline MissingReport missing_report(std::span<const Slot> slots, std::size_t slots_per_day) {
	if (slots.empty() || slots_per_day == 0) {
		throw DataError("missing_report requires a nonempty series");
	}
	MissingReport r;
	r.n_total = slots.size();
	r.long_gap_threshold = std::max<std::size_t>(slots_per_day, 2);
	const std::size_t n_days = (slots.size() + slots_per_day - 1) / slots_per_day;
	const auto quarters = quarter_ranges(n_days);

	std::size_t q = 0;
	for (std::size_t i = 0; i < slots.size(); ++i) {
		const std::size_t d = i / slots_per_day;
		while (d >= quarters[q].second) {
			++q;
		}
		switch (slots[i].provenance) {
		case Provenance::Measured:
			++r.n_measured;
			break;
		case Provenance::Imputed:
			++r.n_imputed;
			break;
		case Provenance::Missing:
			++r.n_missing;
			++r.missing_per_quarter[q];
			break;
		}
	}

	std::size_t i = 0;
	while (i < slots.size()) {
		if (!slots[i].is_missing()) {
			++i;
			continue;
		}
		const std::size_t begin = i;
		while (i < slots.size() && slots[i].is_missing()) {
			++i;
		}
		const std::size_t len = i - begin;
		r.longest_gap = std::max(r.longest_gap, len);
		if (len == 1 && begin > 0 && i < slots.size()) {
			++r.one_size_gap_count;
		}
		if (len >= r.long_gap_threshold) {
			++r.long_gap_count;
		}
	}
	r.pct_missing = 100.0 * static_cast<double>(r.n_missing) / static_cast<double>(r.n_total);
	return r;
}

inline MissingReport missing_report(const HourlySeries &s) { return missing_report(s.slots(), hours_per_day); }

inline MissingReport missing_report(const DailySeries &s) {
	const auto slots = s.insolation_slots();
	return missing_report(slots, 1);
}

// ---------------------------------------------------------------------------
// CSV ingestion: header `station,variable,timestamp,value[,provenance]`

struct SeriesKey {
	std::string station;
	std::string variable;
	friend auto operator<=>(const SeriesKey &, const SeriesKey &) = default;
};

struct IngestResult {
	std::map<SeriesKey, HourlySeries> hourly;
	std::map<SeriesKey, DailyValues> daily;
	std::size_t n_rows = 0;
	std::size_t n_dropped_incomplete = 0;  // a required field is empty
	std::size_t n_malformed = 0;           // unparseable timestamp/value, or hour outside 6..18
	std::size_t n_duplicates = 0;          // later rows for an already-seen timestamp
	std::vector<std::string> warnings;
};

/// Variables whose hourly values are clear-sky indices rather than irradiance.
inline HourlyUnit unit_for_variable(std::string_view variable) {
	return variable == "kc" ? HourlyUnit::ClearSkyIndex : HourlyUnit::Irradiance;
}

inline IngestResult ingest_csv(std::istream &in) {
	IngestResult result;
	std::string line;
	if (!std::getline(in, line)) {
		return result;
	}
	if (line.size() >= 3 && static_cast<unsigned char>(line[0]) == 0xEF) {
		line.erase(0, 3);  // UTF-8 BOM
	}
	const auto header = detail::split(line, ',');
	const bool has_provenance = header.size() == 5 && header[4] == "provenance";
	if (header.size() < 4 || header[0] != "station" || header[1] != "variable" || header[2] != "timestamp" ||
	    header[3] != "value" || (header.size() == 5 && !has_provenance) || header.size() > 5) {
		throw DataError("unrecognized CSV header: " + line);
	}

	struct Row {
		Timestamp ts;
		double value;
		Provenance provenance;
	};
	std::map<SeriesKey, std::vector<Row>> rows;
	std::size_t line_no = 1;
	while (std::getline(in, line)) {
		++line_no;
		if (detail::trim(line).empty()) {
			continue;
		}
		++result.n_rows;
		const auto f = detail::split(line, ',');
		if (f.size() < 4 || f[0].empty() || f[1].empty() || f[2].empty() || f[3].empty()) {
			++result.n_dropped_incomplete;
			continue;
		}
		const auto ts = parse_timestamp(f[2]);
		const auto value = detail::parse_double(f[3]);
		Provenance prov = Provenance::Measured;
		bool prov_ok = true;
		if (has_provenance && f.size() >= 5 && !f[4].empty()) {
			if (f[4] == "imputed") {
				prov = Provenance::Imputed;
			} else if (f[4] != "measured") {
				prov_ok = false;
			}
		}
		const bool hour_ok = !ts || !ts->hour || (*ts->hour >= first_hour && *ts->hour <= last_hour);
		if (!ts || !value || !prov_ok || !hour_ok || f.size() > header.size()) {
			++result.n_malformed;
			continue;
		}
		rows[SeriesKey{std::string(f[0]), std::string(f[1])}].push_back(Row{*ts, *value, prov});
	}

	for (auto &[key, list] : rows) {
		const bool hourly = list.front().ts.hour.has_value();
		Date lo = list.front().ts.date;
		Date hi = lo;
		for (const auto &r : list) {
			if (std::chrono::sys_days{r.ts.date} < std::chrono::sys_days{lo}) {
				lo = r.ts.date;
			}
			if (std::chrono::sys_days{r.ts.date} > std::chrono::sys_days{hi}) {
				hi = r.ts.date;
			}
		}
		const auto n_days = static_cast<std::size_t>(days_between(lo, hi) + 1);
		std::vector<Slot> slots(hourly ? n_days * hours_per_day : n_days);
		for (const auto &r : list) {
			if (r.ts.hour.has_value() != hourly) {
				++result.n_malformed;
				continue;
			}
			const auto d = static_cast<std::size_t>(days_between(lo, r.ts.date));
			const std::size_t idx = hourly ? HourlySeries::index(d, *r.ts.hour) : d;
			if (slots[idx].has_value()) {
				++result.n_duplicates;
				result.warnings.push_back("duplicate record for " + key.station + "/" + key.variable + " at " +
				                          (hourly ? format_timestamp(r.ts.date, *r.ts.hour) : format_date(r.ts.date)) +
				                          "; keeping the first");
				continue;
			}
			slots[idx] = Slot{r.provenance, r.value};
		}
		if (hourly) {
			HourlySeries s(lo, n_days, unit_for_variable(key.variable));
			std::copy(slots.begin(), slots.end(), s.slots().begin());
			result.hourly.emplace(key, std::move(s));
		} else {
			result.daily.emplace(key, DailyValues{lo, std::move(slots)});
		}
	}
	return result;
}

inline IngestResult ingest_csv(const std::string &path) {
	std::ifstream in(path);
	if (!in) {
		throw DataError("cannot read " + path);
	}
	return ingest_csv(in);
}

/// Combines daily insolation and temperature variables of one station over the
/// union of their date ranges.
inline DailySeries assemble_daily(const IngestResult &data, const std::string &station,
                                  const std::string &insolation_var = "insolation",
                                  const std::string &tmax_var = "tmax", const std::string &tmin_var = "tmin") {
	const DailyValues *parts[3] = {nullptr, nullptr, nullptr};
	const std::string *names[3] = {&insolation_var, &tmax_var, &tmin_var};
	std::optional<Date> lo;
	std::optional<Date> hi;
	for (int i = 0; i < 3; ++i) {
		const auto it = data.daily.find(SeriesKey{station, *names[i]});
		if (it == data.daily.end() || it->second.slots.empty()) {
			continue;
		}
		parts[i] = &it->second;
		const Date first = it->second.start;
		const Date last = add_days(first, static_cast<long>(it->second.slots.size()) - 1);
		if (!lo || days_between(*lo, first) < 0) {
			lo = first;
		}
		if (!hi || days_between(*hi, last) > 0) {
			hi = last;
		}
	}
	if (!lo) {
		throw DataError("no daily records for station " + station);
	}
	DailySeries out;
	out.start_date = *lo;
	out.entries.resize(static_cast<std::size_t>(days_between(*lo, *hi) + 1));
	for (int i = 0; i < 3; ++i) {
		if (parts[i] == nullptr) {
			continue;
		}
		const auto offset = static_cast<std::size_t>(days_between(*lo, parts[i]->start));
		for (std::size_t d = 0; d < parts[i]->slots.size(); ++d) {
			auto &e = out.entries[offset + d];
			Slot &target = i == 0 ? e.insolation : (i == 1 ? e.t_max : e.t_min);
			target = parts[i]->slots[d];
		}
	}
	return out;
}

inline void write_csv_header(std::ostream &out) { out << "station,variable,timestamp,value,provenance\n"; }

/// Writes present slots only; Missing slots have no row.
inline void write_hourly_csv(std::ostream &out, const std::string &station, const std::string &variable,
                             const HourlySeries &s) {
	for (std::size_t d = 0; d < s.n_days(); ++d) {
		for (int h = first_hour; h <= last_hour; ++h) {
			const Slot &slot = s.at(d, h);
			if (!slot.has_value()) {
				continue;
			}
			out << station << ',' << variable << ',' << format_timestamp(s.date_of(d), h) << ','
			    << detail::format_double(slot.value) << ',' << to_string(slot.provenance) << '\n';
		}
	}
}

inline void write_daily_csv(std::ostream &out, const std::string &station, const DailySeries &s,
                            const std::string &insolation_var = "insolation") {
	const auto emit = [&](const std::string &var, const Slot &slot, Date date) {
		if (slot.has_value()) {
			out << station << ',' << var << ',' << format_date(date) << ',' << detail::format_double(slot.value)
			    << ',' << to_string(slot.provenance) << '\n';
		}
	};
	for (std::size_t d = 0; d < s.n_days(); ++d) {
		const auto &e = s.entries[d];
		emit(insolation_var, e.insolation, s.date_of(d));
		emit("tmax", e.t_max, s.date_of(d));
		emit("tmin", e.t_min, s.date_of(d));
	}
}

} // namespace solarcast
