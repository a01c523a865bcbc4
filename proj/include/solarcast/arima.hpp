#pragma once

// ARIMA(p,d,q) by conditional sum of squares, AIC order selection over a grid,
// and multi-step forecasting.

#include "solarcast/data_model.hpp"
#include "solarcast/nelder_mead.hpp"

#include <algorithm>
#include <cmath>
#include <cstddef>
#include <limits>
#include <numbers>
#include <optional>
#include <span>
#include <stdexcept>
#include <string>
#include <tuple>
#include <vector>

namespace solarcast {

struct ArimaOrder {
	int p = 1;
	int d = 0;
	int q = 1;

	int total() const { return p + d + q; }
	bool valid() const { return p >= 0 && p <= 3 && d >= 0 && d <= 2 && q >= 0 && q <= 3; }
	std::string str() const {
		return "(" + std::to_string(p) + "," + std::to_string(d) + "," + std::to_string(q) + ")";
	}
	friend auto operator<=>(const ArimaOrder &, const ArimaOrder &) = default;
};

struct ArimaFit {
	ArimaOrder order;
	std::vector<double> phi;    // AR coefficients
	std::vector<double> theta;  // MA coefficients
	double sigma2 = 1.0;
	double intercept = 0.0;  // level of the differenced series
	bool with_intercept = true;
	double log_likelihood = 0.0;
	double initial_log_likelihood = 0.0;  // at the optimizer's starting point
	double aic = 0.0;
	std::size_t n_obs = 0;
	std::size_t iterations = 0;
	bool converged = true;  // false: optimizer hit its cap, best-so-far returned

	/// Number of estimated parameters including the innovation variance.
	int n_params() const { return order.p + order.q + 1 + (with_intercept ? 1 : 0); }
};

struct ArimaOptions {
	bool with_intercept = true;
	std::size_t max_iterations = 500;
};

inline constexpr double arima_root_margin = 1.001;

/// Applies (1 - B) `d` times.
inline std::vector<double> difference(std::span<const double> x, int d) {
	if (d < 0) {
		throw std::invalid_argument("difference: negative order");
	}
	if (x.size() <= static_cast<std::size_t>(d)) {
		throw DataError("difference: series too short for the differencing order");
	}
	std::vector<double> y(x.begin(), x.end());
	for (int k = 0; k < d; ++k) {
		for (std::size_t i = 0; i + 1 < y.size(); ++i) {
			y[i] = y[i + 1] - y[i];
		}
		y.pop_back();
	}
	return y;
}

/// Leading value of x differenced k times, for k = 0..d-1.
inline std::vector<double> difference_heads(std::span<const double> x, int d) {
	std::vector<double> heads;
	for (int k = 0; k < d; ++k) {
		heads.push_back(difference(x, k).front());
	}
	return heads;
}

/// Inverse of difference(): rebuilds the series from its d-th difference and
/// the leading values returned by difference_heads().
inline std::vector<double> integrate(std::span<const double> dx, std::span<const double> heads) {
	std::vector<double> y(dx.begin(), dx.end());
	for (auto k = static_cast<std::ptrdiff_t>(heads.size()) - 1; k >= 0; --k) {
		std::vector<double> up(y.size() + 1);
		up[0] = heads[static_cast<std::size_t>(k)];
		for (std::size_t i = 0; i < y.size(); ++i) {
			up[i + 1] = up[i] + y[i];
		}
		y = std::move(up);
	}
	return y;
}

/// True when every root of 1 - sum_i c_i z^i lies strictly outside the disk
/// of radius `margin` (Schur-Cohn step-down on the rescaled polynomial).
inline bool roots_outside(std::span<const double> c, double margin = arima_root_margin) {
	std::vector<double> a(c.begin(), c.end());
	double scale = 1.0;
	for (auto &v : a) {
		scale *= margin;
		v *= scale;
	}
	while (!a.empty() && a.back() == 0.0) {
		a.pop_back();
	}
	for (std::size_t k = a.size(); k >= 1; --k) {
		const double kappa = a[k - 1];
		if (!(std::abs(kappa) < 1.0)) {
			return false;
		}
		const double denom = 1.0 - kappa * kappa;
		std::vector<double> next(k - 1);
		for (std::size_t i = 0; i + 1 < k; ++i) {
			next[i] = (a[i] + kappa * a[k - 2 - i]) / denom;
		}
		a = std::move(next);
	}
	return true;
}

inline bool is_stationary(std::span<const double> phi) { return roots_outside(phi); }

inline bool is_invertible(std::span<const double> theta) {
	std::vector<double> neg(theta.size());
	std::transform(theta.begin(), theta.end(), neg.begin(), [](double v) { return -v; });
	return roots_outside(neg);
}

/// Innovations u_t = w_t - sum phi_i w_{t-i} - sum theta_j u_{t-j}, w = y - mu,
/// with pre-sample w and u set to zero.
inline std::vector<double> css_residuals(std::span<const double> y, double mu, std::span<const double> phi,
                                         std::span<const double> theta) {
	const std::size_t n = y.size();
	std::vector<double> u(n);
	for (std::size_t t = 0; t < n; ++t) {
		double v = y[t] - mu;
		for (std::size_t i = 1; i <= phi.size() && i <= t; ++i) {
			v -= phi[i - 1] * (y[t - i] - mu);
		}
		for (std::size_t j = 1; j <= theta.size() && j <= t; ++j) {
			v -= theta[j - 1] * u[t - j];
		}
		u[t] = v;
	}
	return u;
}

inline constexpr double min_sigma2 = 1e-12;

inline double css_log_likelihood(double sum_squares, std::size_t n) {
	const double dn = static_cast<double>(n);
	const double sigma2 = std::max(sum_squares / dn, min_sigma2);
	return -0.5 * dn * (std::log(2.0 * std::numbers::pi * sigma2) + 1.0);
}

inline std::size_t arima_min_length(const ArimaOrder &order) {
	return static_cast<std::size_t>(std::max(3 * (order.p + order.q) + order.d, order.d + 2));
}

/// Conditional-sum-of-squares Gaussian fit on the differenced series.
/// Parameters outside stationarity/invertibility are infeasible.
inline ArimaFit fit(std::span<const double> x, const ArimaOrder &order, const ArimaOptions &opt = {}) {
	if (!order.valid()) {
		throw std::invalid_argument("ARIMA order outside p,q in [0,3], d in [0,2]: " + order.str());
	}
	if (x.size() < arima_min_length(order)) {
		throw DataError("ARIMA" + order.str() + ": series too short");
	}
	const auto y = difference(x, order.d);
	const std::size_t n = y.size();
	const auto p = static_cast<std::size_t>(order.p);
	const auto q = static_cast<std::size_t>(order.q);

	double mean = 0.0;
	for (double v : y) {
		mean += v;
	}
	mean /= static_cast<double>(n);
	double var = 0.0;
	for (double v : y) {
		var += (v - mean) * (v - mean);
	}
	const double sd = std::sqrt(var / static_cast<double>(n));

	// parameter layout: [mu?] phi_1..phi_p theta_1..theta_q
	const std::size_t offset = opt.with_intercept ? 1 : 0;
	const auto unpack = [&](std::span<const double> v) {
		const double mu = opt.with_intercept ? v[0] : 0.0;
		return std::tuple{mu, v.subspan(offset, p), v.subspan(offset + p, q)};
	};
	const auto objective = [&](std::span<const double> v) {
		const auto [mu, phi, theta] = unpack(v);
		if (!is_stationary(phi) || !is_invertible(theta)) {
			return std::numeric_limits<double>::infinity();
		}
		const auto u = css_residuals(y, mu, phi, theta);
		double ss = 0.0;
		for (double e : u) {
			ss += e * e;
		}
		return std::isfinite(ss) ? ss / static_cast<double>(n) : std::numeric_limits<double>::infinity();
	};

	std::vector<double> x0(offset + p + q, 0.0);
	std::vector<double> steps(x0.size(), 0.1);
	if (opt.with_intercept) {
		x0[0] = mean;
		steps[0] = std::max(0.1 * sd, 1e-4);
	}
	NelderMeadOptions nm;
	nm.max_iterations = opt.max_iterations;
	const auto res = nelder_mead(objective, x0, steps, nm);

	ArimaFit f;
	f.order = order;
	f.with_intercept = opt.with_intercept;
	const auto [mu, phi, theta] = unpack(res.x);
	f.intercept = mu;
	f.phi.assign(phi.begin(), phi.end());
	f.theta.assign(theta.begin(), theta.end());
	f.n_obs = n;
	f.sigma2 = std::max(res.value, min_sigma2);
	f.log_likelihood = css_log_likelihood(res.value * static_cast<double>(n), n);
	f.initial_log_likelihood = css_log_likelihood(res.initial_value * static_cast<double>(n), n);
	f.aic = 2.0 * f.n_params() - 2.0 * f.log_likelihood;
	f.iterations = res.iterations;
	f.converged = res.converged;
	return f;
}

/// Order-selection preference: lower AIC, then smaller p+d+q, then
/// lexicographically smaller (p,d,q).
inline bool preferred(const ArimaFit &a, const ArimaFit &b) {
	if (a.aic != b.aic) {
		return a.aic < b.aic;
	}
	if (a.order.total() != b.order.total()) {
		return a.order.total() < b.order.total();
	}
	return a.order < b.order;
}

struct ArimaGrid {
	int p_min = 1, p_max = 3;
	int d_min = 0, d_max = 2;
	int q_min = 1, q_max = 3;

	static ArimaGrid fixed(const ArimaOrder &o) { return {o.p, o.p, o.d, o.d, o.q, o.q}; }
};

struct OrderSelection {
	ArimaFit best;
	std::size_t n_candidates = 0;
	std::size_t n_failed = 0;
};

inline OrderSelection select_order(std::span<const double> x, const ArimaGrid &grid = {},
                                   const ArimaOptions &opt = {}) {
	OrderSelection sel;
	std::optional<ArimaFit> best;
	for (int p = grid.p_min; p <= grid.p_max; ++p) {
		for (int d = grid.d_min; d <= grid.d_max; ++d) {
			for (int q = grid.q_min; q <= grid.q_max; ++q) {
				++sel.n_candidates;
				try {
					auto f = fit(x, ArimaOrder{p, d, q}, opt);
					if (!std::isfinite(f.aic)) {
						++sel.n_failed;
						continue;
					}
					if (!best || preferred(f, *best)) {
						best = std::move(f);
					}
				} catch (const DataError &) {
					++sel.n_failed;
				}
			}
		}
	}
	if (!best) {
		throw DataError("select_order: no candidate order could be fitted");
	}
	sel.best = std::move(*best);
	return sel;
}

/// Iterates the ARMA recursion on the differenced scale with future
/// innovations at zero, then integrates back to the scale of `x`.
inline std::vector<double> forecast(const ArimaFit &model, std::span<const double> x, std::size_t horizon) {
	if (horizon == 0) {
		throw std::invalid_argument("forecast: horizon must be at least 1");
	}
	const int d = model.order.d;
	const auto y = difference(x, d);
	const double mu = model.intercept;
	const auto u_hist = css_residuals(y, mu, model.phi, model.theta);

	std::vector<double> w;
	w.reserve(y.size() + horizon);
	for (double v : y) {
		w.push_back(v - mu);
	}
	std::vector<double> u(u_hist);
	u.resize(y.size() + horizon, 0.0);
	for (std::size_t h = 0; h < horizon; ++h) {
		const std::size_t t = y.size() + h;
		double v = 0.0;
		for (std::size_t i = 1; i <= model.phi.size() && i <= t; ++i) {
			v += model.phi[i - 1] * w[t - i];
		}
		for (std::size_t j = 1; j <= model.theta.size() && j <= t; ++j) {
			v += model.theta[j - 1] * u[t - j];
		}
		w.push_back(v);
	}
	std::vector<double> out(horizon);
	for (std::size_t h = 0; h < horizon; ++h) {
		out[h] = w[y.size() + h] + mu;
	}
	for (int k = d - 1; k >= 0; --k) {
		const auto level = difference(x, k);
		double last = level.back();
		for (auto &v : out) {
			last += v;
			v = last;
		}
	}
	return out;
}

} // namespace solarcast
