#pragma once

#include <algorithm>
#include <cmath>
#include <cstddef>
#include <functional>
#include <limits>
#include <numeric>
#include <span>
#include <vector>

namespace solarcast {

struct NelderMeadOptions {
	std::size_t max_iterations = 500;
	double f_tolerance = 1e-12;  // relative spread of vertex values
	double x_tolerance = 1e-9;   // absolute simplex diameter
};

struct NelderMeadResult {
	std::vector<double> x;
	double value = std::numeric_limits<double>::infinity();
	double initial_value = std::numeric_limits<double>::infinity();
	std::size_t iterations = 0;
	bool converged = false;
};

/// Derivative-free minimization with the standard reflection / expansion /
/// contraction / shrink coefficients (1, 2, 0.5, 0.5). Objective values of
/// +inf mark infeasible points. The best vertex never gets worse.
inline NelderMeadResult nelder_mead(const std::function<double(std::span<const double>)> &f,
                                    std::vector<double> x0, std::span<const double> steps,
                                    const NelderMeadOptions &opt = {}) {
	const std::size_t n = x0.size();
	NelderMeadResult res;
	res.initial_value = f(x0);
	if (n == 0) {
		res.x = std::move(x0);
		res.value = res.initial_value;
		res.converged = true;
		return res;
	}

	std::vector<std::vector<double>> simplex(n + 1, x0);
	std::vector<double> values(n + 1);
	values[0] = res.initial_value;
	for (std::size_t i = 0; i < n; ++i) {
		simplex[i + 1][i] += steps[i];
		values[i + 1] = f(simplex[i + 1]);
	}

	std::vector<std::size_t> order(n + 1);
	std::vector<double> centroid(n);
	std::vector<double> trial(n);
	const auto point = [&](double t, const std::vector<double> &worst) {
		for (std::size_t j = 0; j < n; ++j) {
			trial[j] = centroid[j] + t * (worst[j] - centroid[j]);
		}
		return f(trial);
	};

	for (res.iterations = 0; res.iterations < opt.max_iterations; ++res.iterations) {
		std::iota(order.begin(), order.end(), 0);
		std::sort(order.begin(), order.end(), [&](std::size_t a, std::size_t b) { return values[a] < values[b]; });
		const std::size_t best = order.front();
		const std::size_t worst = order.back();
		const std::size_t second_worst = order[n - 1];

		double diameter = 0.0;
		for (std::size_t i = 0; i <= n; ++i) {
			for (std::size_t j = 0; j < n; ++j) {
				diameter = std::max(diameter, std::abs(simplex[i][j] - simplex[best][j]));
			}
		}
		const double spread = values[worst] - values[best];
		if (diameter == 0.0 || (std::isfinite(values[worst]) && diameter <= opt.x_tolerance &&
		                        spread <= opt.f_tolerance * std::abs(values[best]))) {
			res.converged = true;
			break;
		}

		std::fill(centroid.begin(), centroid.end(), 0.0);
		for (std::size_t i = 0; i <= n; ++i) {
			if (i == worst) {
				continue;
			}
			for (std::size_t j = 0; j < n; ++j) {
				centroid[j] += simplex[i][j] / static_cast<double>(n);
			}
		}

		const double f_reflect = point(-1.0, simplex[worst]);
		if (f_reflect < values[best]) {
			const auto reflected = trial;
			const double f_expand = point(-2.0, simplex[worst]);
			if (f_expand < f_reflect) {
				simplex[worst] = trial;
				values[worst] = f_expand;
			} else {
				simplex[worst] = reflected;
				values[worst] = f_reflect;
			}
			continue;
		}
		if (f_reflect < values[second_worst]) {
			simplex[worst] = trial;
			values[worst] = f_reflect;
			continue;
		}
		const bool outside = f_reflect < values[worst];
		const double f_contract = outside ? point(-0.5, simplex[worst]) : point(0.5, simplex[worst]);
		if (f_contract < (outside ? f_reflect : values[worst])) {
			simplex[worst] = trial;
			values[worst] = f_contract;
			continue;
		}
		for (std::size_t i = 0; i <= n; ++i) {
			if (i == best) {
				continue;
			}
			for (std::size_t j = 0; j < n; ++j) {
				simplex[i][j] = simplex[best][j] + 0.5 * (simplex[i][j] - simplex[best][j]);
			}
			values[i] = f(simplex[i]);
		}
	}

	const auto best = static_cast<std::size_t>(std::min_element(values.begin(), values.end()) - values.begin());
	res.x = simplex[best];
	res.value = values[best];
	return res;
}

} // namespace solarcast
