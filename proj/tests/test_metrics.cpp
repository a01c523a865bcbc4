#include "solarcast/metrics.hpp"

#include <catch_amalgamated.hpp>

#include <random>

using namespace solarcast;
using Catch::Matchers::WithinAbs;

TEST_CASE("hand-computed statistics") {
	const std::vector<double> p{1.0, 2.0, 4.0};
	const std::vector<double> o{2.0, 2.0, 2.0};
	const auto s = compute_stats(p, o);
	CHECK_THAT(s.mae, WithinAbs(1.0, 1e-15));
	CHECK_THAT(s.rmse, WithinAbs(std::sqrt(5.0 / 3.0), 1e-15));
	CHECK_THAT(s.mbe, WithinAbs(1.0 / 3.0, 1e-15));
	REQUIRE(s.mape_pct);
	CHECK_THAT(*s.mape_pct, WithinAbs(50.0, 1e-12));
	CHECK_THAT(*s.mpe_pct, WithinAbs(100.0 / 6.0, 1e-12));
}

TEST_CASE("mask drops pairs") {
	const std::vector<double> p{1.0, 100.0, 3.0};
	const std::vector<double> o{1.0, 0.0, 2.0};
	const Mask m{1, 0, 1};
	const auto s = compute_stats(p, o, m);
	CHECK(s.n == 2);
	CHECK_THAT(s.mae, WithinAbs(0.5, 1e-15));
	const Mask none{0, 0, 0};
	CHECK_THROWS_AS(compute_stats(p, o, none), DataError);
}

TEST_CASE("zero observations are left out of percentages only") {
	const std::vector<double> p{1.0, 1.0};
	const std::vector<double> o{0.0, 2.0};
	const auto s = compute_stats(p, o);
	CHECK(s.n == 2);
	CHECK(s.n_pct_excluded == 1);
	CHECK_THAT(*s.mape_pct, WithinAbs(50.0, 1e-12));
	const std::vector<double> zeros{0.0, 0.0};
	CHECK_FALSE(compute_stats(p, zeros).mape_pct);
}

TEST_CASE("RMSE bounds MAE and |MBE|") {
	std::mt19937_64 rng(5);
	std::normal_distribution<double> n(0.0, 1.0);
	for (int k = 0; k < 200; ++k) {
		std::vector<double> p(50), o(50);
		for (std::size_t i = 0; i < 50; ++i) {
			p[i] = n(rng);
			o[i] = n(rng) + 0.3;
		}
		const auto s = compute_stats(p, o);
		CHECK(s.rmse + 1e-15 >= s.mae);
		CHECK(s.mae + 1e-15 >= std::abs(s.mbe));
	}
}

TEST_CASE("quarter statistics partition the pairs") {
	const std::size_t days = 10, v = 3;
	std::vector<double> p(days * v), o(days * v, 1.0);
	for (std::size_t i = 0; i < p.size(); ++i) {
		p[i] = static_cast<double>(i / v);
	}
	Mask m(p.size(), 1);
	for (std::size_t i = 0; i < 6; ++i) {
		m[i] = 0;  // first two days masked out
	}
	const auto q = quarter_stats(p, o, m, v);
	const auto r = quarter_ranges(days);
	std::size_t total = 0;
	for (int k = 0; k < 4; ++k) {
		if (q.quarters[k]) {
			total += q.quarters[k]->n;
		}
	}
	CHECK(total == q.complete.n);
	CHECK(r[0].second == 3);
	CHECK(q.quarters[0]->n == 3);  // only day 2 of the first quarter survives
	CHECK_THAT(q.quarters[0]->mbe, WithinAbs(1.0, 1e-15));
	Mask q1_only(p.size(), 0);
	q1_only[0] = 1;
	const auto q2 = quarter_stats(p, o, q1_only, v);
	CHECK_FALSE(q2.quarters[3]);
}

TEST_CASE("worked metric examples") {
	const std::vector<double> p{1.0, 2.0}, zero{0.0, 0.0};
	const auto a = compute_stats(p, zero);
	CHECK(a.mae == 1.5);
	CHECK(a.mbe == 1.5);
	CHECK_THAT(a.rmse, WithinAbs(1.5811, 1e-4));

	const auto same = compute_stats(p, p);
	CHECK(same.mae == 0.0);
	CHECK(same.rmse == 0.0);
	CHECK(same.mbe == 0.0);

	const std::vector<double> q{2.0, 0.0}, ones{1.0, 1.0};
	const auto c = compute_stats(q, ones);
	CHECK(c.mbe == 0.0);
	CHECK(c.mae == 1.0);
}

TEST_CASE("quarter examples") {
	const std::size_t days = 8;
	std::vector<double> o(days, 1.0), p(days, 1.5);
	const Mask m(days, 1);
	const auto u = quarter_stats(p, o, m, 1);
	for (const auto &q : u.quarters) {
		CHECK(q->mae == u.complete.mae);
	}
	p.assign(days, 1.0);
	p[7] = 3.0;
	const auto late = quarter_stats(p, o, m, 1);
	CHECK(late.quarters[0]->mae == 0.0);
	CHECK(late.quarters[2]->mae == 0.0);
	CHECK(late.quarters[3]->mae > 0.0);
}
