#pragma once

// Feed-forward (single- and multi-layer) and LSTM forecasters with hand-written
// backpropagation, plain gradient-descent updates and finite-difference
// gradient checking. Samples are matrix columns: inputs are input_size x B,
// targets output_size x B.

#include <Eigen/Dense>
#include <json.hpp>

#include <algorithm>
#include <bit>
#include <cmath>
#include <cstddef>
#include <cstdint>
#include <cstring>
#include <fstream>
#include <random>
#include <span>
#include <stdexcept>
#include <string>
#include <string_view>
#include <vector>

namespace solarcast {

using Matrix = Eigen::MatrixXd;
using Vector = Eigen::VectorXd;

enum class NetKind { SLFNN, MLFNN, LSTM };

inline std::string_view to_string(NetKind k) {
	switch (k) {
	case NetKind::SLFNN:
		return "SL-FNN";
	case NetKind::MLFNN:
		return "ML-FNN";
	case NetKind::LSTM:
		return "LSTM";
	}
	return "SL-FNN";
}

inline NetKind parse_net_kind(std::string_view s) {
	if (s == "SL-FNN" || s == "slfnn" || s == "SLFNN") {
		return NetKind::SLFNN;
	}
	if (s == "ML-FNN" || s == "mlfnn" || s == "MLFNN") {
		return NetKind::MLFNN;
	}
	if (s == "LSTM" || s == "lstm") {
		return NetKind::LSTM;
	}
	throw std::invalid_argument("unknown network kind: " + std::string(s));
}

/// Learning rates tried when tuning; 1e-2 is the default.
inline constexpr double learning_rate_grid[] = {1.0, 1e-1, 1e-2, 1e-3, 1e-4};

struct NetConfig {
	NetKind kind = NetKind::SLFNN;
	std::size_t input_size = 130;
	std::size_t output_size = 13;
	std::size_t hidden_size = 130;
	double learning_rate = 1e-2;
	std::size_t batch_windows = 10;
	std::uint64_t seed = 0;
	/// LSTM only: feed the whole window as one time step instead of one value per step.
	bool lstm_one_step = false;

	/// Hidden size equals the input window length.
	static NetConfig for_window(NetKind kind, std::size_t input_size, std::size_t output_size, std::uint64_t seed) {
		NetConfig c;
		c.kind = kind;
		c.input_size = input_size;
		c.output_size = output_size;
		c.hidden_size = input_size;
		c.seed = seed;
		return c;
	}

	std::size_t lstm_step_width() const { return lstm_one_step ? input_size : 1; }
	std::size_t lstm_steps() const { return input_size / lstm_step_width(); }

	void validate() const {
		if (input_size == 0 || output_size == 0 || hidden_size == 0) {
			throw std::invalid_argument("NetConfig: sizes must be positive");
		}
		if (!(learning_rate > 0.0) || batch_windows == 0) {
			throw std::invalid_argument("NetConfig: learning rate and batch size must be positive");
		}
	}
};

struct LstmState {
	Vector c;
	Vector h;
};

/// Per-step gate activations and state of one LSTM pass (single sample).
struct LstmTrace {
	std::vector<Vector> input_gate;
	std::vector<Vector> forget_gate;
	std::vector<Vector> output_gate;
	std::vector<LstmState> states;  // states[t] after step t; states[0] is the zero initial state
};

class Network {
public:
	Network() = default;

	/// Weights ~ U(-1/sqrt(fan_in), 1/sqrt(fan_in)) from the seeded generator;
	/// biases zero except the LSTM forget gate at 1.
	explicit Network(const NetConfig &config) : config_(config) {
		config_.validate();
		const auto in = static_cast<Eigen::Index>(config_.input_size);
		const auto out = static_cast<Eigen::Index>(config_.output_size);
		const auto hid = static_cast<Eigen::Index>(config_.hidden_size);
		switch (config_.kind) {
		case NetKind::SLFNN:
			add("W", out, in);
			add("b", out, 1);
			break;
		case NetKind::MLFNN:
			add("W1", hid, in);
			add("b1", hid, 1);
			add("W2", hid, hid);
			add("b2", hid, 1);
			add("W3", out, hid);
			add("b3", out, 1);
			break;
		case NetKind::LSTM:
			if (config_.input_size % config_.lstm_step_width() != 0) {
				throw std::invalid_argument("NetConfig: window not divisible into LSTM steps");
			}
			// gate row blocks: input, forget, output, candidate
			add("Wx", 4 * hid, static_cast<Eigen::Index>(config_.lstm_step_width()));
			add("Wh", 4 * hid, hid);
			add("b", 4 * hid, 1);
			add("Wy", out, hid);
			add("by", out, 1);
			break;
		}
		std::mt19937_64 rng(config_.seed);
		for (std::size_t k = 0; k < params_.size(); ++k) {
			Matrix &m = params_[k];
			if (m.cols() == 1 && names_[k].front() == 'b') {
				m.setZero();
				continue;
			}
			const double bound = 1.0 / std::sqrt(static_cast<double>(m.cols()));
			std::uniform_real_distribution<double> dist(-bound, bound);
			for (Eigen::Index j = 0; j < m.cols(); ++j) {
				for (Eigen::Index i = 0; i < m.rows(); ++i) {
					m(i, j) = dist(rng);
				}
			}
		}
		if (config_.kind == NetKind::LSTM) {
			params_[2].middleRows(hid, hid).setOnes();
		}
	}

	const NetConfig &config() const { return config_; }
	NetKind kind() const { return config_.kind; }
	std::vector<Matrix> &parameters() { return params_; }
	const std::vector<Matrix> &parameters() const { return params_; }
	const std::vector<std::string> &parameter_names() const { return names_; }
	std::size_t step_count() const { return steps_; }
	void set_step_count(std::size_t s) { steps_ = s; }

	std::size_t parameter_count() const {
		std::size_t n = 0;
		for (const auto &m : params_) {
			n += static_cast<std::size_t>(m.size());
		}
		return n;
	}

	std::vector<Matrix> zeros_like() const {
		std::vector<Matrix> g;
		g.reserve(params_.size());
		for (const auto &m : params_) {
			g.push_back(Matrix::Zero(m.rows(), m.cols()));
		}
		return g;
	}

	Matrix predict(const Matrix &inputs) const {
		check_inputs(inputs);
		switch (config_.kind) {
		case NetKind::SLFNN:
			return (params_[0] * inputs).colwise() + params_[1].col(0);
		case NetKind::MLFNN:
			return mlfnn(inputs, nullptr, nullptr);
		case NetKind::LSTM:
			return lstm(inputs, nullptr, nullptr);
		}
		return {};
	}

	/// Mean squared error over all outputs and samples. When `grads` is given
	/// it receives d(loss)/d(parameter) for every parameter.
	double loss(const Matrix &inputs, const Matrix &targets, std::vector<Matrix> *grads = nullptr) const {
		check_inputs(inputs);
		if (targets.rows() != static_cast<Eigen::Index>(config_.output_size) || targets.cols() != inputs.cols()) {
			throw std::invalid_argument("target shape mismatch");
		}
		const double scale = 1.0 / static_cast<double>(targets.size());
		if (grads == nullptr) {
			return (predict(inputs) - targets).squaredNorm() * scale;
		}
		*grads = zeros_like();
		Matrix y;
		Matrix dy;
		switch (config_.kind) {
		case NetKind::SLFNN: {
			y = (params_[0] * inputs).colwise() + params_[1].col(0);
			dy = 2.0 * scale * (y - targets);
			(*grads)[0].noalias() = dy * inputs.transpose();
			(*grads)[1] = dy.rowwise().sum();
			break;
		}
		case NetKind::MLFNN: {
			y = mlfnn(inputs, &targets, grads);
			break;
		}
		case NetKind::LSTM: {
			y = lstm(inputs, &targets, grads);
			break;
		}
		}
		return (y - targets).squaredNorm() * scale;
	}

	using ExtendedMatrix = Eigen::Matrix<long double, Eigen::Dynamic, Eigen::Dynamic>;

	std::vector<ExtendedMatrix> extended_parameters() const {
		std::vector<ExtendedMatrix> p;
		for (const auto &m : params_) {
			p.push_back(m.cast<long double>());
		}
		return p;
	}

	/// The loss evaluated in long double with parameters `p` in place of the
	/// network's own. Finite differences taken on this stay accurate for
	/// gradients many orders below the loss itself.
	long double loss_extended(const std::vector<ExtendedMatrix> &p, const ExtendedMatrix &x,
	                          const ExtendedMatrix &targets) const {
		using M = ExtendedMatrix;
		const auto sig = [](const M &z) -> M { return (1.0L / (1.0L + (-z.array()).exp())).matrix(); };
		M y;
		switch (config_.kind) {
		case NetKind::SLFNN:
			y = (p[0] * x).colwise() + p[1].col(0);
			break;
		case NetKind::MLFNN: {
			const M a1 = ((p[0] * x).colwise() + p[1].col(0)).cwiseMax(0.0L);
			const M a2 = ((p[2] * a1).colwise() + p[3].col(0)).cwiseMax(0.0L);
			y = (p[4] * a2).colwise() + p[5].col(0);
			break;
		}
		case NetKind::LSTM: {
			const auto H = static_cast<Eigen::Index>(config_.hidden_size);
			const auto d = static_cast<Eigen::Index>(config_.lstm_step_width());
			M h = M::Zero(H, x.cols());
			M c = M::Zero(H, x.cols());
			M z(4 * H, x.cols());
			for (std::size_t t = 0; t < config_.lstm_steps(); ++t) {
				z.noalias() = p[0] * x.middleRows(static_cast<Eigen::Index>(t) * d, d);
				z.noalias() += p[1] * h;
				z.colwise() += p[2].col(0);
				z.topRows(3 * H) = sig(z.topRows(3 * H));
				z.bottomRows(H) = z.bottomRows(H).array().tanh().matrix();
				c = z.middleRows(H, H).cwiseProduct(c) + z.topRows(H).cwiseProduct(z.bottomRows(H));
				h = z.middleRows(2 * H, H).cwiseProduct(c.array().tanh().matrix());
			}
			y = (p[3] * h).colwise() + p[4].col(0);
			break;
		}
		}
		return (y - targets).squaredNorm() / static_cast<long double>(targets.size());
	}

	/// Single-sample LSTM pass recording gate activations and states.
	LstmTrace lstm_trace(std::span<const double> x) const {
		if (config_.kind != NetKind::LSTM) {
			throw std::logic_error("lstm_trace on a non-LSTM network");
		}
		const Matrix in = column(x);
		check_inputs(in);
		const auto H = static_cast<Eigen::Index>(config_.hidden_size);
		const auto d = static_cast<Eigen::Index>(config_.lstm_step_width());
		LstmTrace tr;
		Vector h = Vector::Zero(H);
		Vector c = Vector::Zero(H);
		tr.states.push_back({c, h});
		for (std::size_t t = 0; t < config_.lstm_steps(); ++t) {
			const Vector z = params_[0] * in.block(static_cast<Eigen::Index>(t) * d, 0, d, 1) + params_[1] * h + params_[2];
			const Vector i = sigmoid(z.segment(0, H));
			const Vector f = sigmoid(z.segment(H, H));
			const Vector o = sigmoid(z.segment(2 * H, H));
			const Vector g = z.segment(3 * H, H).array().tanh().matrix();
			c = f.cwiseProduct(c) + i.cwiseProduct(g);
			h = o.cwiseProduct(c.array().tanh().matrix());
			tr.input_gate.push_back(i);
			tr.forget_gate.push_back(f);
			tr.output_gate.push_back(o);
			tr.states.push_back({c, h});
		}
		return tr;
	}

	static Matrix column(std::span<const double> x) {
		return Eigen::Map<const Vector>(x.data(), static_cast<Eigen::Index>(x.size()));
	}

private:
	void add(std::string name, Eigen::Index rows, Eigen::Index cols) {
		names_.push_back(std::move(name));
		params_.push_back(Matrix::Zero(rows, cols));
	}

	void check_inputs(const Matrix &inputs) const {
		if (inputs.rows() != static_cast<Eigen::Index>(config_.input_size) || inputs.cols() < 1) {
			throw std::invalid_argument("input shape mismatch: expected " + std::to_string(config_.input_size) +
			                            " rows, got " + std::to_string(inputs.rows()));
		}
	}

	template <class Derived>
	static Matrix sigmoid(const Eigen::MatrixBase<Derived> &z) {
		return (1.0 / (1.0 + (-z.array()).exp())).matrix();
	}

	static Matrix relu(const Matrix &z) { return z.cwiseMax(0.0); }

	static Matrix relu_mask(const Matrix &z) { return (z.array() > 0.0).cast<double>().matrix(); }

	Matrix mlfnn(const Matrix &x, const Matrix *targets, std::vector<Matrix> *grads) const {
		const Matrix z1 = (params_[0] * x).colwise() + params_[1].col(0);
		const Matrix a1 = relu(z1);
		const Matrix z2 = (params_[2] * a1).colwise() + params_[3].col(0);
		const Matrix a2 = relu(z2);
		Matrix y = (params_[4] * a2).colwise() + params_[5].col(0);
		if (grads != nullptr) {
			auto &g = *grads;
			const Matrix dy = 2.0 / static_cast<double>(targets->size()) * (y - *targets);
			g[4].noalias() = dy * a2.transpose();
			g[5] = dy.rowwise().sum();
			const Matrix dz2 = (params_[4].transpose() * dy).cwiseProduct(relu_mask(z2));
			g[2].noalias() = dz2 * a1.transpose();
			g[3] = dz2.rowwise().sum();
			const Matrix dz1 = (params_[2].transpose() * dz2).cwiseProduct(relu_mask(z1));
			g[0].noalias() = dz1 * x.transpose();
			g[1] = dz1.rowwise().sum();
		}
		return y;
	}

	/// Forward pass over the window sequence, with backpropagation through
	/// time when `grads` is set.
	Matrix lstm(const Matrix &x, const Matrix *targets, std::vector<Matrix> *grads) const {
		const auto H = static_cast<Eigen::Index>(config_.hidden_size);
		const auto d = static_cast<Eigen::Index>(config_.lstm_step_width());
		const auto B = x.cols();
		const std::size_t T = config_.lstm_steps();
		const Matrix &Wx = params_[0];
		const Matrix &Wh = params_[1];
		const Vector bias = params_[2].col(0);

		const bool backward = grads != nullptr;
		std::vector<Matrix> gates;  // per step: [i; f; o; g] activations, 4H x B
		std::vector<Matrix> cells(backward ? T + 1 : 0);
		std::vector<Matrix> hiddens(backward ? T + 1 : 0);
		if (backward) {
			gates.reserve(T);
		}
		Matrix h = Matrix::Zero(H, B);
		Matrix c = Matrix::Zero(H, B);
		Matrix z(4 * H, B);
		if (backward) {
			cells[0] = c;
			hiddens[0] = h;
		}
		for (std::size_t t = 0; t < T; ++t) {
			z.noalias() = Wx * x.middleRows(static_cast<Eigen::Index>(t) * d, d);
			z.noalias() += Wh * h;
			z.colwise() += bias;
			z.topRows(3 * H) = sigmoid(z.topRows(3 * H));
			z.bottomRows(H) = z.bottomRows(H).array().tanh().matrix();
			c = z.middleRows(H, H).cwiseProduct(c) + z.topRows(H).cwiseProduct(z.bottomRows(H));
			h = z.middleRows(2 * H, H).cwiseProduct(c.array().tanh().matrix());
			if (backward) {
				gates.push_back(z);
				cells[t + 1] = c;
				hiddens[t + 1] = h;
			}
		}
		Matrix y = (params_[3] * h).colwise() + params_[4].col(0);
		if (!backward) {
			return y;
		}

		auto &g = *grads;
		const Matrix dy = 2.0 / static_cast<double>(targets->size()) * (y - *targets);
		g[3].noalias() = dy * h.transpose();
		g[4] = dy.rowwise().sum();
		Matrix dh = params_[3].transpose() * dy;
		Matrix dc = Matrix::Zero(H, B);
		Matrix dz(4 * H, B);
		for (std::size_t t = T; t-- > 0;) {
			const Matrix &a = gates[t];
			const auto i = a.topRows(H);
			const auto f = a.middleRows(H, H);
			const auto o = a.middleRows(2 * H, H);
			const auto gg = a.bottomRows(H);
			const Matrix tc = cells[t + 1].array().tanh().matrix();
			dc += dh.cwiseProduct(o).cwiseProduct((1.0 - tc.array().square()).matrix());
			dz.topRows(H) = dc.cwiseProduct(gg).cwiseProduct(i.cwiseProduct((1.0 - i.array()).matrix()));
			dz.middleRows(H, H) =
			    dc.cwiseProduct(cells[t]).cwiseProduct(f.cwiseProduct((1.0 - f.array()).matrix()));
			dz.middleRows(2 * H, H) = dh.cwiseProduct(tc).cwiseProduct(o.cwiseProduct((1.0 - o.array()).matrix()));
			dz.bottomRows(H) = dc.cwiseProduct(i).cwiseProduct((1.0 - gg.array().square()).matrix());
			g[0].noalias() += dz * x.middleRows(static_cast<Eigen::Index>(t) * d, d).transpose();
			g[1].noalias() += dz * hiddens[t].transpose();
			g[2] += dz.rowwise().sum();
			dh.noalias() = Wh.transpose() * dz;
			dc = dc.cwiseProduct(f).eval();
		}
		return y;
	}

	NetConfig config_;
	std::vector<std::string> names_;
	std::vector<Matrix> params_;
	std::size_t steps_ = 0;
};

// ---------------------------------------------------------------------------
// Forward passes on a single window

inline std::vector<double> forward(const Network &net, std::span<const double> x) {
	const Matrix y = net.predict(Network::column(x));
	return {y.data(), y.data() + y.size()};
}

inline std::vector<double> forward_slfnn(const Network &net, std::span<const double> x) {
	if (net.kind() != NetKind::SLFNN) {
		throw std::logic_error("forward_slfnn on a different network kind");
	}
	return forward(net, x);
}

inline std::vector<double> forward_mlfnn(const Network &net, std::span<const double> x) {
	if (net.kind() != NetKind::MLFNN) {
		throw std::logic_error("forward_mlfnn on a different network kind");
	}
	return forward(net, x);
}

inline std::vector<double> forward_lstm(const Network &net, std::span<const double> x) {
	if (net.kind() != NetKind::LSTM) {
		throw std::logic_error("forward_lstm on a different network kind");
	}
	return forward(net, x);
}

// ---------------------------------------------------------------------------
// Training

struct TrainStepResult {
	double loss = 0.0;  // before the update
	bool diverged = false;
};

/// One plain gradient-descent step on the batch mean squared error.
/// A non-finite loss or gradient leaves the parameters untouched.
inline TrainStepResult train_step(Network &net, const Matrix &inputs, const Matrix &targets) {
	std::vector<Matrix> grads;
	TrainStepResult r;
	r.loss = net.loss(inputs, targets, &grads);
	bool finite = std::isfinite(r.loss);
	for (const auto &g : grads) {
		finite = finite && g.allFinite();
	}
	if (!finite) {
		r.diverged = true;
		return r;
	}
	const double lr = net.config().learning_rate;
	auto &params = net.parameters();
	for (std::size_t k = 0; k < params.size(); ++k) {
		params[k] -= lr * grads[k];
	}
	net.set_step_count(net.step_count() + 1);
	return r;
}

/// Max over parameters of |g_analytic - g_numeric| / max(1e-8, |g_analytic| + |g_numeric|),
/// with central differences of step `epsilon` on the extended-precision loss.
inline double gradient_check(const Network &net, const Matrix &inputs, const Matrix &targets,
                             double epsilon = 1e-5) {
	std::vector<Matrix> analytic;
	net.loss(inputs, targets, &analytic);
	auto params = net.extended_parameters();
	const Network::ExtendedMatrix x = inputs.cast<long double>();
	const Network::ExtendedMatrix t = targets.cast<long double>();
	const long double step = epsilon;
	double worst = 0.0;
	for (std::size_t k = 0; k < params.size(); ++k) {
		for (Eigen::Index i = 0; i < params[k].size(); ++i) {
			long double &w = params[k].data()[i];
			const long double saved = w;
			w = saved + step;
			const long double up = net.loss_extended(params, x, t);
			w = saved - step;
			const long double down = net.loss_extended(params, x, t);
			w = saved;
			const auto numeric = static_cast<double>((up - down) / (2.0L * step));
			const double a = analytic[k].data()[i];
			const double rel = std::abs(a - numeric) / std::max(1e-8, std::abs(a) + std::abs(numeric));
			worst = std::max(worst, rel);
		}
	}
	return worst;
}

// ---------------------------------------------------------------------------
// Checkpoints: <prefix>.bin holds every parameter as little-endian float64 in
// declaration order (column-major); <prefix>.json describes shapes and config.

inline void save_checkpoint(const Network &net, const std::string &prefix) {
	std::ofstream bin(prefix + ".bin", std::ios::binary);
	if (!bin) {
		throw std::runtime_error("cannot write " + prefix + ".bin");
	}
	nlohmann::json shapes = nlohmann::json::array();
	for (std::size_t k = 0; k < net.parameters().size(); ++k) {
		const Matrix &m = net.parameters()[k];
		shapes.push_back({{"name", net.parameter_names()[k]}, {"rows", m.rows()}, {"cols", m.cols()}});
		for (Eigen::Index i = 0; i < m.size(); ++i) {
			const auto bits = std::bit_cast<std::uint64_t>(m.data()[i]);
			unsigned char bytes[8];
			for (int b = 0; b < 8; ++b) {
				bytes[b] = static_cast<unsigned char>(bits >> (8 * b));
			}
			bin.write(reinterpret_cast<const char *>(bytes), 8);
		}
	}
	const auto &c = net.config();
	nlohmann::json meta = {{"kind", std::string(to_string(c.kind))},
	                       {"input_size", c.input_size},
	                       {"output_size", c.output_size},
	                       {"hidden_size", c.hidden_size},
	                       {"learning_rate", c.learning_rate},
	                       {"batch_windows", c.batch_windows},
	                       {"seed", c.seed},
	                       {"lstm_one_step", c.lstm_one_step},
	                       {"step_count", net.step_count()},
	                       {"init", "uniform(+-1/sqrt(fan_in)), zero biases, LSTM forget bias 1"},
	                       {"parameters", shapes}};
	std::ofstream js(prefix + ".json");
	js << meta.dump(2) << '\n';
}

inline Network load_checkpoint(const std::string &prefix) {
	std::ifstream js(prefix + ".json");
	if (!js) {
		throw std::runtime_error("cannot read " + prefix + ".json");
	}
	const auto meta = nlohmann::json::parse(js);
	NetConfig c;
	c.kind = parse_net_kind(meta.at("kind").get<std::string>());
	c.input_size = meta.at("input_size").get<std::size_t>();
	c.output_size = meta.at("output_size").get<std::size_t>();
	c.hidden_size = meta.at("hidden_size").get<std::size_t>();
	c.learning_rate = meta.at("learning_rate").get<double>();
	c.batch_windows = meta.at("batch_windows").get<std::size_t>();
	c.seed = meta.at("seed").get<std::uint64_t>();
	c.lstm_one_step = meta.at("lstm_one_step").get<bool>();
	Network net(c);
	net.set_step_count(meta.at("step_count").get<std::size_t>());

	std::ifstream bin(prefix + ".bin", std::ios::binary);
	if (!bin) {
		throw std::runtime_error("cannot read " + prefix + ".bin");
	}
	const auto &shapes = meta.at("parameters");
	if (shapes.size() != net.parameters().size()) {
		throw std::runtime_error("checkpoint parameter list does not match the network kind");
	}
	for (std::size_t k = 0; k < shapes.size(); ++k) {
		Matrix &m = net.parameters()[k];
		if (shapes[k].at("rows").get<Eigen::Index>() != m.rows() ||
		    shapes[k].at("cols").get<Eigen::Index>() != m.cols()) {
			throw std::runtime_error("checkpoint shape mismatch for " + net.parameter_names()[k]);
		}
		for (Eigen::Index i = 0; i < m.size(); ++i) {
			unsigned char bytes[8];
			if (!bin.read(reinterpret_cast<char *>(bytes), 8)) {
				throw std::runtime_error("checkpoint data truncated");
			}
			std::uint64_t bits = 0;
			for (int b = 0; b < 8; ++b) {
				bits |= static_cast<std::uint64_t>(bytes[b]) << (8 * b);
			}
			m.data()[i] = std::bit_cast<double>(bits);
		}
	}
	return net;
}

} // namespace solarcast
