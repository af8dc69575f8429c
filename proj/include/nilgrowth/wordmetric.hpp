#pragma once

#include "nilgrowth/errors.hpp"
#include "nilgrowth/liealg.hpp"
#include "nilgrowth/nilgroup.hpp"

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <limits>
#include <memory>
#include <optional>
#include <string>
#include <unordered_map>
#include <vector>

namespace nilgrowth {

inline constexpr size_t default_ball_budget = 20'000'000;

namespace detail {

/// Least-squares slope of ys against xs.
inline double ls_slope(std::vector<double> const &xs, std::vector<double> const &ys)
{
	size_t n = xs.size();
	if (n < 2)
		return std::numeric_limits<double>::quiet_NaN();
	double mx = 0, my = 0;
	for (size_t i = 0; i < n; ++i)
	{
		mx += xs[i];
		my += ys[i];
	}
	mx /= static_cast<double>(n);
	my /= static_cast<double>(n);
	double sxy = 0, sxx = 0;
	for (size_t i = 0; i < n; ++i)
	{
		sxy += (xs[i] - mx) * (ys[i] - my);
		sxx += (xs[i] - mx) * (xs[i] - mx);
	}
	return sxx == 0 ? std::numeric_limits<double>::quiet_NaN() : sxy / sxx;
}

inline double median(std::vector<double> v)
{
	if (v.empty())
		return std::numeric_limits<double>::quiet_NaN();
	std::sort(v.begin(), v.end());
	size_t m = v.size() / 2;
	return v.size() % 2 ? v[m] : (v[m - 1] + v[m]) / 2;
}

} // namespace detail

/// Census of the word-metric balls V^0 ⊆ V^1 ⊆ ... ⊆ V^R, V = generators,
/// their inverses and the identity. Elements are stored by canonical key in
/// breadth-first order, so each sphere V^r \ V^{r-1} is a contiguous range.
class BallTable
{
  public:
	BallTable(BallTable &&) = default;
	BallTable &operator=(BallTable &&) = default;
	BallTable(BallTable const &) = delete;
	BallTable &operator=(BallTable const &) = delete;

	MatrixGroupDescriptor const &group() const { return group_; }
	size_t max_radius() const { return sizes_.size() - 1; }
	/// sizes()[r] = |V^r|.
	std::vector<size_t> const &sizes() const { return sizes_; }
	size_t size() const { return order_.size(); }

	std::string const &key(size_t i) const { return order_[i]->first; }
	unsigned tau_at(size_t i) const { return order_[i]->second; }
	RationalMatrix element(size_t i) const
	{
		return RationalMatrix::from_key(group_.ambient_size, group_.ambient_size, key(i));
	}
	/// Index range [first, second) of the sphere of radius r.
	std::pair<size_t, size_t> sphere(size_t r) const
	{
		return {r == 0 ? 0 : sizes_.at(r - 1), sizes_.at(r)};
	}

	/// Exact word length, or nullopt beyond the horizon.
	std::optional<unsigned> tau(RationalMatrix const &x) const { return tau(x.key()); }
	std::optional<unsigned> tau(std::string const &key) const
	{
		auto it = index_.find(key);
		if (it == index_.end())
			return std::nullopt;
		return it->second;
	}

	/// Symmetrized generating set used for the expansion (identity omitted).
	std::vector<RationalMatrix> const &steps() const { return steps_; }

  private:
	BallTable() = default;
	friend BallTable balls(MatrixGroupDescriptor const &, size_t, size_t);

	MatrixGroupDescriptor group_;
	std::vector<RationalMatrix> steps_;
	// node-based map: pointers in order_ survive rehashing and moves
	std::unordered_map<std::string, unsigned> index_;
	std::vector<std::pair<std::string const, unsigned> const *> order_;
	std::vector<size_t> sizes_;
};

/// Raised when the element budget runs out; carries every radius completed
/// before that point.
class budget_exceeded : public capacity_error
{
  public:
	budget_exceeded(std::string const &msg, std::shared_ptr<BallTable const> partial)
	    : capacity_error(msg), partial_(std::move(partial))
	{}
	std::shared_ptr<BallTable const> const &partial() const { return partial_; }

  private:
	std::shared_ptr<BallTable const> partial_;
};

/// Breadth-first enumeration of V^0 .. V^R with exact canonical keys.
inline BallTable balls(MatrixGroupDescriptor const &g, size_t radius,
                       size_t budget = default_ball_budget)
{
	BallTable t;
	t.group_ = g;
	std::unordered_map<std::string, bool> seen_step;
	for (auto const &gen : g.generators)
		for (auto const &s : {gen, gen.inverse()})
			if (!s.is_identity() && seen_step.emplace(s.key(), true).second)
				t.steps_.push_back(s);

	RationalMatrix e = g.identity();
	auto first = t.index_.emplace(e.key(), 0u).first;
	t.order_.push_back(&*first);
	t.sizes_.push_back(1);
	std::vector<RationalMatrix> frontier{e};
	for (size_t r = 1; r <= radius && !frontier.empty(); ++r)
	{
		std::vector<RationalMatrix> next;
		for (auto const &x : frontier)
			for (auto const &s : t.steps_)
			{
				RationalMatrix y = x * s;
				auto [it, fresh] = t.index_.emplace(y.key(), static_cast<unsigned>(r));
				if (!fresh)
					continue;
				t.order_.push_back(&*it);
				next.push_back(std::move(y));
				if (t.order_.size() > budget)
				{
					// roll back the unfinished sphere
					for (size_t i = t.sizes_.back(); i < t.order_.size(); ++i)
						t.index_.erase(t.order_[i]->first);
					t.order_.resize(t.sizes_.back());
					auto partial = std::make_shared<BallTable const>(std::move(t));
					throw budget_exceeded("ball budget of " + std::to_string(budget) +
					                          " elements exceeded at radius " + std::to_string(r) +
					                          "; radii 0.." + std::to_string(r - 1) + " complete",
					                      std::move(partial));
				}
			}
		t.sizes_.push_back(t.order_.size());
		frontier = std::move(next);
	}
	// a finite group stops early; the remaining balls are all equal
	while (t.sizes_.size() <= radius)
		t.sizes_.push_back(t.order_.size());
	return t;
}

/// Exact word length up to twice the table horizon: for x outside V^R,
/// tau(x) = R + min{r : x u in V^R for some u in the sphere S_r}. Spheres
/// are decoded lazily and cached.
class HorizonSearch
{
  public:
	explicit HorizonSearch(BallTable const &t) : t_(t) {}

	BallTable const &table() const { return t_; }
	size_t reach() const { return 2 * t_.max_radius(); }

	std::optional<unsigned> tau(RationalMatrix const &x)
	{
		std::string k = x.key();
		if (auto v = t_.tau(k))
			return v;
		size_t big = t_.max_radius();
		for (size_t r = 1; r <= big; ++r)
		{
			auto [lo, hi] = t_.sphere(r);
			decode_until(hi);
			for (size_t i = lo; i < hi; ++i)
				if (t_.tau(x * decoded_[i]))
					return static_cast<unsigned>(big + r);
		}
		return std::nullopt;
	}

	RationalMatrix const &element(size_t i)
	{
		decode_until(i + 1);
		return decoded_[i];
	}

  private:
	void decode_until(size_t hi)
	{
		while (decoded_.size() < hi)
			decoded_.push_back(t_.element(decoded_.size()));
	}

	BallTable const &t_;
	std::vector<RationalMatrix> decoded_;
};

// ---------------------------------------------------------------------------
// Local growth
// ---------------------------------------------------------------------------

inline constexpr double gamma_match_tolerance = 0.15;

struct GammaEstimate
{
	enum class Verdict
	{
		matched,      ///< exponent within tolerance of 1/j
		unmatched,    ///< exponent resolved but not near any 1/j
		bounded,      ///< finite order: tau(x^k) bounded, exponent 0
		inconclusive, ///< too few powers inside the reach of the search
	};
	Verdict verdict = Verdict::inconclusive;
	double exponent = std::numeric_limits<double>::quiet_NaN();
	unsigned j = 0;
	std::vector<unsigned> tau_powers; ///< tau(x^k) for k = 1..resolved
	size_t fit_from = 0, fit_to = 0;  ///< k range of the fit
	double tolerance = gamma_match_tolerance;
};

inline char const *to_string(GammaEstimate::Verdict v)
{
	switch (v)
	{
	case GammaEstimate::Verdict::matched: return "matched";
	case GammaEstimate::Verdict::unmatched: return "unmatched";
	case GammaEstimate::Verdict::bounded: return "bounded";
	case GammaEstimate::Verdict::inconclusive: return "inconclusive";
	}
	return "?";
}

/// gamma(x) = lim log tau(x^k) / log k, estimated by the least-squares slope
/// over the top half of the resolved k range. Needs at least 16 resolved
/// powers; never extrapolates beyond the search reach.
inline GammaEstimate gamma_estimate(RationalMatrix const &x, HorizonSearch &search, size_t k_max,
                                    double tolerance = gamma_match_tolerance)
{
	constexpr size_t min_resolved = 16;
	if (k_max < min_resolved)
		throw domain_error("gamma_estimate: k_max must be at least 16");
	GammaEstimate out;
	out.tolerance = tolerance;
	RationalMatrix p = search.table().group().identity();
	for (size_t k = 1; k <= k_max; ++k)
	{
		p = p * x;
		if (p.is_identity())
		{
			out.verdict = GammaEstimate::Verdict::bounded;
			out.exponent = 0;
			return out;
		}
		auto t = search.tau(p);
		if (!t)
			break;
		out.tau_powers.push_back(*t);
	}
	size_t resolved = out.tau_powers.size();
	if (resolved < min_resolved)
		return out;
	out.fit_from = (resolved + 1) / 2;
	out.fit_to = resolved;
	std::vector<double> xs, ys;
	for (size_t k = out.fit_from; k <= out.fit_to; ++k)
	{
		xs.push_back(std::log(static_cast<double>(k)));
		ys.push_back(std::log(static_cast<double>(out.tau_powers[k - 1])));
	}
	out.exponent = detail::ls_slope(xs, ys);
	out.verdict = GammaEstimate::Verdict::unmatched;
	if (out.exponent > 0)
	{
		double j = std::round(1.0 / out.exponent);
		if (j >= 1 && std::abs(out.exponent - 1.0 / j) <= tolerance)
		{
			out.verdict = GammaEstimate::Verdict::matched;
			out.j = static_cast<unsigned>(j);
		}
	}
	return out;
}

// ---------------------------------------------------------------------------
// Conjugacy operator growth
// ---------------------------------------------------------------------------

struct ConjGrowth
{
	unsigned value = 0;
	/// False when some conjugate lies beyond the search reach; value is then
	/// a lower bound (reach + 1).
	bool exact = true;
};

/// ||x||_n = max tau(y x y^-1) over y in V^n.
inline ConjGrowth conj_growth(RationalMatrix const &x, size_t n, HorizonSearch &search)
{
	auto const &t = search.table();
	if (n > t.max_radius())
		throw domain_error("conj_growth: n exceeds the ball horizon");
	ConjGrowth out;
	size_t hi = t.sizes()[n];
	for (size_t i = 0; i < hi; ++i)
	{
		RationalMatrix const &y = search.element(i);
		auto v = search.tau(y * x * y.inverse());
		if (!v)
		{
			out.exact = false;
			out.value = static_cast<unsigned>(search.reach() + 1);
			return out;
		}
		out.value = std::max(out.value, *v);
	}
	return out;
}

// ---------------------------------------------------------------------------
// Growth classification
// ---------------------------------------------------------------------------

struct DoublingVerdict
{
	enum class Kind
	{
		polynomial,
		exponential,
		inconclusive,
	};
	Kind kind = Kind::inconclusive;
	long degree = -1; ///< d-hat when polynomial
	/// e_n = log2(sizes[n] / sizes[n/2]) for n = 2..R
	std::vector<double> log_ratios;
	double tail_slope = 0;
	double tail_median = 0;
	double tail_max = 0;
	size_t tail_from = 0;
};

inline char const *to_string(DoublingVerdict::Kind k)
{
	switch (k)
	{
	case DoublingVerdict::Kind::polynomial: return "polynomial";
	case DoublingVerdict::Kind::exponential: return "exponential";
	case DoublingVerdict::Kind::inconclusive: return "inconclusive";
	}
	return "?";
}

inline constexpr double doubling_exponential_slope = 0.25;
inline constexpr double doubling_polynomial_slope = 0.125;

/// Classifies growth from doubling ratios sizes[n]/sizes[floor(n/2)]. For
/// polynomial growth of degree d the log-ratios stay near d; for exponential
/// growth with rate lambda they grow like n log2(lambda) / 2. The tail is
/// n in [R/2, R].
inline DoublingVerdict doubling_classifier(std::vector<size_t> const &sizes)
{
	if (sizes.size() < 8)
		throw domain_error("doubling_classifier: need at least 8 radii");
	DoublingVerdict out;
	size_t big = sizes.size() - 1;
	for (size_t n = 2; n <= big; ++n)
		out.log_ratios.push_back(std::log2(static_cast<double>(sizes[n]) /
		                                   static_cast<double>(sizes[n / 2])));
	out.tail_from = std::max<size_t>(2, (big + 1) / 2);
	std::vector<double> xs, ys;
	for (size_t n = out.tail_from; n <= big; ++n)
	{
		xs.push_back(static_cast<double>(n));
		ys.push_back(out.log_ratios[n - 2]);
	}
	out.tail_slope = detail::ls_slope(xs, ys);
	out.tail_median = detail::median(ys);
	out.tail_max = *std::max_element(ys.begin(), ys.end());
	if (out.tail_slope >= doubling_exponential_slope)
		out.kind = DoublingVerdict::Kind::exponential;
	else if (out.tail_slope < doubling_polynomial_slope)
	{
		long d = std::lround(out.tail_median);
		if (out.tail_max < static_cast<double>(d + 1))
		{
			out.kind = DoublingVerdict::Kind::polynomial;
			out.degree = d;
		}
	}
	return out;
}

/// Least-squares slope of log |V^n| against log n over n in [R/2, R]; the
/// empirical growth exponent.
inline double fitted_growth_exponent(std::vector<size_t> const &sizes)
{
	size_t big = sizes.size() - 1;
	std::vector<double> xs, ys;
	for (size_t n = std::max<size_t>(1, (big + 1) / 2); n <= big; ++n)
	{
		xs.push_back(std::log(static_cast<double>(n)));
		ys.push_back(std::log(static_cast<double>(sizes[n])));
	}
	return detail::ls_slope(xs, ys);
}

// ---------------------------------------------------------------------------
// Malcev coordinate profiles
// ---------------------------------------------------------------------------

struct CoordinateProfile
{
	/// max_abs[k][j] = max over x in V^k of |t_j(x)|
	std::vector<std::vector<double>> max_abs;
	std::vector<double> exponents; ///< fitted exponent per adapted basis vector
	std::vector<size_t> layer_of;  ///< 0-based LCS layer per basis vector
	size_t fit_from = 0;
};

/// Growth of the second-kind Malcev coordinates over the balls; the
/// coordinate of a layer-i vector (0-based) should grow at most like k^{i+1}.
inline CoordinateProfile coordinate_growth_profile(BallTable const &t, MalcevAlgebra const &a)
{
	CoordinateProfile out;
	out.layer_of = a.layer_of;
	size_t big = t.max_radius();
	std::vector<double> running(a.dim(), 0.0);
	for (size_t r = 0; r <= big; ++r)
	{
		auto [lo, hi] = t.sphere(r);
		for (size_t i = lo; i < hi; ++i)
		{
			Vector c = malcev_coordinates(t.element(i), a);
			for (size_t j = 0; j < c.size(); ++j)
				running[j] = std::max(running[j], std::abs(c[j].get_d()));
		}
		out.max_abs.push_back(running);
	}
	out.fit_from = std::max<size_t>(1, (big + 1) / 2);
	for (size_t j = 0; j < a.dim(); ++j)
	{
		std::vector<double> xs, ys;
		for (size_t k = out.fit_from; k <= big; ++k)
			if (out.max_abs[k][j] > 0)
			{
				xs.push_back(std::log(static_cast<double>(k)));
				ys.push_back(std::log(out.max_abs[k][j]));
			}
		out.exponents.push_back(detail::ls_slope(xs, ys));
	}
	return out;
}

} // namespace nilgrowth
