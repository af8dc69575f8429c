#pragma once

#include "nilgrowth/matrix.hpp"
#include "nilgrowth/rational.hpp"

#include <map>
#include <string>
#include <utility>

namespace nilgrowth {

/// Univariate polynomial over the rationals, coefficients stored low degree
/// first with no trailing zeros.
class Polynomial
{
  public:
	Polynomial() = default;
	explicit Polynomial(Vector coeffs) : c_(std::move(coeffs)) { trim(); }
	Polynomial(std::initializer_list<Rational> coeffs) : c_(coeffs) { trim(); }

	static Polynomial constant(Rational const &a) { return Polynomial(Vector{a}); }
	/// x^n
	static Polynomial monomial(size_t n, Rational const &a = 1)
	{
		Vector c(n + 1, Rational(0));
		c[n] = a;
		return Polynomial(std::move(c));
	}

	/// Cyclotomic polynomial Phi_m, built as (x^m - 1) / prod_{d | m, d < m} Phi_d.
	static Polynomial cyclotomic(unsigned m)
	{
		static thread_local std::map<unsigned, Polynomial> cache;
		if (auto it = cache.find(m); it != cache.end())
			return it->second;
		Polynomial p = monomial(m) - constant(1);
		for (unsigned d = 1; d < m; ++d)
			if (m % d == 0)
				p = p.divmod(cyclotomic(d)).first;
		cache.emplace(m, p);
		return p;
	}

	bool is_zero() const { return c_.empty(); }
	/// Degree; -1 for the zero polynomial.
	long degree() const { return static_cast<long>(c_.size()) - 1; }
	Rational coeff(size_t i) const { return i < c_.size() ? c_[i] : Rational(0); }
	Rational leading() const { return c_.empty() ? Rational(0) : c_.back(); }
	Vector const &coefficients() const { return c_; }

	friend bool operator==(Polynomial const &, Polynomial const &) = default;

	friend Polynomial operator+(Polynomial const &a, Polynomial const &b)
	{
		Vector c(std::max(a.c_.size(), b.c_.size()), Rational(0));
		for (size_t i = 0; i < c.size(); ++i)
			c[i] = a.coeff(i) + b.coeff(i);
		return Polynomial(std::move(c));
	}
	friend Polynomial operator-(Polynomial const &a, Polynomial const &b)
	{
		Vector c(std::max(a.c_.size(), b.c_.size()), Rational(0));
		for (size_t i = 0; i < c.size(); ++i)
			c[i] = a.coeff(i) - b.coeff(i);
		return Polynomial(std::move(c));
	}
	friend Polynomial operator*(Polynomial const &a, Polynomial const &b)
	{
		if (a.is_zero() || b.is_zero())
			return {};
		Vector c(a.c_.size() + b.c_.size() - 1, Rational(0));
		for (size_t i = 0; i < a.c_.size(); ++i)
			for (size_t j = 0; j < b.c_.size(); ++j)
				c[i + j] += a.c_[i] * b.c_[j];
		return Polynomial(std::move(c));
	}

	/// Quotient and remainder of Euclidean division.
	std::pair<Polynomial, Polynomial> divmod(Polynomial const &d) const
	{
		if (d.is_zero())
			throw domain_error("polynomial division by zero");
		Vector r = c_;
		long dd = d.degree();
		if (degree() < dd)
			return {Polynomial{}, *this};
		Vector q(static_cast<size_t>(degree() - dd + 1), Rational(0));
		for (long i = degree(); i >= dd; --i)
		{
			Rational f = r[static_cast<size_t>(i)] / d.leading();
			if (f == 0)
				continue;
			q[static_cast<size_t>(i - dd)] = f;
			for (long j = 0; j <= dd; ++j)
				r[static_cast<size_t>(i - dd + j)] -= f * d.c_[static_cast<size_t>(j)];
		}
		return {Polynomial(std::move(q)), Polynomial(std::move(r))};
	}

	Polynomial monic() const
	{
		if (is_zero())
			return {};
		Vector c = c_;
		Rational l = leading();
		for (auto &x : c)
			x /= l;
		return Polynomial(std::move(c));
	}

	Polynomial derivative() const
	{
		if (c_.size() <= 1)
			return {};
		Vector c(c_.size() - 1);
		for (size_t i = 1; i < c_.size(); ++i)
			c[i - 1] = c_[i] * static_cast<unsigned long>(i);
		return Polynomial(std::move(c));
	}

	/// Horner evaluation at a square matrix.
	RationalMatrix evaluate(RationalMatrix const &m) const
	{
		RationalMatrix result(m.rows(), m.cols());
		auto id = RationalMatrix::identity(m.rows());
		for (size_t i = c_.size(); i-- > 0;)
			result = result * m + id * c_[i];
		return result;
	}

	Rational evaluate(Rational const &x) const
	{
		Rational result = 0;
		for (size_t i = c_.size(); i-- > 0;)
			result = result * x + c_[i];
		return result;
	}

	std::string to_string() const
	{
		if (is_zero())
			return "0";
		std::string s;
		for (size_t i = c_.size(); i-- > 0;)
		{
			Rational const &a = c_[i];
			if (a == 0)
				continue;
			bool neg = a < 0;
			Rational mag = neg ? Rational(-a) : a;
			if (s.empty())
				s += neg ? "-" : "";
			else
				s += neg ? " - " : " + ";
			if (mag != 1 || i == 0)
				s += mag.get_str();
			if (i >= 1)
				s += "x";
			if (i >= 2)
				s += "^" + std::to_string(i);
		}
		return s;
	}

  private:
	void trim()
	{
		while (!c_.empty() && c_.back() == 0)
			c_.pop_back();
	}
	Vector c_;
};

/// Monic greatest common divisor.
inline Polynomial gcd(Polynomial a, Polynomial b)
{
	while (!b.is_zero())
	{
		auto r = a.divmod(b).second;
		a = std::move(b);
		b = std::move(r);
	}
	return a.monic();
}

/// Characteristic polynomial det(xI - A) by the Faddeev-LeVerrier recursion.
inline Polynomial characteristic_polynomial(RationalMatrix const &a)
{
	if (!a.square())
		throw dimension_mismatch("characteristic polynomial of a non-square matrix");
	size_t n = a.rows();
	Vector c(n + 1, Rational(0));
	c[n] = 1;
	RationalMatrix m(n, n);
	auto id = RationalMatrix::identity(n);
	for (size_t k = 1; k <= n; ++k)
	{
		m = a * m + id * c[n - k + 1];
		c[n - k] = -(a * m).trace() / static_cast<unsigned long>(k);
	}
	return Polynomial(std::move(c));
}

} // namespace nilgrowth
