#pragma once

#include <gmpxx.h>

#include <cctype>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

namespace nilgrowth {

/// Exact rational scalar. mpq_class keeps values canonical (lowest terms,
/// positive denominator) after every arithmetic operation.
using Rational = mpq_class;
using Integer = mpz_class;

/// Flat coefficient vector over the rationals.
using Vector = std::vector<Rational>;

/// Parses "p", "-p", "+p" or "p/q" with decimal digits only. Returns nullopt
/// on anything else, including a zero denominator.
inline std::optional<Rational> parse_rational(std::string_view text)
{
	auto digits = [](std::string_view s) {
		if (s.empty())
			return false;
		for (char c : s)
			if (!std::isdigit(static_cast<unsigned char>(c)))
				return false;
		return true;
	};
	std::string_view body = text;
	bool negative = false;
	if (!body.empty() && (body.front() == '-' || body.front() == '+'))
	{
		negative = body.front() == '-';
		body.remove_prefix(1);
	}
	auto slash = body.find('/');
	std::string_view num = body.substr(0, slash);
	std::string_view den =
	    slash == std::string_view::npos ? std::string_view{"1"} : body.substr(slash + 1);
	if (!digits(num) || !digits(den))
		return std::nullopt;
	Integer p(std::string(num), 10);
	Integer q(std::string(den), 10);
	if (q == 0)
		return std::nullopt;
	if (negative)
		p = -p;
	Rational r(p, q);
	r.canonicalize();
	return r;
}

/// "p/q", or "p" when the denominator is 1.
inline std::string to_string(Rational const &r) { return r.get_str(); }

inline bool is_integer(Rational const &r) { return r.get_den() == 1; }

inline Rational pow(Rational const &base, unsigned exponent)
{
	Rational result = 1;
	for (unsigned i = 0; i < exponent; ++i)
		result *= base;
	return result;
}

inline bool is_zero(Vector const &v)
{
	for (auto const &x : v)
		if (x != 0)
			return false;
	return true;
}

inline Vector zero_vector(size_t n) { return Vector(n, Rational(0)); }

inline Vector unit_vector(size_t n, size_t i)
{
	Vector v(n, Rational(0));
	v[i] = 1;
	return v;
}

inline std::vector<double> to_doubles(Vector const &v)
{
	std::vector<double> out;
	out.reserve(v.size());
	for (auto const &x : v)
		out.push_back(x.get_d());
	return out;
}

inline Rational max_abs(Vector const &v)
{
	Rational m = 0;
	for (auto const &x : v)
		if (abs(x) > m)
			m = abs(x);
	return m;
}

} // namespace nilgrowth
