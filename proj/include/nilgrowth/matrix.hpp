#pragma once

#include "nilgrowth/errors.hpp"
#include "nilgrowth/rational.hpp"

#include <cassert>
#include <initializer_list>
#include <string>
#include <string_view>
#include <utility>
#include <vector>

namespace nilgrowth {

/// Dense row-major matrix of exact rationals.
class RationalMatrix
{
  public:
	RationalMatrix() = default;
	RationalMatrix(size_t rows, size_t cols)
	    : rows_(rows), cols_(cols), data_(rows * cols, Rational(0))
	{}
	RationalMatrix(size_t rows, size_t cols, Vector data)
	    : rows_(rows), cols_(cols), data_(std::move(data))
	{
		if (data_.size() != rows_ * cols_)
			throw dimension_mismatch("matrix data size does not match shape");
	}
	RationalMatrix(std::initializer_list<std::initializer_list<Rational>> rows)
	{
		rows_ = rows.size();
		cols_ = rows_ ? rows.begin()->size() : 0;
		data_.reserve(rows_ * cols_);
		for (auto const &row : rows)
		{
			if (row.size() != cols_)
				throw dimension_mismatch("ragged matrix literal");
			data_.insert(data_.end(), row.begin(), row.end());
		}
	}

	static RationalMatrix identity(size_t n)
	{
		RationalMatrix m(n, n);
		for (size_t i = 0; i < n; ++i)
			m(i, i) = 1;
		return m;
	}

	/// Elementary matrix I + value * E_{ij}.
	static RationalMatrix elementary(size_t n, size_t i, size_t j, Rational const &value = 1)
	{
		RationalMatrix m = identity(n);
		m(i, j) += value;
		return m;
	}

	size_t rows() const { return rows_; }
	size_t cols() const { return cols_; }
	bool square() const { return rows_ == cols_; }

	Rational &operator()(size_t i, size_t j)
	{
		assert(i < rows_ && j < cols_);
		return data_[i * cols_ + j];
	}
	Rational const &operator()(size_t i, size_t j) const
	{
		assert(i < rows_ && j < cols_);
		return data_[i * cols_ + j];
	}

	/// Entries viewed as a flat row-major vector.
	Vector const &flat() const { return data_; }

	friend bool operator==(RationalMatrix const &, RationalMatrix const &) = default;

	RationalMatrix &operator+=(RationalMatrix const &b)
	{
		check_same_shape(b);
		for (size_t i = 0; i < data_.size(); ++i)
			data_[i] += b.data_[i];
		return *this;
	}
	RationalMatrix &operator-=(RationalMatrix const &b)
	{
		check_same_shape(b);
		for (size_t i = 0; i < data_.size(); ++i)
			data_[i] -= b.data_[i];
		return *this;
	}
	RationalMatrix &operator*=(Rational const &s)
	{
		for (auto &x : data_)
			x *= s;
		return *this;
	}
	friend RationalMatrix operator+(RationalMatrix a, RationalMatrix const &b) { return a += b; }
	friend RationalMatrix operator-(RationalMatrix a, RationalMatrix const &b) { return a -= b; }
	friend RationalMatrix operator*(RationalMatrix a, Rational const &s) { return a *= s; }
	friend RationalMatrix operator*(Rational const &s, RationalMatrix a) { return a *= s; }
	friend RationalMatrix operator-(RationalMatrix a)
	{
		for (auto &x : a.data_)
			x = -x;
		return a;
	}

	friend RationalMatrix operator*(RationalMatrix const &a, RationalMatrix const &b)
	{
		if (a.cols_ != b.rows_)
			throw dimension_mismatch("matrix product shape mismatch");
		RationalMatrix c(a.rows_, b.cols_);
		if (a.is_integer() && b.is_integer())
		{
			// integer fast path: no gcd normalisation per product
			for (size_t i = 0; i < a.rows_; ++i)
				for (size_t k = 0; k < a.cols_; ++k)
				{
					mpz_srcptr aik = a(i, k).get_num_mpz_t();
					if (mpz_sgn(aik) == 0)
						continue;
					for (size_t j = 0; j < b.cols_; ++j)
					{
						mpz_srcptr bkj = b(k, j).get_num_mpz_t();
						if (mpz_sgn(bkj) != 0)
							mpz_addmul(c(i, j).get_num_mpz_t(), aik, bkj);
					}
				}
			return c;
		}
		Rational tmp;
		for (size_t i = 0; i < a.rows_; ++i)
			for (size_t k = 0; k < a.cols_; ++k)
			{
				auto const &aik = a(i, k);
				if (aik == 0)
					continue;
				for (size_t j = 0; j < b.cols_; ++j)
				{
					auto const &bkj = b(k, j);
					if (bkj == 0)
						continue;
					tmp = aik * bkj;
					c(i, j) += tmp;
				}
			}
		return c;
	}

	bool is_zero() const
	{
		for (auto const &x : data_)
			if (x != 0)
				return false;
		return true;
	}

	bool is_identity() const
	{
		if (!square())
			return false;
		for (size_t i = 0; i < rows_; ++i)
			for (size_t j = 0; j < cols_; ++j)
				if ((*this)(i, j) != (i == j ? 1 : 0))
					return false;
		return true;
	}

	bool is_integer() const
	{
		for (auto const &x : data_)
			if (x.get_den() != 1)
				return false;
		return true;
	}

	/// Upper triangular with ones on the diagonal.
	bool is_unitriangular() const
	{
		if (!square())
			return false;
		for (size_t i = 0; i < rows_; ++i)
		{
			if ((*this)(i, i) != 1)
				return false;
			for (size_t j = 0; j < i; ++j)
				if ((*this)(i, j) != 0)
					return false;
		}
		return true;
	}

	bool is_strictly_upper() const
	{
		if (!square())
			return false;
		for (size_t i = 0; i < rows_; ++i)
			for (size_t j = 0; j <= i; ++j)
				if ((*this)(i, j) != 0)
					return false;
		return true;
	}

	Rational trace() const
	{
		Rational t = 0;
		for (size_t i = 0; i < std::min(rows_, cols_); ++i)
			t += (*this)(i, i);
		return t;
	}

	RationalMatrix transpose() const
	{
		RationalMatrix t(cols_, rows_);
		for (size_t i = 0; i < rows_; ++i)
			for (size_t j = 0; j < cols_; ++j)
				t(j, i) = (*this)(i, j);
		return t;
	}

	Rational determinant() const
	{
		if (!square())
			throw dimension_mismatch("determinant of a non-square matrix");
		RationalMatrix m = *this;
		Rational det = 1;
		size_t n = rows_;
		for (size_t c = 0; c < n; ++c)
		{
			size_t p = c;
			while (p < n && m(p, c) == 0)
				++p;
			if (p == n)
				return 0;
			if (p != c)
			{
				m.swap_rows(p, c);
				det = -det;
			}
			det *= m(c, c);
			for (size_t r = c + 1; r < n; ++r)
			{
				if (m(r, c) == 0)
					continue;
				Rational f = m(r, c) / m(c, c);
				for (size_t k = c; k < n; ++k)
					m(r, k) -= f * m(c, k);
			}
		}
		return det;
	}

	/// Exact Gauss-Jordan inverse.
	RationalMatrix inverse() const
	{
		if (!square())
			throw dimension_mismatch("inverse of a non-square matrix");
		size_t n = rows_;
		if (is_unitriangular())
			return unitriangular_inverse();
		RationalMatrix m = *this;
		RationalMatrix inv = identity(n);
		for (size_t c = 0; c < n; ++c)
		{
			size_t p = c;
			while (p < n && m(p, c) == 0)
				++p;
			if (p == n)
				throw singular_matrix("matrix is not invertible");
			m.swap_rows(p, c);
			inv.swap_rows(p, c);
			Rational s = 1 / m(c, c);
			for (size_t k = 0; k < n; ++k)
			{
				m(c, k) *= s;
				inv(c, k) *= s;
			}
			for (size_t r = 0; r < n; ++r)
			{
				if (r == c || m(r, c) == 0)
					continue;
				Rational f = m(r, c);
				for (size_t k = 0; k < n; ++k)
				{
					m(r, k) -= f * m(c, k);
					inv(r, k) -= f * inv(c, k);
				}
			}
		}
		return inv;
	}

	/// this^e for any integer e (negative exponents invert first).
	RationalMatrix power(long e) const
	{
		if (!square())
			throw dimension_mismatch("power of a non-square matrix");
		RationalMatrix base = e < 0 ? inverse() : *this;
		unsigned long k = e < 0 ? static_cast<unsigned long>(-e) : static_cast<unsigned long>(e);
		RationalMatrix result = identity(rows_);
		while (k)
		{
			if (k & 1)
				result = result * base;
			k >>= 1;
			if (k)
				base = base * base;
		}
		return result;
	}

	/// Canonical exact key: shape and reduced entries. Equal matrices have
	/// equal keys and vice versa.
	std::string key() const
	{
		std::string s;
		s.reserve(data_.size() * 3);
		std::vector<char> buf;
		auto put = [&](mpz_srcptr z) {
			buf.resize(mpz_sizeinbase(z, 10) + 2);
			mpz_get_str(buf.data(), 10, z);
			s += buf.data();
		};
		for (size_t i = 0; i < data_.size(); ++i)
		{
			if (i)
				s.push_back(',');
			put(data_[i].get_num_mpz_t());
			if (mpz_cmp_ui(data_[i].get_den_mpz_t(), 1) != 0)
			{
				s.push_back('/');
				put(data_[i].get_den_mpz_t());
			}
		}
		return s;
	}

	/// Inverse of key() for a known shape.
	static RationalMatrix from_key(size_t rows, size_t cols, std::string_view key)
	{
		RationalMatrix m(rows, cols);
		size_t pos = 0;
		for (size_t i = 0; i < m.data_.size(); ++i)
		{
			size_t end = key.find(',', pos);
			if (end == std::string_view::npos)
				end = key.size();
			if (m.data_[i].set_str(std::string(key.substr(pos, end - pos)), 10) != 0)
				throw dimension_mismatch("from_key: malformed entry");
			m.data_[i].canonicalize();
			pos = end + 1;
		}
		if (pos != key.size() + 1)
			throw dimension_mismatch("from_key: entry count differs from shape");
		return m;
	}

	void swap_rows(size_t a, size_t b)
	{
		if (a == b)
			return;
		for (size_t k = 0; k < cols_; ++k)
			std::swap((*this)(a, k), (*this)(b, k));
	}

  private:
	void check_same_shape(RationalMatrix const &b) const
	{
		if (rows_ != b.rows_ || cols_ != b.cols_)
			throw dimension_mismatch("matrix shapes differ");
	}

	// back substitution for I + strictly upper
	RationalMatrix unitriangular_inverse() const
	{
		size_t n = rows_;
		RationalMatrix inv = identity(n);
		for (size_t j = 0; j < n; ++j)
			for (size_t ii = j; ii-- > 0;)
			{
				Rational s = 0;
				for (size_t k = ii + 1; k <= j; ++k)
					s += (*this)(ii, k) * inv(k, j);
				inv(ii, j) = -s;
			}
		return inv;
	}

	size_t rows_ = 0;
	size_t cols_ = 0;
	Vector data_;
};

inline RationalMatrix commutator(RationalMatrix const &x, RationalMatrix const &y)
{
	return x * y - y * x;
}

/// Group commutator x y x^-1 y^-1.
inline RationalMatrix group_commutator(RationalMatrix const &x, RationalMatrix const &y)
{
	return x * y * x.inverse() * y.inverse();
}

inline std::string to_string(RationalMatrix const &m)
{
	std::string s = "[";
	for (size_t i = 0; i < m.rows(); ++i)
	{
		s += i ? ",[" : "[";
		for (size_t j = 0; j < m.cols(); ++j)
		{
			if (j)
				s += ",";
			s += m(i, j).get_str();
		}
		s += "]";
	}
	return s + "]";
}

} // namespace nilgrowth
