#pragma once

#include <stdexcept>
#include <string>
#include <utility>

namespace nilgrowth {

/// Base class of every error raised by the library.
class error : public std::runtime_error
{
  public:
	using std::runtime_error::runtime_error;
};

class dimension_mismatch : public error
{
  public:
	using error::error;
};

/// Input lies outside what an operation is able to handle (for example a
/// non-integer matrix passed to an integer-only test).
class unsupported_input : public error
{
  public:
	using error::error;
};

class singular_matrix : public error
{
  public:
	using error::error;
};

/// A mathematical invariant that must hold did not; indicates bad input data
/// (e.g. a bracket table violating Jacobi) or an internal bug.
class invariant_violation : public error
{
  public:
	using error::error;
};

class capacity_error : public error
{
  public:
	using error::error;
};

class domain_error : public error
{
  public:
	using error::error;
};

/// Raised when a group is shown not to have polynomial growth, e.g. a
/// semidirect product whose twisting matrix is not quasi-unipotent.
class not_polynomial_growth : public error
{
  public:
	using error::error;
};

/// Malformed textual input (descriptor files, words, weight specs). `where`
/// locates the problem: a JSON pointer, a byte offset, or a token.
class parse_error : public error
{
  public:
	parse_error(std::string kind, std::string where, std::string const &message)
	    : error(kind + " at " + where + ": " + message), kind_(std::move(kind)),
	      where_(std::move(where))
	{}
	std::string const &kind() const { return kind_; }
	std::string const &where() const { return where_; }

  private:
	std::string kind_;
	std::string where_;
};

} // namespace nilgrowth
