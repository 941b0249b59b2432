// core.hpp
//
// Shared vocabulary for the cubesq library: integer aliases, the error
// hierarchy, the execution policy used by every data-parallel kernel, and the
// memory budget that guards the large tables.

#pragma once

#include <complex>
#include <cstddef>
#include <cstdint>
#include <stdexcept>
#include <string>

namespace cubesq {

using i64 = std::int64_t;
using u64 = std::uint64_t;
using i128 = __int128;
using u128 = unsigned __int128;
using cplx = std::complex<double>;

std::string to_string(u128 v);
std::string to_string(i128 v);

// ---------------------------------------------------------------------------
// Errors. Each maps onto one CLI exit code (see tools/cubesq.cpp).
// ---------------------------------------------------------------------------

class Error : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

// A table or bitset would exceed the configured memory budget.
class CapacityError : public Error {
public:
    using Error::Error;
};

// Parameters that make the construction empty or meaningless.
class DegenerateError : public Error {
public:
    using Error::Error;
};

// A precondition on an argument was violated by the caller.
class ContractError : public Error {
public:
    using Error::Error;
};

// A regression gate or internal cross-check failed.
class VerificationError : public Error {
public:
    using Error::Error;
};

// Adaptive quadrature ran out of panels. Carries the best estimate so far.
class QuadratureError : public Error {
public:
    QuadratureError(const std::string& what, cplx partial, double err_estimate)
        : Error(what), partial_(partial), error_(err_estimate) {}
    cplx partial() const { return partial_; }
    double error_estimate() const { return error_; }

private:
    cplx partial_;
    double error_;
};

// ---------------------------------------------------------------------------
// Execution policy. Every kernel with an OpenMP body also keeps a plain serial
// body; the serial one is the reference the tests compare against.
// ---------------------------------------------------------------------------

enum class Exec { serial, parallel };

// Cap on OpenMP worker threads; 0 leaves the runtime default.
void set_max_threads(int n);
int max_threads();

// ---------------------------------------------------------------------------
// Memory budget in bytes. Defaults to 2 GiB; the environment variable
// CUBESQ_MEMORY_BUDGET (bytes) overrides it at first use.
// ---------------------------------------------------------------------------

class MemoryBudget {
public:
    static std::size_t bytes();
    static void set_bytes(std::size_t b);

    // Throws CapacityError when `count` elements of `elem_size` bytes would
    // not fit. `what` names the table in the message.
    static void require(std::size_t count, std::size_t elem_size, const std::string& what);
};

}  // namespace cubesq
