#pragma once

#include <gmpxx.h>

#include <string>
#include <string_view>

namespace nchodge {

/// Exact rational number, always in canonical form.
using Scalar = mpq_class;

std::string to_string(const Scalar& s);

/// Parses "7", "-3/4" or "+2". Throws InputError on malformed text or zero denominator.
Scalar parse_scalar(std::string_view text);

Scalar factorial(unsigned n);

}  // namespace nchodge
