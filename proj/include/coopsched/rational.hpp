// SPDX-License-Identifier: Apache-2.0
//
// coopsched - D2D-cooperative cellular downlink scheduling simulator
//
// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
// http://www.apache.org/licenses/LICENSE-2.0
//
// Unless required by applicable law or agreed to in writing, software
// distributed under the License is distributed on an "AS IS" BASIS,
// WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
// See the License for the specific language governing permissions and
// limitations under the License.
// ------------------------------------------------------------------------

#ifndef COOPSCHED_RATIONAL_HPP
#define COOPSCHED_RATIONAL_HPP

#include <boost/multiprecision/cpp_int.hpp>

namespace coopsched {

/// Exact rational arithmetic for queue-load accounting and polytope
/// membership, where floating point would be ambiguous at region boundaries.
using Rational = boost::multiprecision::cpp_rational;

inline double toDouble(const Rational& r) { return r.convert_to<double>(); }

/// Exact rational value of a double (every finite double is dyadic).
inline Rational exactRational(double x) { return Rational(x); }

}  // namespace coopsched

#endif
