#pragma once

#include <string>

namespace sitaware {

// Shortest decimal text that parses back to the same double.
std::string format_double(double value);

double normal_cdf(double z);

// Inverse of normal_cdf for p in (0,1); accurate to within a few ulps.
double normal_quantile(double p);

// Two-sided tail probability of |z| under the standard normal.
double two_sided_p(double z);

}  // namespace sitaware
