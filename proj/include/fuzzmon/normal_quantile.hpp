#pragma once

namespace fuzzmon {

// Inverse standard normal CDF for p in (0, 1). Acklam's rational
// approximation followed by one Halley step against std::erfc; absolute
// error well below 1e-8 over the open interval.
double normal_quantile(double p);

// Standard normal CDF.
double normal_cdf(double z);

}  // namespace fuzzmon
