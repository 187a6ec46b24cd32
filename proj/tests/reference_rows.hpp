#pragma once

// Reference NP-style measurements (HSPICE) for the four widths and three
// technologies, plus the domino rows for Si and Cnt.

#include <vector>

#include "clachar/characterizer.hpp"

namespace clachar::testing {

inline std::vector<MetricsRecord> reference_np_rows() {
  using F = Flavor;
  const auto np = Style::Np;
  return {
      MetricsRecord::make(8, np, F::Si, 85.1609e-6, 14.42e-5, 155.61e-12),
      MetricsRecord::make(8, np, F::Cnt, 33.728e-9, 2.615e-5, 132.74e-15),
      MetricsRecord::make(8, np, F::Hybrid, 31.162e-9, 2.147e-5, 4.062e-12),
      MetricsRecord::make(16, np, F::Si, 132.9407e-6, 28.147e-5, 195.02e-12),
      MetricsRecord::make(16, np, F::Cnt, 61.7694e-9, 5.665e-5, 385.05e-15),
      MetricsRecord::make(16, np, F::Hybrid, 59.986e-9, 4.263e-5, 4.944e-12),
      MetricsRecord::make(32, np, F::Si, 323.3528e-6, 43.834e-5, 262.36e-12),
      MetricsRecord::make(32, np, F::Cnt, 76.8077e-9, 11.923e-5, 680.36e-15),
      MetricsRecord::make(32, np, F::Hybrid, 77.843e-9, 10.459e-5, 14.337e-12),
      MetricsRecord::make(64, np, F::Si, 957.513e-6, 122.50e-5, 280.43e-12),
      MetricsRecord::make(64, np, F::Cnt, 164.1022e-9, 15.573e-5, 852.07e-15),
      MetricsRecord::make(64, np, F::Hybrid, 163.504e-9, 14.855e-5, 20.137e-12),
  };
}

inline std::vector<MetricsRecord> reference_domino_rows() {
  using F = Flavor;
  const auto d = Style::Domino;
  return {
      MetricsRecord::make(8, d, F::Si, 85.3174e-6, 3.0448e-4, 96.388e-12),
      MetricsRecord::make(8, d, F::Cnt, 35.1642e-6, 4.6374e-5, 201.578e-15),
      MetricsRecord::make(16, d, F::Si, 212.7797e-6, 3.6008e-4, 102.64e-12),
      MetricsRecord::make(16, d, F::Cnt, 63.5934e-6, 5.8339e-5, 339.27e-15),
      MetricsRecord::make(32, d, F::Si, 234.8754e-6, 4.4421e-4, 174.63e-12),
      MetricsRecord::make(32, d, F::Cnt, 79.3373e-9, 1.2223e-4, 658.85e-15),
      MetricsRecord::make(64, d, F::Si, 301.5764e-6, 5.8691e-4, 223.85e-12),
      MetricsRecord::make(64, d, F::Cnt, 153.8624e-9, 1.9588e-4, 708.64e-15),
  };
}

}  // namespace clachar::testing
