#pragma once

#include <span>
#include <vector>

namespace cxltier {

/// Capital cost inputs for one server. Currency is unitless.
struct TcoParams {
  double direct_dram_gb = 1024.0;
  double cxl_dram_gb = 384.0;
  double dram_cost_per_gb = 4.0;
  double cxl_device_cost = 1500.0;   ///< controller plus slot overhead
  double platform_base_cost = 8000.0;
  double compression_ratio = 2.0;

  /// Throws ArgumentError: costs must be >= 0, capacities > 0, ratio >= 1.
  void validate() const;

  friend bool operator==(const TcoParams&, const TcoParams&) = default;
};

struct TcoReport {
  double baseline_cost_per_gb = 0.0;
  double compressed_cost_per_gb = 0.0;
  double savings_fraction = 0.0;
  double effective_capacity_gb = 0.0;
};

/// Cost per GB with and without compressing the CXL tier. Both scenarios pay
/// the same total; compression only changes the capacity it buys.
TcoReport compute_tco(const TcoParams& p);

/// compute_tco for each ratio in order.
std::vector<TcoReport> sweep(const TcoParams& p, std::span<const double> ratios);

} // namespace cxltier
