#include "cxltier/tco_model.hpp"

#include <cmath>
#include <string>

#include "cxltier/errors.hpp"

namespace cxltier {

void TcoParams::validate() const {
  auto require = [](bool ok, const char* what) {
    if (!ok) throw ArgumentError(std::string("invalid TCO parameters: ") + what);
  };
  auto finite = [](double v) { return std::isfinite(v); };
  require(finite(direct_dram_gb) && direct_dram_gb > 0.0, "direct_dram_gb must be > 0");
  require(finite(cxl_dram_gb) && cxl_dram_gb > 0.0, "cxl_dram_gb must be > 0");
  require(finite(dram_cost_per_gb) && dram_cost_per_gb >= 0.0, "dram_cost_per_gb must be >= 0");
  require(finite(cxl_device_cost) && cxl_device_cost >= 0.0, "cxl_device_cost must be >= 0");
  require(finite(platform_base_cost) && platform_base_cost >= 0.0, "platform_base_cost must be >= 0");
  require(finite(compression_ratio) && compression_ratio >= 1.0, "compression_ratio must be >= 1");
}

TcoReport compute_tco(const TcoParams& p) {
  p.validate();
  const double raw_gb = p.direct_dram_gb + p.cxl_dram_gb;
  const double cost = p.platform_base_cost + raw_gb * p.dram_cost_per_gb + p.cxl_device_cost;

  TcoReport r;
  r.effective_capacity_gb = p.direct_dram_gb + p.compression_ratio * p.cxl_dram_gb;
  r.baseline_cost_per_gb = cost / raw_gb;
  r.compressed_cost_per_gb = cost / r.effective_capacity_gb;
  // 1 - raw/effective, written so that ratio 1 gives exactly 0 and no
  // cancellation occurs near it.
  r.savings_fraction = (p.compression_ratio - 1.0) * p.cxl_dram_gb / r.effective_capacity_gb;
  return r;
}

std::vector<TcoReport> sweep(const TcoParams& p, std::span<const double> ratios) {
  std::vector<TcoReport> out;
  out.reserve(ratios.size());
  for (double ratio : ratios) {
    TcoParams q = p;
    q.compression_ratio = ratio;
    out.push_back(compute_tco(q));
  }
  return out;
}

} // namespace cxltier
