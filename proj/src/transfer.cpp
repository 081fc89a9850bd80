#include "ers/transfer.hpp"

#include "ers/errors.hpp"

#include <algorithm>
#include <cmath>

namespace ers {

double coupling_efficiency(const TransferParams& p, double speed_kmh) {
  const auto& n = p.eta_nodes;
  if (n.empty()) return 0.0;
  if (speed_kmh <= n.front().first) return n.front().second;
  if (speed_kmh >= n.back().first) return n.back().second;
  for (std::size_t i = 1; i < n.size(); ++i) {
    if (speed_kmh <= n[i].first) {
      double t = (speed_kmh - n[i - 1].first) / (n[i].first - n[i - 1].first);
      return n[i - 1].second + t * (n[i].second - n[i - 1].second);
    }
  }
  return n.back().second;
}

double duty_factor(const TransferParams& p, double speed_kmh) {
  if (speed_kmh <= 0.0) return 0.0;
  return std::min(1.0, speed_kmh / p.duty_ref_kmh);
}

double misalignment_factor(const TransferParams& p, double offset_m) {
  double r = offset_m / p.misalign_cutoff_m;
  return std::max(0.0, 1.0 - r * r);
}

double thermal_derate(const TransferParams& p, double temp_c) {
  if (temp_c <= p.derate_start_c) return 1.0;
  if (temp_c >= p.derate_full_c) return 0.0;
  return (p.derate_full_c - temp_c) / (p.derate_full_c - p.derate_start_c);
}

double transmit_power_kw(const TransferParams& p, double speed_kmh,
                         double offset_m, double temp_c,
                         double receiver_limit_kw) {
  double base = std::min(p.peak_power_kw, receiver_limit_kw);
  return base * misalignment_factor(p, offset_m) * thermal_derate(p, temp_c) *
         duty_factor(p, speed_kmh);
}

double delivered_power_kw(const TransferParams& p, double speed_kmh,
                          double offset_m, double temp_c,
                          double receiver_limit_kw) {
  return transmit_power_kw(p, speed_kmh, offset_m, temp_c, receiver_limit_kw) *
         coupling_efficiency(p, speed_kmh);
}

double energy_per_distance_kwh(const TransferParams& p, double speed_kmh,
                               double distance_km) {
  if (speed_kmh <= 0.0) {
    throw SimError(ErrorCode::ZeroSpeed, "energy_per_distance requires v > 0");
  }
  double hours = distance_km / speed_kmh;
  return p.peak_power_kw * p.coverage * coupling_efficiency(p, speed_kmh) *
         duty_factor(p, speed_kmh) * hours;
}

} // namespace ers
