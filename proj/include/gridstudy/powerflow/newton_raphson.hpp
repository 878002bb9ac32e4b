#pragma once

#include <span>
#include <vector>

#include "gridstudy/powerflow/network.hpp"

namespace gridstudy::powerflow {

inline constexpr double kMismatchTol = 1e-8;  ///< p.u.
inline constexpr int kMaxIterations = 20;
inline constexpr double kMinVoltage = 0.4;  ///< p.u.

enum class FailureCause { None, MaxIterations, SingularJacobian, LowVoltage, NonFinite };

const char* to_string(FailureCause c);

/// Net injection at a bus (generation minus load). Q is ignored at PV buses
/// and both are ignored at the slack.
struct BusInjection {
  double p_mw = 0.0;
  double q_mvar = 0.0;
};

struct BranchFlow {
  double p_from_mw = 0.0;
  double q_from_mvar = 0.0;
  double p_to_mw = 0.0;
  double q_to_mvar = 0.0;
};

struct PowerFlowSolution {
  std::vector<double> vm_pu;
  std::vector<double> va_rad;
  std::vector<double> p_injection_mw;  ///< computed from the final voltages
  std::vector<double> q_injection_mvar;
  std::vector<BranchFlow> flows;
  int iterations = 0;
  bool converged = false;
  FailureCause cause = FailureCause::None;
  double mismatch_pu = 0.0;  ///< max |mismatch| over the solved equations

  double min_voltage() const;
};

/// Injections from the network's own loads and scheduled generation.
std::vector<BusInjection> scheduled_injections(const BusNetwork& net);

/// Polar Newton-Raphson from a flat start (slack and PV buses at their
/// setpoints, PQ buses at 1.0 p.u., all angles 0).
PowerFlowSolution solve_power_flow(const BusNetwork& net, std::span<const BusInjection> injections);
PowerFlowSolution solve_power_flow(const BusNetwork& net);

}  // namespace gridstudy::powerflow
