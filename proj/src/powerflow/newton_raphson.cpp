#include "gridstudy/powerflow/newton_raphson.hpp"

#include <algorithm>
#include <cmath>
#include <complex>
#include <stdexcept>

#include <Eigen/Dense>

namespace gridstudy::powerflow {

namespace {

using cd = std::complex<double>;
using Eigen::Index;

Eigen::MatrixXcd admittance(const BusNetwork& net) {
  const auto n = static_cast<Index>(net.buses.size());
  Eigen::MatrixXcd y = Eigen::MatrixXcd::Zero(n, n);
  for (const auto& br : net.branches) {
    const auto f = static_cast<Index>(net.position(br.from));
    const auto t = static_cast<Index>(net.position(br.to));
    const cd ys = 1.0 / cd(br.r_pu, br.x_pu);
    const cd ysh(0.0, br.b_pu / 2.0);
    y(f, f) += ys + ysh;
    y(t, t) += ys + ysh;
    y(f, t) -= ys;
    y(t, f) -= ys;
  }
  return y;
}

}  // namespace

const char* to_string(FailureCause c) {
  switch (c) {
    case FailureCause::None: return "none";
    case FailureCause::MaxIterations: return "max_iterations";
    case FailureCause::SingularJacobian: return "singular_jacobian";
    case FailureCause::LowVoltage: return "low_voltage";
    case FailureCause::NonFinite: return "non_finite";
  }
  return "unknown";
}

double PowerFlowSolution::min_voltage() const {
  return vm_pu.empty() ? 0.0 : *std::min_element(vm_pu.begin(), vm_pu.end());
}

std::vector<BusInjection> scheduled_injections(const BusNetwork& net) {
  std::vector<BusInjection> out;
  out.reserve(net.buses.size());
  for (const auto& b : net.buses) out.push_back({b.p_gen_mw - b.p_load_mw, -b.q_load_mvar});
  return out;
}

PowerFlowSolution solve_power_flow(const BusNetwork& net) {
  const auto inj = scheduled_injections(net);
  return solve_power_flow(net, inj);
}

PowerFlowSolution solve_power_flow(const BusNetwork& net, std::span<const BusInjection> injections) {
  if (injections.size() != net.buses.size()) {
    throw std::invalid_argument("one injection per bus required");
  }
  const std::size_t n = net.buses.size();
  const Eigen::MatrixXcd ybus = admittance(net);

  std::vector<Index> pvpq;
  std::vector<Index> pq;
  Eigen::VectorXd p_spec(n);
  Eigen::VectorXd q_spec(n);
  Eigen::VectorXd vm(n);
  Eigen::VectorXd va = Eigen::VectorXd::Zero(n);
  for (std::size_t i = 0; i < n; ++i) {
    const auto& b = net.buses[i];
    const auto k = static_cast<Index>(i);
    p_spec(k) = injections[i].p_mw / net.base_mva;
    q_spec(k) = injections[i].q_mvar / net.base_mva;
    vm(k) = b.type == BusType::PQ ? 1.0 : b.v_set_pu;
    if (b.type != BusType::Slack) pvpq.push_back(k);
    if (b.type == BusType::PQ) pq.push_back(k);
  }
  const auto npv = static_cast<Index>(pvpq.size());
  const auto npq = static_cast<Index>(pq.size());
  const Index dim = npv + npq;

  PowerFlowSolution sol;
  Eigen::VectorXcd v(n);
  Eigen::VectorXcd s(n);
  auto evaluate = [&] {
    for (Index k = 0; k < static_cast<Index>(n); ++k) v(k) = std::polar(vm(k), va(k));
    s = v.cwiseProduct((ybus * v).conjugate());
  };

  Eigen::VectorXd f(dim);
  for (int iter = 0;; ++iter) {
    evaluate();
    for (Index a = 0; a < npv; ++a) f(a) = p_spec(pvpq[a]) - s(pvpq[a]).real();
    for (Index a = 0; a < npq; ++a) f(npv + a) = q_spec(pq[a]) - s(pq[a]).imag();
    sol.mismatch_pu = dim == 0 ? 0.0 : f.cwiseAbs().maxCoeff();
    sol.iterations = iter;
    if (!std::isfinite(sol.mismatch_pu)) {
      sol.cause = FailureCause::NonFinite;
      break;
    }
    if (sol.mismatch_pu < kMismatchTol) {
      sol.converged = true;
      break;
    }
    if (iter == kMaxIterations) {
      sol.cause = FailureCause::MaxIterations;
      break;
    }

    // dS/dVa = j diag(V) conj(diag(I) - Y diag(V))
    // dS/dVm = diag(V) conj(Y diag(V/|V|)) + conj(diag(I)) diag(V/|V|)
    const Eigen::VectorXcd current = ybus * v;
    Eigen::MatrixXd jac(dim, dim);
    auto ds_dva = [&](Index i, Index k) {
      cd t = -ybus(i, k) * v(k);
      if (i == k) t += current(i);
      return cd(0.0, 1.0) * v(i) * std::conj(t);
    };
    auto ds_dvm = [&](Index i, Index k) {
      const cd vn = v(k) / vm(k);
      cd t = v(i) * std::conj(ybus(i, k) * vn);
      if (i == k) t += std::conj(current(i)) * vn;
      return t;
    };
    for (Index a = 0; a < npv; ++a) {
      for (Index b = 0; b < npv; ++b) jac(a, b) = ds_dva(pvpq[a], pvpq[b]).real();
      for (Index b = 0; b < npq; ++b) jac(a, npv + b) = ds_dvm(pvpq[a], pq[b]).real();
    }
    for (Index a = 0; a < npq; ++a) {
      for (Index b = 0; b < npv; ++b) jac(npv + a, b) = ds_dva(pq[a], pvpq[b]).imag();
      for (Index b = 0; b < npq; ++b) jac(npv + a, npv + b) = ds_dvm(pq[a], pq[b]).imag();
    }
    const Eigen::PartialPivLU<Eigen::MatrixXd> lu(jac);
    if (!(lu.rcond() > 1e-14)) {
      sol.cause = FailureCause::SingularJacobian;
      break;
    }
    const Eigen::VectorXd dx = lu.solve(f);
    if (!dx.allFinite()) {
      sol.cause = FailureCause::NonFinite;
      break;
    }
    for (Index a = 0; a < npv; ++a) va(pvpq[a]) += dx(a);
    for (Index a = 0; a < npq; ++a) vm(pq[a]) += dx(npv + a);
  }

  sol.vm_pu.assign(vm.data(), vm.data() + n);
  sol.va_rad.assign(va.data(), va.data() + n);
  if (sol.converged && sol.min_voltage() < kMinVoltage) {
    sol.converged = false;
    sol.cause = FailureCause::LowVoltage;
  }
  for (std::size_t i = 0; i < n; ++i) {
    const auto k = static_cast<Index>(i);
    sol.p_injection_mw.push_back(s(k).real() * net.base_mva);
    sol.q_injection_mvar.push_back(s(k).imag() * net.base_mva);
  }
  for (const auto& br : net.branches) {
    const auto fi = static_cast<Index>(net.position(br.from));
    const auto ti = static_cast<Index>(net.position(br.to));
    const cd ys = 1.0 / cd(br.r_pu, br.x_pu);
    const cd ysh(0.0, br.b_pu / 2.0);
    const cd i_from = (ys + ysh) * v(fi) - ys * v(ti);
    const cd i_to = (ys + ysh) * v(ti) - ys * v(fi);
    const cd s_from = v(fi) * std::conj(i_from) * net.base_mva;
    const cd s_to = v(ti) * std::conj(i_to) * net.base_mva;
    sol.flows.push_back({s_from.real(), s_from.imag(), s_to.real(), s_to.imag()});
  }
  return sol;
}

}  // namespace gridstudy::powerflow
