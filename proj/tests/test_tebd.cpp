#include "ikzm/tebd.hpp"

#include <cmath>
#include <sstream>

#include "dense_reference.hpp"
#include "doctest.h"
#include "ikzm/dmrg.hpp"
#include "ikzm/errors.hpp"
#include "ikzm/fermion.hpp"
#include "ikzm/mpo.hpp"

using namespace ikzm;

namespace {

double max_density_gap(const std::vector<double>& a, const std::vector<double>& b) {
  REQUIRE(a.size() == b.size());
  double worst = 0.0;
  for (size_t i = 0; i < a.size(); ++i) worst = std::max(worst, std::abs(a[i] - b[i]));
  return worst;
}

}  // namespace

TEST_SUITE("tebd") {

TEST_CASE("single bond evolves without Trotter error") {
  ChainSpec spec{2, 2.0, 0.0, 1.0};
  QuenchProtocol ramp = QuenchProtocol::make(1.0, 0.01);
  MpsState psi0 = dmrg_ground_state(spec, field_at(ramp.t_start(), ramp, spec)).state;
  TebdOptions opts;
  opts.samples = 40;
  TebdTrajectory traj = tebd_evolve(psi0, spec, ramp, opts);
  dense::Trajectory ref = dense::evolve_sampled(spec, ramp, opts.samples);
  CHECK(max_density_gap(traj.density, ref.density) < 1e-9);
}

TEST_CASE("exact bond dimension leaves only the Trotter error, which is second order") {
  ChainSpec spec = chain_with_end_ratio(8, 2.0, 0.2, 1.0);
  TebdOptions opts;
  opts.chi_max = 16;  // 2^(L/2), lossless
  opts.cutoff = 0.0;
  opts.samples = 25;

  auto run = [&](double dt) {
    QuenchProtocol ramp = QuenchProtocol::make(1.0, dt);
    MpsState psi0 = dmrg_ground_state(spec, field_at(ramp.t_start(), ramp, spec)).state;
    TebdTrajectory traj = tebd_evolve(psi0, spec, ramp, opts);
    dense::Trajectory ref = dense::evolve_sampled(spec, ramp, opts.samples);
    CHECK(traj.trunc_cumulative.back() == doctest::Approx(0.0));
    return max_density_gap(traj.density, ref.density);
  };

  double err_coarse = run(0.02);
  double err_fine = run(0.01);
  CHECK(err_coarse < 2e-4);
  double ratio = err_coarse / err_fine;
  CHECK(ratio > 3.0);
  CHECK(ratio < 5.0);

  // fourth-order composition beats second order at the same dt
  TebdOptions opts4 = opts;
  opts4.order = 4;
  QuenchProtocol ramp = QuenchProtocol::make(1.0, 0.02);
  MpsState psi0 = dmrg_ground_state(spec, field_at(ramp.t_start(), ramp, spec)).state;
  TebdTrajectory traj4 = tebd_evolve(psi0, spec, ramp, opts4);
  dense::Trajectory ref = dense::evolve_sampled(spec, ramp, opts.samples);
  CHECK(max_density_gap(traj4.density, ref.density) < err_coarse / 10.0);
}

TEST_CASE("agrees with the free-fermion backend through a full ramp") {
  ChainSpec spec = chain_with_end_ratio(12, 2.0, 0.2, 1.0);
  QuenchProtocol ramp = QuenchProtocol::make(2.0, 0.01);
  EvolveOptions fopts;
  fopts.samples = 50;
  FermionTrajectory fermion = run_fermion_quench(spec, ramp, fopts);

  TebdOptions mopts;
  mopts.chi_max = 64;
  mopts.samples = 50;
  MpsState psi0 = dmrg_ground_state(spec, field_at(ramp.t_start(), ramp, spec)).state;
  TebdTrajectory mps = tebd_evolve(psi0, spec, ramp, mopts);

  CHECK(max_density_gap(mps.density, fermion.density) < 1e-3);
  CHECK(std::abs(mps.final_density - fermion.final_density) < 1e-4);
}

TEST_CASE("eigenstate at frozen field has no energy drift") {
  ChainSpec spec{10, 2.0, 0.0, 1.0};
  const double h = 1.2;
  DmrgOptions dopts;
  dopts.chi_max = 64;
  MpsState state = dmrg_ground_state(spec, h, dopts).state;
  IsingMpo mpo = build_ising_mpo(spec, h);
  double e0 = mpo_expectation(state, mpo);

  TebdOptions opts;
  opts.chi_max = 64;
  TebdStepper stepper(spec, opts);
  for (int k = 0; k < 1000; ++k) stepper.step(state, h, 0.01);
  CHECK(std::abs(mpo_expectation(state, mpo) - e0) < 1e-6);
  CHECK(norm(state) == doctest::Approx(1.0).epsilon(1e-9));
}

TEST_CASE("truncation bookkeeping and the budget abort") {
  ChainSpec spec{14, 2.0, 0.0, 1.0};
  QuenchProtocol ramp = QuenchProtocol::make(4.0, 0.02);
  MpsState psi0 = dmrg_ground_state(spec, field_at(ramp.t_start(), ramp, spec)).state;

  TebdOptions tight;
  tight.chi_max = 4;
  tight.trunc_budget = 1e-8;
  tight.samples = 30;
  bool aborted = false;
  try {
    tebd_evolve(psi0, spec, ramp, tight);
  } catch (const TruncationBudgetExceeded& e) {
    aborted = true;
    CHECK(e.time_reached > ramp.t_start());
    CHECK(e.time_reached <= ramp.t_end() + 1e-12);
    CHECK(e.accumulated > tight.trunc_budget);
  }
  CHECK(aborted);

  TebdOptions roomy;
  roomy.chi_max = 64;
  roomy.samples = 30;
  TebdTrajectory traj = tebd_evolve(psi0, spec, ramp, roomy);
  for (size_t k = 1; k < traj.trunc_cumulative.size(); ++k)
    CHECK(traj.trunc_cumulative[k] >= traj.trunc_cumulative[k - 1]);
  CHECK(norm(traj.final_state) == doctest::Approx(1.0).epsilon(1e-9));
}

TEST_CASE("per-step diagnostics stream") {
  ChainSpec spec{6, 2.0, 0.0, 1.0};
  QuenchProtocol ramp = QuenchProtocol::make(0.2, 0.01);
  MpsState psi0 = dmrg_ground_state(spec, field_at(ramp.t_start(), ramp, spec)).state;
  std::ostringstream diag;
  TebdOptions opts;
  opts.samples = 5;
  opts.diagnostics = &diag;
  tebd_evolve(psi0, spec, ramp, opts);
  std::string text = diag.str();
  CHECK(text.rfind("# schema=1", 0) == 0);
  size_t rows = static_cast<size_t>(std::count(text.begin(), text.end(), '\n'));
  CHECK(rows >= 41);  // header plus one row per substep
}

TEST_CASE("input validation") {
  ChainSpec spec{8, 2.0, 0.0, 1.0};
  QuenchProtocol ramp = QuenchProtocol::make(1.0, 0.01);
  MpsState good = x_polarized_state(8);
  MpsState wrong_len = x_polarized_state(6);
  CHECK_THROWS_AS(tebd_evolve(wrong_len, spec, ramp), SimulationError);

  MpsState unnormalized = good;
  unnormalized.site[3][0] *= 2.0;
  unnormalized.site[3][1] *= 2.0;
  CHECK_THROWS_AS(tebd_evolve(unnormalized, spec, ramp), SimulationError);

  QuenchProtocol coarse = QuenchProtocol::make(1.0, 0.2);
  CHECK_THROWS_AS(tebd_evolve(good, spec, coarse), SimulationError);

  TebdOptions few;
  few.samples = 1;
  CHECK_THROWS_AS(tebd_evolve(good, spec, ramp, few), SimulationError);

  TebdOptions bad_order;
  bad_order.order = 3;
  CHECK_THROWS_AS(tebd_evolve(good, spec, ramp, bad_order), ModelError);
}

}  // TEST_SUITE
