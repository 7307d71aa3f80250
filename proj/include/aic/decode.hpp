#pragma once

#include <functional>
#include <optional>
#include <span>
#include <vector>

#include "aic/linalg.hpp"

namespace aic {

struct SolverOptions {
    int max_iters = 20000;
    // Base feasibility tolerance. A solve is feasible when the constraint
    // slack is at most tol_feas * (1 + tau + ||A||): with noise-shaped
    // operators whose norms span eight orders of magnitude an absolute slack
    // test is vacuous, so the acceptance scale carries the operator norm.
    double tol_feas = 1e-6;
    double tol_gap = 1e-8;   // relative objective stagnation over `window`
    int window = 50;
    // splitting penalties for the measurement and l1 consensus blocks, in
    // units of the internally normalized (unit-norm) measurement operator
    double rho_measure = 1000.0;
    double rho_consensus = 150.0;
    double over_relax = 1.7;
};

enum class SolveStatus { converged, iteration_cap, infeasible };

struct DecodeResult {
    std::vector<double> x_hat;
    double objective = 0.0;      // ||x_hat||_1
    double feas_residual = 0.0;  // max constraint slack / (1 + tau + ||A||)
    long iterations = 0;
    bool converged = false;
    SolveStatus status = SolveStatus::iteration_cap;
    std::vector<double> u_hat;   // noisy variants only
    std::vector<double> e_hat;   // noisy variants only
};

// Matrix-free operator: the solver touches it through products only.
struct LinOp {
    int rows = 0;
    int cols = 0;
    std::function<void(std::span<const double>, std::span<double>)> apply;    // y = A x
    std::function<void(std::span<const double>, std::span<double>)> apply_t;  // y = A^T x
};

LinOp make_linop(MatView a);
// B o D^{-r} o Phi applied by successive products; no dense composition.
LinOp compose_encoder_op(MatView b, int r, MatView phi);

// min ||x||_1  s.t.  ||A x - b||_2 <= tau, by operator splitting with an
// exact ball projection. Deterministic given opts. Infeasible instances
// (tau below the distance of b to the range) are reported via status.
DecodeResult solve_ball_l1(const LinOp& a, std::span<const double> b, double tau,
                           const SolverOptions& opts = {});

// min ||z||_1 s.t. ||B D^{-r}(Phi z - q)|| <= 3 C m, with C the quantizer's
// stability constant. The composed constraint is handled in factored form:
// the row space of B D^{-r} is extracted once and the ball becomes an exact
// ellipsoid projection, which is what makes the solve tractable at the
// operator's conditioning.
DecodeResult decode_noiseless(MatView phi, MatView b, std::span<const double> q, int r, double c,
                              const SolverOptions& opts = {});

// Same constraint shape with tau = (2 + eta) * gamma * sqrt(m L).
DecodeResult decode_first_order(MatView phi, MatView b, std::span<const double> q, int r,
                                double gamma, double eta = 1.0, const SolverOptions& opts = {});

enum class NoisyTauPolicy {
    uniform,      // u-ball radius 3 C m
    non_uniform,  // u-ball radius 2 C sqrt(L m)
};

// min ||x||_1 over (x, u, e) s.t. BD^{-r}(Phi x + e) - B u = BD^{-r} q,
// ||B u|| <= tau_u, ||e|| <= sqrt(m) eps. B is onto, so u enters only
// through its image: the solve runs over (x, e) against the equivalent
// ellipsoid ||BD^{-r}(Phi x + e - q)|| <= tau_u and u_hat is recovered as the
// least-norm lift B^T (B B^T)^{-1} BD^{-r}(Phi x_hat + e_hat - q).
DecodeResult decode_noisy(MatView phi, MatView b, std::span<const double> q, int r, double c,
                          double eps, NoisyTauPolicy policy = NoisyTauPolicy::uniform,
                          const SolverOptions& opts = {});

// Classic comparator: min ||z||_1 s.t. ||Phi z - q|| <= delta sqrt(m) / 2.
DecodeResult decode_msq_bpdn(MatView phi, std::span<const double> q, double delta,
                             const SolverOptions& opts = {});

enum class CodewordDecoder { noiseless, first_order, noisy, non_uniform };

struct Codeword;  // encode.hpp

// Decode straight from the transmitted codeword c = B D^{-r} q: the ball
// ||B D^{-r} phi z - c|| <= tau is recentered on the least-norm preimage of c
// in the factored row space, so no q is needed on the decoder side.
DecodeResult decode_codeword(MatView phi, MatView b, const Codeword& cw, CodewordDecoder which,
                             double c_const, double eps = 0.0, const SolverOptions& opts = {});

// Two-stage comparator: support from a ball solve at tau = delta sqrt(m)/2,
// then least squares of D^{-r} Phi_T against D^{-r} q on the recovered
// support (rank checked via pivoted QR; deficiency throws NumericError).
DecodeResult decode_two_stage_sobolev(MatView phi, std::span<const double> q, int r, int k,
                                      double delta, const SolverOptions& opts = {});

}  // namespace aic
