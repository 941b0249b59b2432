// arcs.hpp
//
// Generating functions and the analytic side of the representation count
//
//   h(a) = sum_x a_x e(a x^2),   W(a) = sum_p sum_h b_h e(a p^6 h^2),
//   R(n) = int_0^1 h(a)^2 W(a)^2 e(-a n) da.
//
// Contents: exact evaluation of h and W, the arc dissection and classifier,
// the oscillatory integrals v(beta) and v_p(beta), the major-arc models,
// the majorant Upsilon, the singular integral J(n), exact R(n) by integer
// convolution (with a DFT cross-check) and the diagnostic F(alpha).

#pragma once

#include <array>
#include <iosfwd>
#include <optional>
#include <span>
#include <string>
#include <vector>

#include "cubesq/cube_core.hpp"
#include "cubesq/core.hpp"

namespace cubesq {

// --- generating functions ---------------------------------------------------

// Requires role a. Phases are reduced exactly (frac_mul).
cplx eval_h(double alpha, const WeightTable& table);

// Requires role b. An empty prime list throws DegenerateError unless
// allow_empty is set, in which case W = 0.
cplx eval_W(double alpha, const WeightTable& table, std::span<const u64> primes, bool allow_empty = false);

// --- arcs ---------------------------------------------------------------------

inline constexpr double kTau = 18.0 / 31.0;

struct ArcDissection {
    double X = 1;  // denominators q <= X
    double n = 1;  // half-width of the arc around a/q is X / (q n)
    double tau = kTau;

    double half_width(u64 q) const { return X / (static_cast<double>(q) * n); }
};

// M = M(P^{4/5}) and N = M((log P)^tau) for a given n.
ArcDissection major_arcs(const Params& prm, double n);
ArcDissection narrow_arcs(const Params& prm, double n);

struct ArcHit {
    bool major = false;
    i64 a = 0;
    u64 q = 0;
    double beta = 0;  // alpha - a/q
};

// Smallest q with some a/q (0 <= a <= q, gcd 1) within X/(qn) of alpha; ties
// on q go to the nearer centre. Uses convergents of alpha when 2X^2 < n,
// where any qualifying fraction must be a convergent, and scans every
// denominator otherwise.
ArcHit classify(double alpha, const ArcDissection& d);
// The denominator scan alone; the reference used by the tests.
ArcHit classify_scan(double alpha, const ArcDissection& d);

// q^eps w2(q) / (1 + n |beta|) on the major arcs, 0 on the minor arcs.
double upsilon(double alpha, const ArcDissection& d, double eps);

// --- oscillatory integrals ----------------------------------------------------

enum class OscMethod { cubature3d, kernel1d };

struct OscOptions {
    double rel_tol = 1e-6;
    int max_panels = 2000;  // per one-dimensional integration
};

// v(beta) = int over [P/2,P] x [0,P]^2 of e(beta T(x)^2).
cplx osc_integral_v(double beta, double P, OscMethod method, const OscOptions& opt = {});
// v_p(beta) = int over [H1,H2] x [0,H3]^2 of e(beta p^6 T(x)^2).
cplx osc_integral_vp(double beta, const Params& prm, u64 p, OscMethod method, const OscOptions& opt = {});

// B_y(gamma) = (1/6) gamma^{-1/2} (gamma^{1/2} - C)^{-2/3}.
double kernel_B(double gamma, double C);

// --- major-arc models ---------------------------------------------------------

// q^-3 S(q,a) c^2 v(alpha - a/q). Requires gcd(a, q) = 1.
cplx model_V(double alpha, i64 a, u64 q, const Params& prm, double c_eta, const OscOptions& opt = {});
// sum_p q^-3 S(q,a) c^2 v_p(alpha - a/q).
cplx model_W(double alpha, i64 a, u64 q, const Params& prm, std::span<const u64> primes, double c_eta,
             const OscOptions& opt = {});

struct FDiagnostic {
    double alpha = 0;
    ArcHit hit;
    cplx h, W, h_model, W_model;
    cplx F;  // h^2 W^2 - h*^2 W*^2
};

FDiagnostic F_diagnostic(double alpha, const Params& prm, const WeightTable& table_a, const WeightTable& table_b,
                         std::span<const u64> primes, const ArcDissection& d, const OscOptions& opt = {});

// --- exact representation count -------------------------------------------------

// Sparse square-sum distributions: sum over ordered pairs of a_x a_x' at
// x^2 + x'^2, and of b_h b_h' over prime pairs at p^6 h^2 + p'^6 h'^2.
struct PairSums {
    std::vector<u64> value;   // ascending
    std::vector<u64> weight;  // parallel
};
PairSums pair_sums_h(const WeightTable& table_a);
PairSums pair_sums_W(const WeightTable& table_b, std::span<const u64> primes);

u128 exact_Rn(u64 n, const WeightTable& table_a, const WeightTable& table_b, std::span<const u64> primes);

// R(n) for n in [lo, hi], by the same sparse convolution.
std::vector<u128> exact_R_range(u64 lo, u64 hi, const WeightTable& table_a, const WeightTable& table_b,
                                std::span<const u64> primes, Exec exec = Exec::parallel);

// Every R(n) as the Fourier coefficient of h^2 W^2 sampled on a DFT grid of
// G points, G the smallest power of two above the largest attainable n.
// Entries are rounded; throws VerificationError if any is not within 0.25 of
// an integer.
struct DftCounts {
    u64 grid = 0;
    std::vector<u64> R;  // R[n], n < grid
    double max_rounding = 0;
};
DftCounts exact_R_dft(const WeightTable& table_a, const WeightTable& table_b, std::span<const u64> primes);

// --- singular integral ----------------------------------------------------------

// One summand of J(n): the four variables u_i run over [lo_i, hi_i] and
// contribute g_i(u) = (s_i u^3 + C_i)^2.
struct JFactor {
    double s = 1, C = 0, lo = 0, hi = 0;
};
using JConfig = std::array<JFactor, 4>;

// int du_1..du_4 delta(n - sum g_i(u_i)), the density of sum g_i at n; a
// nested quadrature over u_1, u_2, u_3 with u_4 solved exactly.
struct InnerResult {
    double value = 0;
    double error = 0;
    bool converged = true;
};
InnerResult J_inner(double n, const JConfig& cfg, double rel_tol = 1e-6);
// The same quantity as int V(beta) e(-n beta) d beta over |beta| <= beta_max.
// Slow; kept as a cross-check at small scale.
InnerResult J_inner_beta(double n, const JConfig& cfg, double beta_max, double rel_tol = 1e-6);

struct JOptions {
    u64 seed = 1;
    u64 samples = 1000;
    bool restricted = false;  // primes <= 0.51 M, y_3, y_4 components <= P/2
    double rel_tol = 1e-6;
};

struct JEstimate {
    double value = 0;
    double stderr_ = 0;
    u64 samples = 0;
    double configurations = 0;  // size of the discrete sum being sampled
    u64 quadrature_failures = 0;
    bool flagged = false;        // error bar inflated by quadrature failures
};

JEstimate singular_integral_J(double n, const Params& prm, std::span<const u64> primes, const JOptions& opt,
                              Exec exec = Exec::parallel);

// --- main term ------------------------------------------------------------------

struct MainTermReport {
    u64 n_lo = 0, n_hi = 0;       // window; a single n when equal
    std::vector<u64> sampled_n;
    double R_exact = 0;           // mean of R(n) over the whole window
    double S_trunc = 0;           // mean of S(n; Q) over sampled n
    double J_est = 0;             // mean of J(n) over sampled n
    double J_stderr = 0;
    double predicted = 0;         // mean of S(n;Q) J(n) over sampled n
    double ratio = 0;             // R_exact / predicted
};

MainTermReport main_term_report(u64 n_lo, u64 n_hi, int n_samples, u64 Q, const Params& prm,
                                const WeightTable& table_a, const WeightTable& table_b,
                                std::span<const u64> primes, const JOptions& jopt);

void write_report_json(std::ostream& os, const MainTermReport& r);

}  // namespace cubesq
