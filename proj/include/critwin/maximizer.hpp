// maximizer.hpp -- locate the maximizer lambda* of g(lambda) = d/dlambda
// log f_2(lambda) and emit the profile data behind it.

#pragma once

#include <string>

namespace critwin {
namespace maximizer {

struct MaximizerReport {
    double lambda_star = 0.0;
    double g_star = 0.0;  // g(lambda_star)
    double bracket_lo = 0.0;
    double bracket_hi = 0.0;
    // True iff the grid values rise then fall with a single sign change of
    // successive differences.  Unimodality is observed, never assumed.
    bool unimodal_observed = false;
    double grid_step = 0.0;
    // True when the grid argmax sits on the window boundary: the reported
    // maximizer is then untrustworthy and the search window too small.
    bool boundary = false;
};

// Coarse scan of [lo, hi] with step <= 0.05 followed by golden-section
// refinement of the winning bracket down to width tol.
MaximizerReport find_maximizer(double lo, double hi, double tol,
                               double quad_tol = 1e-9, int threads = 0);

// CSV with columns lambda, log_f, dlog_f, d2log_f over
// [lambda_lo, lambda_hi] in steps of `step` (endpoints inclusive).  When
// `preamble` is nonempty it is written as the first line verbatim (the CLI
// uses this to embed the run configuration as a comment).
std::string profile_csv_text(double lambda_lo, double lambda_hi, double step,
                             double quad_tol = 1e-8, int threads = 0,
                             const std::string& preamble = "");

// Same, written to a file.
void emit_profile_csv(double lambda_lo, double lambda_hi, double step,
                      const std::string& path, double quad_tol = 1e-8,
                      int threads = 0, const std::string& preamble = "");

}  // namespace maximizer
}  // namespace critwin
