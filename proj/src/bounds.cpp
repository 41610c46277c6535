#include "omtest/bounds.hpp"

#include <cmath>
#include <limits>
#include <stdexcept>

namespace omtest {

namespace {

constexpr double kInf = std::numeric_limits<double>::infinity();

void check_pm(double pm) {
    if (!(pm > 0.0) || pm > 1.0) throw std::invalid_argument("Pm must be in (0,1]");
}
void check_rm(long long rm) {
    if (rm < 1) throw std::invalid_argument("Rm must be >= 1");
}
void check_pgood(double pgood) {
    if (!(pgood > 0.0) || pgood > 1.0) throw std::invalid_argument("Pgood must be in (0,1]");
}
void check_pgamma(double pgamma) {
    if (pgamma < 0.0 || pgamma > 1.0) throw std::invalid_argument("Pgamma must be in [0,1]");
}

double factorial(int m) {
    double r = 1.0;
    for (int i = 2; i <= m; ++i) r *= i;
    return r;
}

}  // namespace

double incorrect_restart_bound(long long n, const GrowthFunction& f, long long rm, double pm) {
    check_rm(rm);
    check_pm(pm);
    long long blocks = f(n) / rm;
    if (blocks <= 1) return 1.0;  // the bound carries no information here
    return std::min(1.0, 3.0 * std::pow(1.0 - pm, static_cast<double>(blocks - 1)));
}

double restart_bound(long long n, const GrowthFunction& f, long long rm, double pm,
                     double pgood) {
    check_pgood(pgood);
    double incorrect = incorrect_restart_bound(n, f, rm, pm);
    return std::min(1.0, 1.0 - pgood * (1.0 - incorrect));
}

ThresholdX threshold_X(long long rm, double pm, int c) {
    check_rm(rm);
    check_pm(pm);
    if (c < 1) throw std::invalid_argument("c must be >= 1");
    if (pm == 1.0) {
        // The incorrect-restart term is already zero; only the "at least two
        // blocks" requirement remains.
        return {std::pow(2.0 * static_cast<double>(rm), 1.0 / c), true};
    }
    double base = rm * (2.0 + std::log(1.0 / 6.0) / std::log1p(-pm));
    return {std::pow(base, 1.0 / c), false};
}

double fragment_bound(long long n, const GrowthFunction& f, long long rm, double pm,
                      double pgamma) {
    check_rm(rm);
    check_pm(pm);
    check_pgamma(pgamma);
    if (pgamma == 1.0) return kInf;
    return 2.0 * (static_cast<double>(rm) + static_cast<double>(f(n))) +
           9.0 * rm / (pm * (1.0 - pgamma));
}

double total_bound(const BoundInputs& in) {
    check_rm(in.rm);
    check_pm(in.pm);
    check_pgamma(in.pgamma);
    check_pgood(in.pgood);
    if (in.c < 1) throw std::invalid_argument("c must be >= 1");
    if (in.c > 20) throw std::invalid_argument("c above 20 overflows the factorial term");
    if (in.pgamma == 1.0) return kInf;
    double x = threshold_X(in.rm, in.pm, in.c).value;
    double t = 2.0 + 9.0 / (in.pm * (1.0 - in.pgamma));
    double fact = factorial(in.c + 1);
    return 2.0 * std::pow(x, in.c + 1) + x * in.rm * t + (2.0 * in.rm / in.pgood) * t +
           2.0 * fact *
               (2.0 * std::pow(x + in.c, in.c) / in.pgood +
                std::pow(2.0, in.c + 1) / std::pow(in.pgood, in.c + 1));
}

double poly_geom_sum_bound(int c, long long x, double p) {
    if (c < 0 || c > 20) throw std::invalid_argument("c must be in 0..20");
    if (x < 0) throw std::invalid_argument("X must be >= 0");
    if (!(p > 0.0) || !(p < 1.0)) throw std::invalid_argument("p must be in (0,1)");
    double base = static_cast<double>(x) + c;
    return factorial(c + 1) *
           (std::pow(base, c) / (1.0 - p) + std::pow(1.0 - p, -(c + 1.0)));
}

}  // namespace omtest
