#pragma once

#include <vector>

namespace liqrec {

struct GameParams {
    double phi0_g = 0.1;
    double gamma_g = 0.3;
    double lambda_g = 2.0;
    double ambiguity_a = 2.0;

    void validate() const;
};

// Distortion Psi(p) given as a table of (p, Psi(p)) knots on [0,1], strictly
// increasing in both coordinates. Inverted with a monotone cubic (PCHIP).
class TabulatedDistortion {
public:
    TabulatedDistortion(std::vector<double> p, std::vector<double> psi);
    double operator()(double p) const;
    double inverse(double q) const;

private:
    std::vector<double> p_, psi_;
    std::vector<double> d_inv_;   // PCHIP slopes of p as a function of psi
};

double avg_congestion(const GameParams& g);
double run_threshold(double c_bar);
double ambiguous_threshold(double c_bar, double ambiguity_a);
double ambiguous_threshold(double c_bar, const TabulatedDistortion& psi);

struct GasMap {
    double m = 0.0;
    double b = 32.93;
};
double gas_threshold(double theta_amb, const GasMap& map);

}  // namespace liqrec
