#include "molspec/observables/g2.hpp"

#include <cmath>

#include "molspec/core/errors.hpp"
#include "molspec/core/units.hpp"
#include "molspec/model/assemble.hpp"
#include "molspec/quantum/dynamics.hpp"

namespace molspec::observables {

CorrelationTrace g2_resonant(const model::ModelConfig& config, const UniformGrid& tau_ns) {
    if (!config.drive) throw InvalidArgument("g2_resonant requires a drive section");
    if (config.drive->detuning_meV != 0.0) throw InvalidArgument("g2_resonant requires resonant drive (zero detuning)");
    if (tau_ns.size == 0 || tau_ns.start != 0.0) throw InvalidArgument("g2_resonant needs a delay grid starting at 0");

    const auto m = model::assemble_driven(config);
    const auto rho_ss = quantum::steady_state(m.liouvillian);
    const auto emitted = m.sigma_a.adjoint() * m.sigma_a;
    const double mean = (emitted * rho_ss).trace().real();
    if (!(mean > 0.0)) throw NumericalError("steady-state emission vanishes; g2 is undefined");
    const auto seed = m.sigma_a * rho_ss * m.sigma_a.adjoint();

    const UniformGrid tau_ps{0.0, units::ns_to_ps(tau_ns.step), tau_ns.size};
    const auto f = quantum::regression_correlator(m.liouvillian, emitted, seed, tau_ps);
    CorrelationTrace out{tau_ns, std::vector<double>(tau_ns.size), true};
    for (std::size_t k = 0; k < tau_ns.size; ++k) out.values[k] = f.values[k].real() / (mean * mean);
    return out;
}

double g2_nonresonant_model(double tau_ns, double visibility, double saturation, double gamma1_per_ns) {
    return 1.0 - visibility * std::exp(-(1.0 + saturation) * gamma1_per_ns * std::abs(tau_ns));
}

}  // namespace molspec::observables
