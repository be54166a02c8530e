#include "molspec/model/assemble.hpp"

#include <Eigen/Eigenvalues>
#include <Eigen/SparseCore>
#include <algorithm>
#include <cmath>
#include <unsupported/Eigen/KroneckerProduct>

#include "molspec/bath/dephasing.hpp"
#include "molspec/bath/local_modes.hpp"
#include "molspec/bath/phonon_bath.hpp"
#include "molspec/core/errors.hpp"
#include "molspec/core/units.hpp"

namespace molspec::model {

using quantum::Complex;
using quantum::CompositeSpace;
using quantum::Matrix;
using quantum::OperatorKind;
using quantum::OperatorMatrix;

namespace {

constexpr double kBohrTolerance = 1e-9 / units::kHbar;  // 1e−9 meV in 1/ps
constexpr double kRateStep = 0.005;                    // ps
constexpr double kRateWindowTol = 1e-7;
constexpr double kRateWindowCap = 100.0;  // ps

std::vector<double> displacement_ratios(const ModelConfig& config) {
    std::vector<double> r;
    r.reserve(config.modes.size());
    for (const auto& m : config.modes) r.push_back(m.displacement_ratio());
    return r;
}

struct Eigenpair {
    std::size_t row;
    std::size_t col;
};

struct BohrGroup {
    double frequency = 0.0;
    std::vector<Eigenpair> pairs;
};

// Eigenvalues closer than the tolerance share a cluster; each cluster gets its mean energy.
std::vector<double> clustered_energies(const Eigen::VectorXd& e) {
    std::vector<double> out(static_cast<std::size_t>(e.size()));
    Eigen::Index start = 0;
    while (start < e.size()) {
        Eigen::Index stop = start + 1;
        while (stop < e.size() && e(stop) - e(stop - 1) <= kBohrTolerance) ++stop;
        const double mean = e.segment(start, stop - start).mean();
        for (Eigen::Index k = start; k < stop; ++k) out[static_cast<std::size_t>(k)] = mean;
        start = stop;
    }
    return out;
}

std::vector<BohrGroup> bohr_groups(const std::vector<double>& energies, const Matrix& x, const Matrix& y) {
    const std::size_t n = energies.size();
    const double floor = 1e-13 * std::max({x.cwiseAbs().maxCoeff(), y.cwiseAbs().maxCoeff(), 1e-300});
    struct Tagged {
        double xi;
        Eigenpair p;
    };
    std::vector<Tagged> tagged;
    for (std::size_t j = 0; j < n; ++j)
        for (std::size_t i = 0; i < n; ++i) {
            const auto ii = static_cast<Eigen::Index>(i), jj = static_cast<Eigen::Index>(j);
            if (std::abs(x(ii, jj)) > floor || std::abs(y(ii, jj)) > floor) tagged.push_back({energies[j] - energies[i], {i, j}});
        }
    std::sort(tagged.begin(), tagged.end(), [](const Tagged& a, const Tagged& b) { return a.xi < b.xi; });

    std::vector<BohrGroup> groups;
    double last = 0.0;
    for (const auto& t : tagged) {
        if (groups.empty() || t.xi - last > kBohrTolerance) groups.push_back({t.xi, {}});
        groups.back().pairs.push_back(t.p);
        last = t.xi;
    }
    for (auto& g : groups) {
        double sum = 0.0;
        for (const auto& p : g.pairs) sum += energies[p.col] - energies[p.row];
        g.frequency = sum / static_cast<double>(g.pairs.size());
    }
    return groups;
}

struct BathCorrelations {
    std::vector<Complex> xx;
    std::vector<Complex> yy;
    double step = kRateStep;
    double tail_bound = 0.0;
};

BathCorrelations drive_bath_correlations(const bath::PhononBath& bath, double max_frequency) {
    BathCorrelations c;
    if (max_frequency > 0.0) c.step = std::min(kRateStep, std::numbers::pi / (4.0 * max_frequency));
    const double window = bath.decay_window(kRateWindowTol, kRateWindowCap).value_or(kRateWindowCap);
    const auto n = static_cast<std::size_t>(std::ceil(window / c.step)) + 1;
    const auto phi = bath.phi(UniformGrid{0.0, c.step, n});
    const double b2 = bath.debye_waller();
    c.xx.resize(n);
    c.yy.resize(n);
    for (std::size_t k = 0; k < n; ++k) {
        const Complex ep = std::exp(phi[k]), em = std::exp(-phi[k]);
        c.xx[k] = 0.5 * b2 * (ep + em - 2.0);
        c.yy[k] = 0.5 * b2 * (ep - em);
    }
    // The truncated integral misses at most ~|C(τ_w)|·τ_w of a tail decaying no slower than 1/τ².
    const double edge = std::max(std::abs(c.xx.back()), std::abs(c.yy.back()));
    c.tail_bound = 2.0 * edge * c.step * static_cast<double>(n - 1);
    return c;
}

double checked_rate(double rate, double tail_bound, const char* which, double xi) {
    const double tolerance = 1e-12 + tail_bound;
    if (rate < -tolerance)
        throw NumericalError(std::string("drive-dissipator rate ") + which + " is negative (" + std::to_string(rate) +
                             ") at Bohr frequency " + std::to_string(xi) + " 1/ps");
    return std::max(rate, 0.0);
}

// Secular eigenoperator dissipator Σ_g [c_x ℒ_{X(ξ_g)} + c_y ℒ_{Y(ξ_g)}], assembled in the eigenbasis of H and
// rotated back with a single dense product.
std::vector<DriveDissipatorTerm> add_drive_dissipator(quantum::Liouvillian& l, const Matrix& h, const Matrix& x_op,
                                                      const Matrix& y_op, const bath::PhononBath& bath, double prefactor) {
    const Eigen::SelfAdjointEigenSolver<Matrix> es(h);
    if (es.info() != Eigen::Success) throw NumericalError("eigen-decomposition of the driven Hamiltonian failed");
    const Matrix& v = es.eigenvectors();
    const Matrix xt = v.adjoint() * x_op * v;
    const Matrix yt = v.adjoint() * y_op * v;
    const auto energies = clustered_energies(es.eigenvalues());
    auto groups = bohr_groups(energies, xt, yt);

    double max_frequency = 0.0;
    for (const auto& g : groups) max_frequency = std::max(max_frequency, std::abs(g.frequency));
    const auto corr = drive_bath_correlations(bath, max_frequency);

    const auto n = static_cast<Eigen::Index>(h.rows());
    std::vector<Eigen::Triplet<Complex>> triplets;
    Matrix k_eig = Matrix::Zero(n, n);
    std::vector<DriveDissipatorTerm> terms;
    terms.reserve(groups.size());
    for (const auto& g : groups) {
        const double gxx = checked_rate(bath::one_sided_rate(corr.xx, corr.step, g.frequency), corr.tail_bound, "xx", g.frequency);
        const double gyy = checked_rate(bath::one_sided_rate(corr.yy, corr.step, g.frequency), corr.tail_bound, "yy", g.frequency);
        terms.push_back({g.frequency, gxx, gyy});
        const double cx = prefactor * gxx, cy = prefactor * gyy;
        if (cx == 0.0 && cy == 0.0) continue;
        for (const auto& p : g.pairs) {
            const auto i = static_cast<Eigen::Index>(p.row), j = static_cast<Eigen::Index>(p.col);
            for (const auto& q : g.pairs) {
                const auto k = static_cast<Eigen::Index>(q.row), m = static_cast<Eigen::Index>(q.col);
                const Complex s = cx * xt(i, j) * std::conj(xt(k, m)) + cy * yt(i, j) * std::conj(yt(k, m));
                triplets.emplace_back(k * n + i, m * n + j, s);
                if (i == k) k_eig(m, j) += cx * std::conj(xt(i, m)) * xt(i, j) + cy * std::conj(yt(i, m)) * yt(i, j);
            }
        }
    }
    if (triplets.empty()) return terms;

    Eigen::SparseMatrix<Complex> sandwich(n * n, n * n);
    sandwich.setFromTriplets(triplets.begin(), triplets.end());
    const Matrix w = Eigen::kroneckerProduct(v.conjugate(), v).eval();
    const Matrix ws = w * sandwich;
    l.add_superoperator(ws * w.adjoint());

    const Matrix k_orig = v * k_eig * v.adjoint();
    const Matrix id = Matrix::Identity(n, n);
    l.add_kron(id, k_orig, -0.5);
    l.add_kron(k_orig.transpose(), id, -0.5);
    return terms;
}

OperatorMatrix mode_hamiltonian(const CompositeSpace& space, const ModelConfig& config) {
    OperatorMatrix h = OperatorMatrix::zero(space);
    for (std::size_t i = 0; i < config.modes.size(); ++i) {
        const auto n = quantum::embed_operator(space, OperatorKind::number(static_cast<int>(i)));
        h.data += units::energy_to_angular(config.modes[i].delta_meV) * n.data;
    }
    return h;
}

AssembledModel assemble(const ModelConfig& config, bool driven) {
    config.validate();
    const CompositeSpace space = quantum::build_space(config.modes.size());
    const auto ratios = displacement_ratios(config);
    const OperatorMatrix sigma_a = quantum::embed_operator(space, OperatorKind::dressed_sigma(ratios));
    const bath::PhononBath bulk(config.bulk_params(), config.temperature_K);

    ModelRates rates;
    rates.gamma1 = config.gamma1_per_ps();
    rates.gamma_pd = bath::pure_dephasing_rate(config.temperature_K, config.dephasing_params());

    std::vector<quantum::LindbladTerm> terms;
    terms.push_back({sigma_a, rates.gamma1});
    terms.push_back({quantum::embed_operator(space, OperatorKind::sigma_dag_sigma()), 2.0 * rates.gamma_pd});

    std::vector<double> occupations;
    const auto lv = config.lv_params();
    for (std::size_t i = 0; i < config.modes.size(); ++i) {
        const double delta = config.modes[i].delta_meV;
        const double n = bath::bose_occupation(delta, config.temperature_K);
        const double k = bath::kappa(units::energy_to_angular(delta), lv);
        occupations.push_back(n);
        rates.kappa.push_back(k);
        rates.gamma_plus.push_back(k * n);
        rates.gamma_minus.push_back(k * (n + 1.0));
        const auto a = quantum::embed_operator(space, OperatorKind::annihilation(static_cast<int>(i)));
        terms.push_back({a.adjoint(), k * n});
        terms.push_back({a, k * (n + 1.0)});
    }

    OperatorMatrix h = mode_hamiltonian(space, config);
    double omega = 0.0;
    if (driven) {
        if (!config.drive) throw InvalidArgument("assemble_driven requires a drive section");
        omega = units::energy_to_angular(config.drive->omega_meV);
        const auto n_e = quantum::embed_operator(space, OperatorKind::sigma_dag_sigma());
        h.data += units::energy_to_angular(config.drive->detuning_meV) * n_e.data;
        h.data += (0.5 * omega * bulk.mean_displacement()) * (sigma_a.data + sigma_a.data.adjoint());
    }

    quantum::Liouvillian l = quantum::build_liouvillian(h, terms);

    std::vector<DriveDissipatorTerm> drive_terms;
    if (driven && omega != 0.0 && config.drive->include_drive_dissipator && config.bulk_bath.alpha_ps2 > 0.0) {
        const Matrix x_op = sigma_a.data + sigma_a.data.adjoint();
        const Matrix y_op = Complex(0.0, 1.0) * (sigma_a.data - sigma_a.data.adjoint());
        drive_terms = add_drive_dissipator(l, h.data, x_op, y_op, bulk, 0.25 * omega * omega);
    }

    return AssembledModel{space,
                          std::move(h),
                          sigma_a,
                          std::move(l),
                          std::move(rates),
                          ratios,
                          std::move(occupations),
                          bulk.mean_displacement(),
                          polaron_shift(config),
                          driven ? renormalized_rabi(config) : 0.0,
                          std::move(drive_terms)};
}

}  // namespace

quantum::DensityOperator AssembledModel::emission_initial_state(InitialModeState state) const {
    Eigen::Matrix2cd excited = Eigen::Matrix2cd::Zero();
    excited(1, 1) = 1.0;
    Matrix rho = excited;
    for (double n : mode_occupations) {
        const Eigen::Matrix2cd mode = state == InitialModeState::thermal ? quantum::truncated_thermal_state(n)
                                                                         : quantum::truncated_thermal_state(0.0);
        rho = Eigen::kroneckerProduct(rho, mode).eval();
    }
    return {space, std::move(rho)};
}

AssembledModel assemble_undriven(const ModelConfig& config) { return assemble(config, false); }

AssembledModel assemble_driven(const ModelConfig& config) { return assemble(config, true); }

double renormalized_rabi(const ModelConfig& config) {
    if (!config.drive) throw InvalidArgument("renormalized_rabi requires a drive section");
    double factor = bath::mean_displacement(config.temperature_K, config.bulk_params());
    for (const auto& m : config.modes) factor *= bath::mode_displacement_expectation(m.eta_meV, m.delta_meV, config.temperature_K);
    return config.drive->omega_meV * factor;
}

double polaron_shift(const ModelConfig& config) {
    double shift = 0.0;
    for (const auto& m : config.modes) shift += m.eta_meV * m.eta_meV / m.delta_meV;
    const bath::PhononBath bulk(config.bulk_params(), config.temperature_K);
    return shift + units::angular_to_energy(bulk.reorganization());
}

}  // namespace molspec::model
