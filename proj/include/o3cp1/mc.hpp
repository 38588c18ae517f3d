#pragma once

#include <cstdint>
#include <string>
#include <vector>

#include "o3cp1/actions.hpp"
#include "o3cp1/fields.hpp"
#include "o3cp1/lattice.hpp"
#include "o3cp1/stats.hpp"

namespace o3cp1 {

/// o3: S1[n]. cp1-pullback: S1[hopf(z)]. cp1-reduced: S_red[z].
/// cp1-gauged: z and A sampled jointly; see GaugedRegime.
enum class Model { O3, CP1Pullback, CP1Reduced, CP1Gauged };

/// Which z-marginal the joint (z, A) chain targets. Reduced uses the plain gauged
/// action, whose A-marginal is S_red. Pullback subtracts the per-link gap
/// (1 - Re z^dagger z')^2 / g, whose A-marginal is S1[hopf(z)].
enum class GaugedRegime { Reduced, Pullback };

std::string model_name(Model m);
Model parse_model(const std::string& name);
std::string regime_name(GaugedRegime r);
GaugedRegime parse_regime(const std::string& name);

/// Stream seed for chain `stream` of a run with master seed `master`:
/// splitmix64(master + (stream + 1) * 0x9E3779B97F4A7C15).
std::uint64_t split_seed(std::uint64_t master, std::uint64_t stream);

struct ChainState {
    Model model = Model::O3;
    GaugedRegime regime = GaugedRegime::Pullback;
    Lattice lat;
    Coupling g;
    /// weight exp(-field * sum_x n_z(x)) on top of the action
    double field = 0.0;
    double delta = 0.5;
    bool frozen = false;
    bool self_check = false;
    Rng rng;
    long sweep = 0;

    SpinField n;  ///< o3 field, or hopf(z) kept in sync for cp1 models
    CP1Field z;
    GaugeField a;

    long proposals = 0;
    long accepted = 0;

    ChainState(Model m, const Lattice& lattice, Coupling coupling, std::uint64_t seed);

    bool is_cp1() const { return model != Model::O3; }
    double acceptance() const {
        return proposals == 0 ? 0.0 : static_cast<double>(accepted) / proposals;
    }
    /// Full weight exponent of the current state.
    double total_action() const;
};

/// Upper bound on the proposal width for a model.
double max_proposal_width(Model m);

/// One Metropolis pass over every site in index order; returns the sweep's acceptance.
/// In self-check mode every accepted move's local dS is compared to a full
/// recomputation and a mismatch above 1e-9 throws std::logic_error.
double metropolis_sweep(ChainState& state);

/// Resamples every link from N(Im z^dagger Dz, g/2). Requires a cp1-gauged chain.
void gibbs_gauge_update(ChainState& state);

/// Multiplicative width control toward acceptance 0.5: widths are scaled by
/// clamp(acc / 0.5, 0.5, 2) when acc lies outside [0.4, 0.6]. Throws once frozen.
double tune_proposal(ChainState& state, double acceptance);

/// Translation-averaged n(x).n(x + sep). Components beyond dims/2 are rejected.
double correlator(const SpinField& n, const Lattice& lat, const std::vector<int>& sep);
/// Average of correlator(r e_mu) over the axes mu with r <= dims[mu] / 2.
double axis_correlator(const SpinField& n, const Lattice& lat, int r);
ObservableSeries correlator(const std::vector<SpinField>& snapshots, const Lattice& lat,
                            const std::vector<int>& sep);

struct ChainConfig {
    Model model = Model::O3;
    GaugedRegime regime = GaugedRegime::Pullback;
    std::vector<int> dims = {8, 8};
    double g = 1.0;
    long sweeps = 50000;
    /// negative selects max(1000, sweeps / 10)
    long thermalization = -1;
    long measure_every = 5;
    std::uint64_t seed = 0;
    std::uint64_t stream = 0;
    double delta = 0.5;
    double field = 0.0;
    int max_r = 4;
    bool self_check = false;

    long effective_thermalization() const;
    void validate() const;
};

struct ChainResult {
    ChainConfig config;
    long thermalization = 0;
    std::uint64_t stream_seed = 0;
    double delta = 0.0;              ///< frozen proposal width used for measurements
    double acceptance = 0.0;         ///< Metropolis acceptance over the measurement phase
    std::vector<ObservableSeries> series;  ///< energy, corr_1..corr_R, nz
    SpinField final_n;
    CP1Field final_z;
    GaugeField final_a;

    const ObservableSeries& get(const std::string& name) const;
};

/// Observables: "energy" = S1[n] / volume, "corr_r" = axis_correlator(n, r) for
/// r = 1..max_r where some axis admits r, and "nz" = mean n_z.
ChainResult run_chain(const ChainConfig& config);

/// <n(0).n(1)> on the periodic two-site chain (two links between the same pair)
/// from quadrature of the model's own weight.
double two_site_correlator_quadrature(Model m, GaugedRegime regime, double g);

}  // namespace o3cp1
