#pragma once

#include <Eigen/Dense>
#include <complex>
#include <cstdint>
#include <map>
#include <memory>
#include <mutex>
#include <optional>
#include <string>
#include <vector>

#include "wmtrack/noise.hpp"
#include "wmtrack/protocol.hpp"
#include "wmtrack/units.hpp"

namespace wmtrack {

using CMatrix = Eigen::MatrixXcd;
using cplx = std::complex<double>;

inline constexpr int kMaxNuclei = 3;

struct Nucleus {
    double a_par = 0.0;   // rad/s
    double a_perp = 0.0;  // rad/s
};

struct SpinSystem {
    double b0 = 0.0;  // T
    double gamma_n = gamma_c13;
    std::vector<Nucleus> nuclei;

    int num_nuclei() const { return static_cast<int>(nuclei.size()); }
    int dim() const { return 2 << nuclei.size(); }
    double larmor() const { return gamma_n * b0; }
    // the measurement coupling g of nucleus j under resonant decoupling
    double coupling(int j) const { return nuclei.at(j).a_perp / pi; }
    // precession averaged over both meter branches
    double mean_frequency(int j) const { return larmor() + 0.5 * nuclei.at(j).a_par; }
    void validate() const;
};

enum class MeterLevel { both, ms0, ms_minus1 };
enum class Axis { x, y, z };
enum class Coupling { cpmg, effective };
enum class RecordMode { ensemble, trajectory };

struct Hamiltonian {
    CMatrix h;
    Eigen::VectorXd energies;
    CMatrix vectors;

    static Hamiltonian from_matrix(const CMatrix& h);
    CMatrix propagator(double t) const;
};

// single-spin and embedded operators; the meter is the most significant qubit
CMatrix spin_half(Axis a);
CMatrix meter_operator(Axis a, int num_nuclei);
CMatrix nuclear_operator(int j, Axis a, int num_nuclei, bool with_meter = true);

Hamiltonian build_hamiltonian(const SpinSystem& system, MeterLevel level = MeterLevel::both);

struct PulseTarget {
    bool meter = true;
    int nucleus = 0;
    static PulseTarget electron() { return {true, 0}; }
    static PulseTarget nuclear(int j) { return {false, j}; }
};

class DensityMatrix {
public:
    DensityMatrix() = default;
    DensityMatrix(CMatrix m, int num_nuclei);

    // |0><0| (m_S = 0) times prod_j (1/2 + p_j * 2 Iz_j)/... normalised to unit trace
    static DensityMatrix product(const std::vector<double>& polarizations);
    static DensityMatrix from_nuclear(const CMatrix& rho_nuclear, int num_nuclei);

    const CMatrix& matrix() const { return m_; }
    CMatrix& matrix() { return m_; }
    int num_nuclei() const { return n_; }
    int dim() const { return static_cast<int>(m_.rows()); }

    double trace() const;
    double purity() const;
    double expectation(const CMatrix& op) const;
    CMatrix nuclear_state() const;  // partial trace over the meter
    DensityMatrix reset_meter() const;
    std::vector<std::string> violations(double tol = 1e-10) const;

private:
    CMatrix m_;
    int n_ = 0;
};

DensityMatrix evolve_free(const DensityMatrix& rho, const Hamiltonian& h, double t);
DensityMatrix apply_unitary(const DensityMatrix& rho, const CMatrix& u);
CMatrix rotation(PulseTarget target, Axis axis, double angle, int num_nuclei);
CMatrix meter_rotation(MeterAxis axis, double angle, int num_nuclei);
DensityMatrix apply_pulse(const DensityMatrix& rho, PulseTarget target, Axis axis, double angle);

struct EngineOptions {
    Coupling coupling = Coupling::cpmg;
    RecordMode mode = RecordMode::ensemble;
    double dephasing_rate = 0.0;  // phenomenological nuclear T2*, 1/s
    std::optional<DriftModel> drift;
    bool reinit_kicks = false;
    double kick_t_readout = 2.8e-6;
    bool photons = false;
    ReadoutModel readout;
    double readout_repetitions = 1.0;
    bool check_invariants = false;
};

struct MeasurementRecord {
    std::vector<double> samples;               // <Sz> per readout
    std::vector<double> outcomes;              // +-1/2 in trajectory mode
    std::vector<std::uint64_t> counts;         // photon counts when enabled
    std::vector<double> nuc_x, nuc_y, nuc_z;   // sum over nuclei, before each readout
    double t_s = 0.0;
    std::map<std::string, double> meta;
};

struct StepResult {
    DensityMatrix rho;
    double signal = 0.0;
    std::optional<double> outcome;
};

class Engine {
public:
    explicit Engine(SpinSystem system, EngineOptions options = {});

    const SpinSystem& system() const { return sys_; }
    const EngineOptions& options() const { return opt_; }
    const Hamiltonian& hamiltonian() const { return h_; }

    CMatrix propagator(double t) const;
    // full readout unitary including the enclosing meter pi/2 pulses
    CMatrix block_unitary(const WeakMeasSpec& wm, bool enclosing = true) const;

    DensityMatrix initial_state(const Polarization& pol, bool init_rotation) const;
    DensityMatrix evolve(const DensityMatrix& rho, double t) const;
    DensityMatrix run_cpmg_block(const DensityMatrix& rho, const WeakMeasSpec& wm) const;
    StepResult weak_measurement_step(const DensityMatrix& rho, const WeakMeasSpec& wm, Rng* rng = nullptr) const;
    DensityMatrix polarize_repetitive(const DensityMatrix& rho, int reps, double partial_angle,
                                      const WeakMeasSpec& wm) const;
    MeasurementRecord run_protocol(const Protocol& protocol, std::uint64_t seed, std::uint64_t stream = 0) const;
    // single decoupling block on unpolarised nuclei, returns <Sz>
    double dd_response(const WeakMeasSpec& wm) const;

private:
    CMatrix conditional_rotation(double angle) const;
    CMatrix polarization_gate(double angle, const WeakMeasSpec& wm) const;
    void dephase(CMatrix& rho_nuclear, double t) const;
    void check(const DensityMatrix& rho, const char* where) const;

    SpinSystem sys_;
    EngineOptions opt_;
    Hamiltonian h_;
    CMatrix sz_;
    std::vector<CMatrix> iz_, ix_, iy_;
    mutable std::mutex cache_mutex_;
    mutable std::map<double, CMatrix> cache_;
};

MeasurementRecord run_protocol(const SpinSystem& system, const Protocol& protocol, std::uint64_t seed,
                               const EngineOptions& options = {});
// independent runs on streams 0..runs-1, averaged sample by sample
MeasurementRecord run_averaged(const Engine& engine, const Protocol& protocol, std::uint64_t seed, int runs,
                               int jobs = 1);

}  // namespace wmtrack
