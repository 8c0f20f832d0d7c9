#include "wmtrack/engine.hpp"

#include <Eigen/Eigenvalues>
#include <algorithm>
#include <atomic>
#include <bit>
#include <cmath>
#include <thread>

#include "wmtrack/errors.hpp"

namespace wmtrack {

namespace {

const cplx I1(0.0, 1.0);

CMatrix kron(const CMatrix& a, const CMatrix& b) {
    CMatrix out(a.rows() * b.rows(), a.cols() * b.cols());
    for (Eigen::Index i = 0; i < a.rows(); ++i)
        for (Eigen::Index j = 0; j < a.cols(); ++j)
            out.block(i * b.rows(), j * b.cols(), b.rows(), b.cols()) = a(i, j) * b;
    return out;
}

CMatrix embed(const CMatrix& op, int slot, int num_qubits) {
    CMatrix out = CMatrix::Identity(1, 1);
    for (int q = 0; q < num_qubits; ++q) out = kron(out, q == slot ? op : CMatrix(CMatrix::Identity(2, 2)));
    return out;
}

CMatrix su2(Axis axis, double angle) {
    return std::cos(0.5 * angle) * CMatrix(CMatrix::Identity(2, 2)) - I1 * (2.0 * std::sin(0.5 * angle)) * spin_half(axis);
}

// exp(i * G) for Hermitian G
CMatrix expi_hermitian(const CMatrix& g) {
    Eigen::SelfAdjointEigenSolver<CMatrix> es(g);
    Eigen::VectorXcd ph = (I1 * es.eigenvalues().cast<cplx>()).array().exp();
    return es.eigenvectors() * ph.asDiagonal() * es.eigenvectors().adjoint();
}

// K_m = <m|U|0> blocks of a meter-by-nuclei unitary
std::pair<CMatrix, CMatrix> kraus_from_ground(const CMatrix& u) {
    Eigen::Index d = u.rows() / 2;
    return {u.block(0, 0, d, d), u.block(d, 0, d, d)};
}

double real_trace(const CMatrix& m) { return m.trace().real(); }

}  // namespace

void SpinSystem::validate() const {
    std::vector<std::string> bad;
    if (nuclei.size() > static_cast<std::size_t>(kMaxNuclei))
        throw DimensionError("at most " + std::to_string(kMaxNuclei) + " nuclei are supported");
    if (!std::isfinite(b0)) bad.push_back("b0 must be finite");
    if (!std::isfinite(gamma_n)) bad.push_back("gamma_n must be finite");
    for (std::size_t j = 0; j < nuclei.size(); ++j) {
        if (!(nuclei[j].a_perp >= 0.0)) bad.push_back("a_perp of nucleus " + std::to_string(j) + " must be >= 0");
        if (!std::isfinite(nuclei[j].a_par)) bad.push_back("a_par of nucleus " + std::to_string(j) + " must be finite");
    }
    if (!bad.empty()) throw ConfigError(bad);
}

Hamiltonian Hamiltonian::from_matrix(const CMatrix& h) {
    Hamiltonian out;
    out.h = 0.5 * (h + h.adjoint());
    Eigen::SelfAdjointEigenSolver<CMatrix> es(out.h);
    out.energies = es.eigenvalues();
    out.vectors = es.eigenvectors();
    return out;
}

CMatrix Hamiltonian::propagator(double t) const {
    Eigen::VectorXcd ph = (-I1 * t * energies.cast<cplx>()).array().exp();
    return vectors * ph.asDiagonal() * vectors.adjoint();
}

CMatrix spin_half(Axis a) {
    CMatrix s(2, 2);
    switch (a) {
        case Axis::x: s << 0.0, 0.5, 0.5, 0.0; break;
        case Axis::y: s << 0.0, cplx(0.0, -0.5), cplx(0.0, 0.5), 0.0; break;
        case Axis::z: s << 0.5, 0.0, 0.0, -0.5; break;
    }
    return s;
}

CMatrix meter_operator(Axis a, int num_nuclei) { return embed(spin_half(a), 0, num_nuclei + 1); }

CMatrix nuclear_operator(int j, Axis a, int num_nuclei, bool with_meter) {
    if (j < 0 || j >= num_nuclei) throw DimensionError("nucleus index out of range");
    return with_meter ? embed(spin_half(a), j + 1, num_nuclei + 1) : embed(spin_half(a), j, num_nuclei);
}

Hamiltonian build_hamiltonian(const SpinSystem& system, MeterLevel level) {
    system.validate();
    const int n = system.num_nuclei();
    const double w0 = system.larmor();
    if (level == MeterLevel::both) {
        CMatrix p1 = 0.5 * CMatrix::Identity(2 << n, 2 << n) - meter_operator(Axis::z, n);
        CMatrix h = CMatrix::Zero(2 << n, 2 << n);
        for (int j = 0; j < n; ++j) {
            const auto& nu = system.nuclei[j];
            CMatrix iz = nuclear_operator(j, Axis::z, n);
            CMatrix ix = nuclear_operator(j, Axis::x, n);
            h += w0 * iz + p1 * (nu.a_par * iz + nu.a_perp * ix);
        }
        return Hamiltonian::from_matrix(h);
    }
    const int d = 1 << n;
    CMatrix h = CMatrix::Zero(d, d);
    double on = level == MeterLevel::ms_minus1 ? 1.0 : 0.0;
    for (int j = 0; j < n; ++j) {
        const auto& nu = system.nuclei[j];
        h += (w0 + on * nu.a_par) * nuclear_operator(j, Axis::z, n, false) +
             on * nu.a_perp * nuclear_operator(j, Axis::x, n, false);
    }
    return Hamiltonian::from_matrix(h);
}

DensityMatrix::DensityMatrix(CMatrix m, int num_nuclei) : m_(std::move(m)), n_(num_nuclei) {
    if (m_.rows() != (2 << n_) || m_.cols() != m_.rows()) throw DimensionError("density matrix size mismatch");
}

DensityMatrix DensityMatrix::product(const std::vector<double>& pol) {
    const int n = static_cast<int>(pol.size());
    if (n > kMaxNuclei) throw DimensionError("too many nuclei");
    CMatrix nuc = CMatrix::Identity(1, 1);
    for (double p : pol) {
        CMatrix r = CMatrix::Zero(2, 2);
        r(0, 0) = 0.5 * (1.0 + p);
        r(1, 1) = 0.5 * (1.0 - p);
        nuc = kron(nuc, r);
    }
    return from_nuclear(nuc, n);
}

DensityMatrix DensityMatrix::from_nuclear(const CMatrix& rho_nuclear, int num_nuclei) {
    const int d = 1 << num_nuclei;
    if (rho_nuclear.rows() != d) throw DimensionError("nuclear state size mismatch");
    CMatrix m = CMatrix::Zero(2 * d, 2 * d);
    m.block(0, 0, d, d) = rho_nuclear;
    return DensityMatrix(m, num_nuclei);
}

double DensityMatrix::trace() const { return real_trace(m_); }
double DensityMatrix::purity() const { return real_trace(m_ * m_); }
double DensityMatrix::expectation(const CMatrix& op) const { return real_trace(op * m_); }

CMatrix DensityMatrix::nuclear_state() const {
    const int d = 1 << n_;
    return m_.block(0, 0, d, d) + m_.block(d, d, d, d);
}

DensityMatrix DensityMatrix::reset_meter() const { return from_nuclear(nuclear_state(), n_); }

std::vector<std::string> DensityMatrix::violations(double tol) const {
    std::vector<std::string> bad;
    if ((m_ - m_.adjoint()).cwiseAbs().maxCoeff() > tol) bad.push_back("density matrix is not Hermitian");
    if (std::abs(trace() - 1.0) > tol) bad.push_back("density matrix trace differs from 1");
    Eigen::SelfAdjointEigenSolver<CMatrix> es(0.5 * (m_ + m_.adjoint()), Eigen::EigenvaluesOnly);
    if (es.eigenvalues().minCoeff() < -1e-9) bad.push_back("density matrix has a negative eigenvalue");
    return bad;
}

DensityMatrix apply_unitary(const DensityMatrix& rho, const CMatrix& u) {
    return DensityMatrix(u * rho.matrix() * u.adjoint(), rho.num_nuclei());
}

DensityMatrix evolve_free(const DensityMatrix& rho, const Hamiltonian& h, double t) {
    if (t < 0.0) throw DomainError("evolution time must be non-negative");
    if (t == 0.0) return rho;
    return apply_unitary(rho, h.propagator(t));
}

CMatrix rotation(PulseTarget target, Axis axis, double angle, int num_nuclei) {
    if (!target.meter && (target.nucleus < 0 || target.nucleus >= num_nuclei))
        throw DimensionError("pulse target nucleus out of range");
    int slot = target.meter ? 0 : target.nucleus + 1;
    return embed(su2(axis, angle), slot, num_nuclei + 1);
}

CMatrix meter_rotation(MeterAxis axis, double angle, int num_nuclei) {
    switch (axis) {
        case MeterAxis::x: return rotation(PulseTarget::electron(), Axis::x, angle, num_nuclei);
        case MeterAxis::y: return rotation(PulseTarget::electron(), Axis::y, angle, num_nuclei);
        case MeterAxis::minus_x: return rotation(PulseTarget::electron(), Axis::x, -angle, num_nuclei);
        case MeterAxis::minus_y: return rotation(PulseTarget::electron(), Axis::y, -angle, num_nuclei);
    }
    return CMatrix();
}

DensityMatrix apply_pulse(const DensityMatrix& rho, PulseTarget target, Axis axis, double angle) {
    return apply_unitary(rho, rotation(target, axis, angle, rho.num_nuclei()));
}

Engine::Engine(SpinSystem system, EngineOptions options) : sys_(std::move(system)), opt_(std::move(options)) {
    sys_.validate();
    h_ = build_hamiltonian(sys_);
    const int n = sys_.num_nuclei();
    sz_ = meter_operator(Axis::z, n);
    for (int j = 0; j < n; ++j) {
        ix_.push_back(nuclear_operator(j, Axis::x, n, false));
        iy_.push_back(nuclear_operator(j, Axis::y, n, false));
        iz_.push_back(nuclear_operator(j, Axis::z, n, false));
    }
}

CMatrix Engine::propagator(double t) const {
    std::lock_guard<std::mutex> lock(cache_mutex_);
    auto it = cache_.find(t);
    if (it != cache_.end()) return it->second;
    CMatrix u = h_.propagator(t);
    if (cache_.size() > 256) cache_.clear();
    cache_.emplace(t, u);
    return u;
}

CMatrix Engine::conditional_rotation(double angle) const {
    // exp(+i angle * sum_j 2 Sz Ix_j), normalised per nucleus by its coupling
    const int n = sys_.num_nuclei();
    CMatrix g = CMatrix::Zero(2 << n, 2 << n);
    double ref = n > 0 ? sys_.coupling(0) : 0.0;
    for (int j = 0; j < n; ++j) {
        double scale = ref > 0.0 ? sys_.coupling(j) / ref : 1.0;
        g += scale * angle * 2.0 * sz_ * nuclear_operator(j, Axis::x, n);
    }
    return expi_hermitian(g);
}

CMatrix Engine::block_unitary(const WeakMeasSpec& wm, bool enclosing) const {
    const int n = sys_.num_nuclei();
    const int d2 = 2 << n;
    CMatrix u;
    if (opt_.coupling == Coupling::effective) {
        CMatrix g = CMatrix::Zero(d2, d2);
        CMatrix prec = CMatrix::Zero(d2, d2);
        for (int j = 0; j < n; ++j) {
            CMatrix iz = nuclear_operator(j, Axis::z, n);
            g += sys_.coupling(j) * wm.t_beta * 2.0 * sz_ * nuclear_operator(j, Axis::x, n);
            prec -= sys_.mean_frequency(j) * wm.t_beta * iz;
        }
        // precession first: the interaction acts at the end of the window
        u = expi_hermitian(g) * expi_hermitian(prec);
    } else {
        CMatrix u1 = propagator(wm.tau);
        CMatrix u2 = propagator(2.0 * wm.tau);
        static const MeterAxis xy8[8] = {MeterAxis::x, MeterAxis::y, MeterAxis::x, MeterAxis::y,
                                         MeterAxis::y, MeterAxis::x, MeterAxis::y, MeterAxis::x};
        CMatrix px = meter_rotation(MeterAxis::x, pi, n);
        CMatrix py = meter_rotation(MeterAxis::y, pi, n);
        u = u1;
        for (int i = 0; i < wm.n_pulses; ++i) {
            bool use_y = wm.cycling == PulseCycling::xy8 && xy8[i % 8] == MeterAxis::y;
            u = (use_y ? py : px) * u;
            u = (i + 1 < wm.n_pulses ? u2 : u1) * u;
        }
    }
    if (!enclosing) return u;
    return meter_rotation(wm.last, pi / 2, n) * u * meter_rotation(wm.first, pi / 2, n);
}

CMatrix Engine::polarization_gate(double angle, const WeakMeasSpec& wm) const {
    const int n = sys_.num_nuclei();
    CMatrix c;
    CMatrix z;
    if (opt_.coupling == Coupling::effective || n == 0) {
        c = conditional_rotation(angle);
        CMatrix zg = CMatrix::Zero(2 << n, 2 << n);
        for (int j = 0; j < n; ++j) zg -= (pi / 2) * nuclear_operator(j, Axis::z, n);
        z = expi_hermitian(zg);
    } else {
        WeakMeasSpec part = wm;
        double g = sys_.coupling(0);
        int np = g > 0.0 ? 2 * static_cast<int>(std::lround(angle / (g * 4.0 * wm.tau))) : 0;
        if (np < 2) return CMatrix::Identity(2 << n, 2 << n);
        part.n_pulses = np;
        part.t_beta = 2.0 * wm.tau * np;
        c = block_unitary(part, false);
        z = propagator(wm.tau);
    }
    return c * z * meter_rotation(MeterAxis::minus_y, pi / 2, n) * c * meter_rotation(MeterAxis::x, pi / 2, n);
}

DensityMatrix Engine::polarize_repetitive(const DensityMatrix& rho, int reps, double partial_angle,
                                          const WeakMeasSpec& wm) const {
    if (reps < 1) throw DomainError("polarize_repetitive needs reps >= 1");
    if (partial_angle == 0.0) return rho;
    CMatrix gate = polarization_gate(partial_angle, wm);
    DensityMatrix r = rho.reset_meter();
    for (int i = 0; i < reps; ++i) r = apply_unitary(r, gate).reset_meter();
    return r;
}

DensityMatrix Engine::initial_state(const Polarization& pol, bool init_rotation) const {
    const int n = sys_.num_nuclei();
    double p = pol.kind == PolarizationKind::ideal ? pol.p : 0.0;
    DensityMatrix rho = DensityMatrix::product(std::vector<double>(n, p));
    if (pol.kind == PolarizationKind::repetitive) {
        WeakMeasSpec wm;
        wm.tau = n > 0 ? pi / (2.0 * sys_.mean_frequency(0)) : 1e-7;
        rho = polarize_repetitive(rho, pol.reps, pol.partial_angle, wm);
    }
    if (init_rotation)
        for (int j = 0; j < n; ++j) rho = apply_pulse(rho, PulseTarget::nuclear(j), Axis::y, pi / 2);
    return rho;
}

DensityMatrix Engine::evolve(const DensityMatrix& rho, double t) const {
    if (t < 0.0) throw DomainError("evolution time must be non-negative");
    if (t == 0.0) return rho;
    return apply_unitary(rho, propagator(t));
}

DensityMatrix Engine::run_cpmg_block(const DensityMatrix& rho, const WeakMeasSpec& wm) const {
    return apply_unitary(rho, block_unitary(wm));
}

StepResult Engine::weak_measurement_step(const DensityMatrix& rho, const WeakMeasSpec& wm, Rng* rng) const {
    DensityMatrix after = run_cpmg_block(rho.reset_meter(), wm);
    StepResult out;
    out.signal = after.expectation(sz_);
    const int d = 1 << sys_.num_nuclei();
    if (opt_.mode == RecordMode::trajectory && rng) {
        double p0 = std::clamp(0.5 + out.signal, 0.0, 1.0);
        std::uniform_real_distribution<double> u01;
        bool up = u01(*rng) < p0;
        CMatrix blk = up ? CMatrix(after.matrix().block(0, 0, d, d)) : CMatrix(after.matrix().block(d, d, d, d));
        double pm = up ? p0 : 1.0 - p0;
        out.outcome = up ? 0.5 : -0.5;
        out.rho = DensityMatrix::from_nuclear(blk / pm, sys_.num_nuclei());
    } else {
        out.rho = after.reset_meter();
    }
    check(out.rho, "weak_measurement_step");
    return out;
}

double Engine::dd_response(const WeakMeasSpec& wm) const {
    DensityMatrix rho = DensityMatrix::product(std::vector<double>(sys_.num_nuclei(), 0.0));
    return run_cpmg_block(rho, wm).expectation(sz_);
}

void Engine::dephase(CMatrix& r, double t) const {
    if (opt_.dephasing_rate <= 0.0) return;
    double e = std::exp(-opt_.dephasing_rate * t);
    for (Eigen::Index a = 0; a < r.rows(); ++a)
        for (Eigen::Index b = 0; b < r.cols(); ++b) {
            int k = std::popcount(static_cast<unsigned>(a ^ b));
            if (k) r(a, b) *= std::pow(e, k);
        }
}

void Engine::check(const DensityMatrix& rho, const char* where) const {
    if (!opt_.check_invariants) return;
    auto bad = rho.violations();
    if (!bad.empty()) throw DomainError(std::string(where) + ": " + bad.front());
}

namespace {

// nuclear Z rotations by angle_j on each nucleus
void z_rotate(CMatrix& r, const std::vector<double>& angle) {
    const int n = static_cast<int>(angle.size());
    const Eigen::Index d = r.rows();
    std::vector<double> phase(d, 0.0);
    for (Eigen::Index a = 0; a < d; ++a)
        for (int j = 0; j < n; ++j) {
            bool down = (a >> (n - 1 - j)) & 1;
            phase[a] += angle[j] * (down ? -0.5 : 0.5);
        }
    for (Eigen::Index a = 0; a < d; ++a)
        for (Eigen::Index b = 0; b < d; ++b) r(a, b) *= std::exp(-I1 * (phase[a] - phase[b]));
}

}  // namespace

MeasurementRecord Engine::run_protocol(const Protocol& p, std::uint64_t seed, std::uint64_t stream) const {
    p.validate();
    const int n = sys_.num_nuclei();
    const auto& wm = p.weak_meas;
    Rng rng = make_rng(seed, stream);

    MeasurementRecord rec;
    rec.t_s = p.t_s;
    rec.meta["t_s"] = p.t_s;
    rec.meta["tau"] = wm.tau;
    rec.meta["t_beta"] = wm.t_beta;
    rec.meta["n_pulses"] = wm.n_pulses;
    rec.meta["t_d"] = p.t_d;
    // a weak-measurement sample completes one dwell after the previous one, the first one dwell after preparation
    rec.meta["t0"] = p.kind == ProtocolKind::weak_trace || p.kind == ProtocolKind::alpha_sweep ||
                             p.kind == ProtocolKind::bath_spectrum
                         ? p.t_s
                         : 0.0;
    rec.meta["readout_overhead"] = p.readout_overhead;
    rec.meta["seed"] = static_cast<double>(seed);
    rec.meta["stream"] = static_cast<double>(stream);
    if (n > 0) {
        rec.meta["beta"] = sys_.coupling(0) * wm.t_beta;
        rec.meta["alpha"] = sys_.larmor() * p.t_s;
    }

    auto record_nuclear = [&](const CMatrix& r) {
        double sx = 0, sy = 0, sz = 0;
        for (int j = 0; j < n; ++j) {
            sx += real_trace(ix_[j] * r);
            sy += real_trace(iy_[j] * r);
            sz += real_trace(iz_[j] * r);
        }
        rec.nuc_x.push_back(sx);
        rec.nuc_y.push_back(sy);
        rec.nuc_z.push_back(sz);
    };
    auto emit_counts = [&](double sz) {
        if (opt_.photons) rec.counts.push_back(photon_readout(sz, opt_.readout, rng, opt_.readout_repetitions));
    };

    CMatrix block = block_unitary(wm);
    auto [k0, k1] = kraus_from_ground(block);

    if (p.kind == ProtocolKind::dd_sweep) {
        double s = dd_response(wm);
        for (int i = 0; i < p.n_samples; ++i) {
            rec.samples.push_back(s);
            emit_counts(s);
        }
        return rec;
    }

    DensityMatrix rho0 = initial_state(p.polarization, p.init_rotation);

    // meter starts each free period in m_S = 0
    auto free_kraus = [&](double t_free) {
        CMatrix uf;
        if (p.mid_pi && p.t_d > 0.0) {
            double before = t_free - 0.5 * p.t_d;
            uf = propagator(0.5 * p.t_d) * meter_rotation(MeterAxis::x, pi, n) * propagator(before);
        } else {
            uf = propagator(t_free);
        }
        return kraus_from_ground(uf);
    };
    auto apply_kraus = [](const CMatrix& r, const CMatrix& a, const CMatrix& b) {
        CMatrix out = a * r * a.adjoint() + b * r * b.adjoint();
        return CMatrix(0.5 * (out + out.adjoint()));
    };

    if (p.kind == ProtocolKind::ramsey) {
        CMatrix r0 = rho0.nuclear_state();
        for (int i = 0; i < p.n_samples; ++i) {
            double delay = i * p.t_s;
            CMatrix uf = propagator(delay);
            if (p.mid_pi && delay > 0.0)
                uf = propagator(0.5 * delay) * meter_rotation(MeterAxis::x, pi, n) * propagator(0.5 * delay);
            auto [f0, f1] = kraus_from_ground(uf);
            CMatrix r = apply_kraus(r0, f0, f1);
            dephase(r, delay);
            record_nuclear(r);
            double q0 = real_trace(k0 * r * k0.adjoint());
            double q1 = real_trace(k1 * r * k1.adjoint());
            double s = 0.5 * (q0 - q1);
            rec.samples.push_back(s);
            emit_counts(s);
        }
        return rec;
    }

    auto [f0, f1] = free_kraus(p.t_s - wm.t_beta);
    CMatrix r = rho0.nuclear_state();
    std::optional<DriftState> drift;
    if (opt_.drift && opt_.drift->amplitude > 0.0) drift = DriftState::stationary(*opt_.drift, rng);
    std::normal_distribution<double> n01;
    std::uniform_real_distribution<double> u01;
    rec.samples.reserve(p.n_samples);

    for (int i = 0; i < p.n_samples; ++i) {
        r = apply_kraus(r, f0, f1);
        dephase(r, p.t_s);
        if (drift) {
            double db = drift_step(*drift, p.t_s, rng, *opt_.drift);
            z_rotate(r, std::vector<double>(n, sys_.gamma_n * db * p.t_s));
        }
        record_nuclear(r);

        CMatrix r0 = k0 * r * k0.adjoint();
        CMatrix r1 = k1 * r * k1.adjoint();
        double q0 = real_trace(r0);
        double q1 = real_trace(r1);
        double s = 0.5 * (q0 - q1);
        rec.samples.push_back(s);

        if (opt_.mode == RecordMode::trajectory) {
            bool up = u01(rng) < q0 / (q0 + q1);
            rec.outcomes.push_back(up ? 0.5 : -0.5);
            r = up ? CMatrix(r0 / q0) : CMatrix(r1 / q1);
            r = 0.5 * (r + r.adjoint()).eval();
            emit_counts(up ? 0.5 : -0.5);
        } else {
            r = r0 + r1;
            r = 0.5 * (r + r.adjoint()).eval();
            emit_counts(s);
        }

        if (opt_.reinit_kicks) {
            double z = n01(rng);
            std::vector<double> ang(n);
            for (int j = 0; j < n; ++j) ang[j] = sys_.nuclei[j].a_par * opt_.kick_t_readout * z;
            z_rotate(r, ang);
        }
        if (opt_.check_invariants) check(DensityMatrix::from_nuclear(r, n), "run_protocol");
    }
    return rec;
}

MeasurementRecord run_protocol(const SpinSystem& system, const Protocol& protocol, std::uint64_t seed,
                               const EngineOptions& options) {
    Engine e(system, options);
    return e.run_protocol(protocol, seed);
}

MeasurementRecord run_averaged(const Engine& engine, const Protocol& protocol, std::uint64_t seed, int runs,
                               int jobs) {
    if (runs < 1) throw DomainError("run_averaged needs runs >= 1");
    jobs = std::max(1, std::min(jobs, runs));
    std::vector<MeasurementRecord> recs(runs);
    std::atomic<int> next{0};
    auto worker = [&] {
        for (int i = next++; i < runs; i = next++) recs[i] = engine.run_protocol(protocol, seed, i);
    };
    std::vector<std::thread> pool;
    for (int t = 1; t < jobs; ++t) pool.emplace_back(worker);
    worker();
    for (auto& t : pool) t.join();

    MeasurementRecord out = recs[0];
    auto add = [](std::vector<double>& acc, const std::vector<double>& v) {
        for (std::size_t i = 0; i < acc.size() && i < v.size(); ++i) acc[i] += v[i];
    };
    for (int i = 1; i < runs; ++i) {
        add(out.samples, recs[i].samples);
        add(out.outcomes, recs[i].outcomes);
        add(out.nuc_x, recs[i].nuc_x);
        add(out.nuc_y, recs[i].nuc_y);
        add(out.nuc_z, recs[i].nuc_z);
        for (std::size_t k = 0; k < out.counts.size() && k < recs[i].counts.size(); ++k) out.counts[k] += recs[i].counts[k];
    }
    auto scale = [&](std::vector<double>& v) {
        for (double& x : v) x /= runs;
    };
    scale(out.samples);
    scale(out.outcomes);
    scale(out.nuc_x);
    scale(out.nuc_y);
    scale(out.nuc_z);
    out.meta["runs"] = runs;
    return out;
}

}  // namespace wmtrack
