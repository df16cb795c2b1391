#ifndef SWARMCERT_CERTIFICATE_NOISE_SWEEP_HPP
#define SWARMCERT_CERTIFICATE_NOISE_SWEEP_HPP

#include "swarmcert/certificate/certificate_matrix.hpp"
#include "swarmcert/model/bearing.hpp"
#include "swarmcert/model/rng.hpp"

#include <cmath>
#include <string>
#include <vector>

namespace swarmcert::cert {

// K rebuilt around ground-truth rotations from bounded-noise bearings at
// exact chord magnitude xi, together with Delta K = K - K_hat. Both use the
// common-frame Gram layout; the raw perturbed K is not symmetric away from
// stationary points, so the symmetric part is stored (the Weyl chain and
// Theorem-5 block bounds hold for it unchanged).
struct NoisyCertificate {
    CertificateMatrix k;
    Eigen::MatrixXd delta_raw;  // K_raw - K_hat (before symmetrizing)
};

inline NoisyCertificate noisy_certificate(
    const std::vector<std::vector<Eigen::Vector3d>>& positions,
    const model::VisibilityGraph& graph, double xi, model::Rng& rng) {
    const int n = graph.n_robots();
    const size_t n_samples = positions.empty() ? 0 : positions[0].size();
    model::NoiseModel nm;
    nm.kind = model::NoiseModel::Kind::bounded;
    nm.xi = xi;

    Eigen::MatrixXd raw = Eigen::MatrixXd::Zero(3 * n, 3 * n);
    Eigen::MatrixXd raw_hat = Eigen::MatrixXd::Zero(3 * n, 3 * n);
    for (const auto& [i, j] : graph.edges()) {
        for (size_t s = 0; s < n_samples; ++s) {
            const Eigen::Vector3d d = positions[j - 1][s] - positions[i - 1][s];
            const Eigen::Vector3d phi_hat = d.normalized();
            const Eigen::Vector3d phi_ij = model::perturb_bearing(phi_hat, nm, rng);
            const Eigen::Vector3d phi_ji = model::perturb_bearing(-phi_hat, nm, rng);

            accumulate_pair(raw, i - 1, j - 1, phi_ij, phi_ji);
            accumulate_pair(raw_hat, i - 1, j - 1, phi_hat, -phi_hat);
        }
    }
    NoisyCertificate out;
    out.k = cert_detail::pack(raw, n, CertificateMatrix::Source::from_solution);
    out.delta_raw = raw - raw_hat;
    return out;
}

// max |lambda| of the symmetric part of Delta K.
inline double delta_k_spectral_radius(const Eigen::MatrixXd& delta_raw) {
    const auto ed = linalg::sym_eig(linalg::SymMatrix::fromDense(delta_raw));
    return std::max(std::abs(ed.values[0]), std::abs(ed.values[ed.values.size() - 1]));
}

struct SweepRow {
    double xi = 0.0;
    double mean_cert_eig = 0.0;
    double stddev = 0.0;
    double frac_certified = 0.0;
};

struct SweepResult {
    std::vector<SweepRow> rows;
    double xi_ring_max = 0.0;  // largest prefix xi with mean certificate eig >= 0
    bool crossed = false;

    std::string to_csv() const {
        std::string s = "xi,mean_cert_eig,stddev,frac_certified\n";
        char buf[160];
        for (const auto& r : rows) {
            std::snprintf(buf, sizeof(buf), "%.17g,%.17g,%.17g,%.17g\n", r.xi,
                          r.mean_cert_eig, r.stddev, r.frac_certified);
            s += buf;
        }
        return s;
    }
};

// Mean certificate eigenvalue of the noise-disturbed K over trials, per xi.
inline SweepResult empirical_noise_sweep(
    const std::vector<std::vector<Eigen::Vector3d>>& positions,
    const model::VisibilityGraph& graph, const std::vector<double>& xi_grid, int trials,
    model::Rng& rng) {
    SweepResult out;
    bool still_positive = true;
    for (size_t gi = 0; gi < xi_grid.size(); ++gi) {
        const double xi = xi_grid[gi];
        double sum = 0.0, sum2 = 0.0;
        int certified = 0;
        for (int t = 0; t < trials; ++t) {
            model::Rng sub = rng.substream(gi * 1000003ull + t);
            const auto noisy = noisy_certificate(positions, graph, xi, sub);
            const double eig = certificate_eigenvalue(noisy.k);
            sum += eig;
            sum2 += eig * eig;
            if (eig >= -1e-9 * std::max(1.0, noisy.k.k.normFrobenius())) ++certified;
        }
        SweepRow row;
        row.xi = xi;
        row.mean_cert_eig = sum / trials;
        row.stddev = std::sqrt(std::max(sum2 / trials - row.mean_cert_eig * row.mean_cert_eig, 0.0));
        row.frac_certified = static_cast<double>(certified) / trials;
        out.rows.push_back(row);
        if (still_positive && row.mean_cert_eig >= 0.0) {
            out.xi_ring_max = xi;
        } else if (still_positive && row.mean_cert_eig < 0.0) {
            still_positive = false;
            out.crossed = true;
        }
    }
    return out;
}

}  // namespace swarmcert::cert

#endif
