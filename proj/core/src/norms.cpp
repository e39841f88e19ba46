#include "envelab/norms.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>
#include <stdexcept>

namespace envelab::norms {

using geometry::ChartPoint;

MeasureSpec MeasureSpec::fs_area() { return MeasureSpec{}; }

MeasureSpec MeasureSpec::arc_length(geometry::ArcSet K) {
    MeasureSpec m;
    m.kind = Kind::arc_length;
    m.arcs = std::move(K);
    return m;
}

MeasureSpec MeasureSpec::weighted_area(std::function<double(const ChartPoint&)> f) {
    MeasureSpec m;
    m.kind = Kind::weighted_area;
    m.density = std::move(f);
    return m;
}

MeasureSpec MeasureSpec::radial_restriction(geometry::RadialSet S) {
    MeasureSpec m;
    m.kind = Kind::radial_restriction;
    m.radial = std::move(S);
    return m;
}

bool MeasureSpec::rotation_invariant() const {
    switch (kind) {
        case Kind::fs_area: return true;
        case Kind::radial_restriction: return true;
        case Kind::arc_length: return arcs.is_full_circle();
        case Kind::weighted_area: return false;
    }
    return false;
}

namespace {

// log of |z|^{i+j} e^{-k v(z)} with v the full potential in the affine frame.
double log_weight(const geometry::WeightPotential& h, std::complex<double> z, int k) {
    double v = std::log1p(std::norm(z)) + h.relative_potential(ChartPoint::affine(z));
    return -k * v;
}

Gram gram_area(const geometry::WeightPotential& h, const MeasureSpec& mu, int k,
               const GramOptions& opt) {
    const int n = k + 1;
    Gram G = Gram::Zero(n, n);
    geometry::Rule1D rad = geometry::radial_rule(opt.radial_order);
    geometry::Rule1D ang = geometry::circle_rule(opt.angular_order);
    const bool invariant = mu.rotation_invariant() && h.is_reference();

    for (size_t ir = 0; ir < rad.nodes.size(); ++ir) {
        double r = rad.nodes[ir];
        double t = 2.0 * std::log(r);
        if (mu.kind == MeasureSpec::Kind::radial_restriction && !mu.radial.contains(t)) continue;
        if (invariant) {
            // Angular integral vanishes off the diagonal; 1D evaluation.
            double base = std::log1p(r * r);
            double wr = rad.weights[ir] * 2.0 * std::numbers::pi * r *
                        geometry::fs_curvature_density(std::complex<double>(r, 0.0));
            for (int j = 0; j < n; ++j) {
                double mag = std::exp(2.0 * j * std::log(r) - k * base);
                G(j, j) += wr * mag;
            }
            continue;
        }
        for (size_t ia = 0; ia < ang.nodes.size(); ++ia) {
            double theta = ang.nodes[ia];
            std::complex<double> z = std::polar(r, theta);
            double w = rad.weights[ir] * ang.weights[ia] * r * geometry::fs_curvature_density(z);
            if (mu.kind == MeasureSpec::Kind::weighted_area) {
                double f = mu.density(ChartPoint::affine(z));
                if (f == 0.0) continue;
                w *= f;
            }
            double lw = log_weight(h, z, k);
            double logr = std::log(std::max(r, 1e-300));
            for (int i = 0; i < n; ++i) {
                for (int j = i; j < n; ++j) {
                    double mag = std::exp((i + j) * logr + lw);
                    std::complex<double> e = std::polar(mag, (j - i) * theta);
                    G(i, j) += w * e;
                }
            }
        }
    }
    for (int i = 0; i < n; ++i)
        for (int j = 0; j < i; ++j) G(i, j) = std::conj(G(j, i));
    return G;
}

Gram gram_arclength(const geometry::WeightPotential& h, const MeasureSpec& mu, int k,
                    const GramOptions& opt) {
    const int n = k + 1;
    Gram G = Gram::Zero(n, n);
    geometry::Rule1D gl = geometry::gauss_legendre(std::max(24, opt.angular_order / 2));
    for (auto [lo, hi] : mu.arcs.arcs()) {
        double len = hi - lo;
        int panels = std::max(2, (int)std::ceil(k * len / std::numbers::pi / 2) + 2);
        for (int p = 0; p < panels; ++p) {
            double a = lo + len * p / panels, b = lo + len * (p + 1) / panels;
            for (size_t q = 0; q < gl.nodes.size(); ++q) {
                double theta = 0.5 * (a + b) + 0.5 * (b - a) * gl.nodes[q];
                double w = 0.5 * (b - a) * gl.weights[q] / (2.0 * std::numbers::pi);
                std::complex<double> z = std::polar(1.0, theta);
                double lw = log_weight(h, z, k);
                double mag = std::exp(lw);  // |z| = 1
                for (int i = 0; i < n; ++i)
                    for (int j = i; j < n; ++j)
                        G(i, j) += w * std::polar(mag, (j - i) * theta);
            }
        }
    }
    for (int i = 0; i < n; ++i)
        for (int j = 0; j < i; ++j) G(i, j) = std::conj(G(j, i));
    return G;
}

Eigen::VectorXd pencil_log_eigs(const Gram& G1, const Gram& G2) {
    if (G1.rows() != G2.rows() || G1.rows() != G1.cols() || G2.rows() != G2.cols())
        throw std::invalid_argument("relative_spectrum: dimension mismatch");
    Eigen::LLT<Gram> llt(G1);
    if (llt.info() != Eigen::Success)
        throw std::runtime_error("relative_spectrum: first Gram matrix is not positive definite");
    Gram L = llt.matrixL();
    Gram M = L.triangularView<Eigen::Lower>().solve(G2);
    M = L.triangularView<Eigen::Lower>().solve(M.adjoint().eval()).adjoint();
    Eigen::SelfAdjointEigenSolver<Gram> es(0.5 * (M + M.adjoint()));
    if (es.info() != Eigen::Success) throw std::runtime_error("relative_spectrum: eigensolve failed");
    Eigen::VectorXd ev = es.eigenvalues();
    for (int i = 0; i < ev.size(); ++i) {
        if (!(ev(i) > 0))
            throw std::runtime_error("relative_spectrum: pencil eigenvalue not positive");
        ev(i) = std::log(ev(i));
    }
    return ev;  // increasing
}

}  // namespace

Gram gram(const geometry::WeightPotential& h, const MeasureSpec& mu, int k,
          const GramOptions& opt) {
    if (k < 0) throw std::invalid_argument("gram: k must be >= 0");
    switch (mu.kind) {
        case MeasureSpec::Kind::arc_length:
            if (mu.arcs.empty()) throw std::invalid_argument("gram: empty arc set");
            return gram_arclength(h, mu, k, opt);
        case MeasureSpec::Kind::radial_restriction:
            if (mu.radial.empty()) throw std::invalid_argument("gram: empty radial set");
            return gram_area(h, mu, k, opt);
        default:
            return gram_area(h, mu, k, opt);
    }
}

double RelativeSpectrum::d_p(double p) const {
    if (p < 1) throw std::invalid_argument("d_p: p must be >= 1");
    int r = (int)lambda.size();
    if (std::isinf(p)) return std::max(std::abs(lambda(0)), std::abs(lambda(r - 1)));
    double s = 0;
    for (int i = 0; i < r; ++i) s += std::pow(std::abs(lambda(i)), p);
    return std::pow(s / r, 1.0 / p);
}

RelativeSpectrum relative_spectrum(const Gram& G1, const Gram& G2) {
    Eigen::VectorXd ev = pencil_log_eigs(G1, G2);
    RelativeSpectrum rs;
    rs.lambda = 0.5 * ev.reverse();
    return rs;
}

Eigen::VectorXd transfer_spectrum(const Gram& G0, const Gram& G1) {
    Eigen::VectorXd ev = pencil_log_eigs(G0, G1);  // increasing log of pencil
    Eigen::VectorXd t(ev.size());
    for (int i = 0; i < ev.size(); ++i) t(i) = -ev(i);
    // -log of increasing is decreasing; already nonincreasing order.
    return t;
}

double volume_ratio(const Gram& G1, const Gram& G2) { return relative_spectrum(G1, G2).sum(); }

double volume_ratio_logdet(const Gram& G1, const Gram& G2) {
    auto logdet = [](const Gram& G) {
        Eigen::LLT<Gram> llt(G);
        if (llt.info() != Eigen::Success)
            throw std::runtime_error("volume_ratio: Gram matrix is not positive definite");
        Gram L = llt.matrixL();
        double s = 0;
        for (int i = 0; i < L.rows(); ++i) s += std::log(std::abs(L(i, i).real()));
        return 2.0 * s;
    };
    return 0.5 * (logdet(G2) - logdet(G1));
}

double schatten_distance(const Eigen::MatrixXcd& A, const Eigen::MatrixXcd& B, double p,
                         const Gram& metric) {
    if (p < 1) throw std::invalid_argument("schatten_distance: p must be >= 1");
    if (A.rows() != B.rows() || A.cols() != B.cols() || A.rows() != metric.rows())
        throw std::invalid_argument("schatten_distance: dimension mismatch");
    Eigen::LLT<Gram> llt(metric);
    if (llt.info() != Eigen::Success)
        throw std::runtime_error("schatten_distance: metric is not positive definite");
    Gram L = llt.matrixL();
    // Conjugate to an orthonormal basis: X -> L^H X L^{-H}.
    Eigen::MatrixXcd X = A - B;
    Eigen::MatrixXcd Y = L.adjoint() * X;
    Y = L.triangularView<Eigen::Lower>().solve(Y.adjoint().eval()).adjoint();  // Y L^{-H}
    Eigen::JacobiSVD<Eigen::MatrixXcd> svd(Y);
    const auto& sv = svd.singularValues();
    int n = (int)sv.size();
    if (std::isinf(p)) return sv(0);
    double s = 0;
    for (int i = 0; i < n; ++i) s += std::pow(sv(i), p);
    return std::pow(s / n, 1.0 / p);
}

TransferReport toeplitz_vs_transfer(const std::function<double(const ChartPoint&)>& f,
                                    const geometry::WeightPotential& h, int k, double tol,
                                    const GramOptions& opt) {
    Gram G0 = gram(h, MeasureSpec::fs_area(), k, opt);
    Gram G1 = gram(h, MeasureSpec::weighted_area(f), k, opt);
    TransferReport rep;
    rep.k = k;
    // Route 1: compression G0^{-1} G1 via LU, general complex eigensolve.
    Eigen::MatrixXcd T = G0.partialPivLu().solve(G1);
    Eigen::ComplexEigenSolver<Eigen::MatrixXcd> es(T);
    if (es.info() != Eigen::Success)
        throw std::runtime_error("toeplitz_vs_transfer: eigensolve failed");
    std::vector<double> nl;
    for (int i = 0; i < es.eigenvalues().size(); ++i) {
        std::complex<double> ev = es.eigenvalues()(i);
        if (!(ev.real() > 0))
            throw std::runtime_error("toeplitz_vs_transfer: nonpositive compression eigenvalue");
        nl.push_back(-std::log(ev.real()));
    }
    std::sort(nl.begin(), nl.end(), std::greater<>());
    rep.toeplitz_neg_log_spectrum = Eigen::Map<Eigen::VectorXd>(nl.data(), (int)nl.size());
    // Route 2: transfer spectrum via Cholesky whitening.
    rep.transfer = transfer_spectrum(G0, G1);
    rep.max_deviation = (rep.toeplitz_neg_log_spectrum - rep.transfer).cwiseAbs().maxCoeff();
    rep.pass = rep.max_deviation <= tol;
    return rep;
}

}  // namespace envelab::norms
