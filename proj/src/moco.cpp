#include "sarmoco/moco.hpp"

#include <fftw3.h>

#include <Eigen/Dense>
#include <algorithm>
#include <cfloat>
#include <memory>
#include <mutex>
#include <numbers>
#include <sstream>
#include <stdexcept>

#include "parallel.hpp"
#include "sarmoco/errors.hpp"

namespace sarmoco {

namespace {

constexpr double kPi = std::numbers::pi;

// FFTW's planner is not reentrant.
std::mutex& fftw_planner_mutex() {
    static std::mutex m;
    return m;
}

struct FftwDeleter {
    void operator()(fftw_complex* p) const noexcept { fftw_free(p); }
};
using FftwBuffer = std::unique_ptr<fftw_complex[], FftwDeleter>;

double wrap_to_pi(double a) {
    a = std::remainder(a, 2.0 * kPi);  // [-pi, pi]
    if (a <= -kPi) a += 2.0 * kPi;
    return a;
}

double median(std::vector<double> v) {
    const std::size_t mid = v.size() / 2;
    std::nth_element(v.begin(), v.begin() + std::ptrdiff_t(mid), v.end());
    double hi = v[mid];
    if (v.size() % 2 == 1) return hi;
    const double lo = *std::max_element(v.begin(), v.begin() + std::ptrdiff_t(mid));
    return 0.5 * (lo + hi);
}

}  // namespace

PhaseScreenSet::PhaseScreenSet(const GroundGrid& grid, std::vector<double> tau,
                               std::vector<double> rates)
    : grid_(grid), tau_(std::move(tau)), rates_(std::move(rates)) {
    if (rates_.size() != grid_.size())
        throw std::invalid_argument("phase screen rates do not match grid");
}

AmplitudeImage incoherent_mean(const ImageStack& stack) {
    const std::size_t npix = stack.grid().size();
    AmplitudeImage out{stack.grid(), std::vector<double>(npix, 0.0)};
    for (std::size_t m = 0; m < stack.pulses(); ++m) {
        const auto img = stack.image(m);
        for (std::size_t p = 0; p < npix; ++p) out.values[p] += std::abs(std::complex<double>(img[p]));
    }
    const double inv = 1.0 / double(stack.pulses());
    for (auto& v : out.values) v *= inv;
    return out;
}

std::vector<Gcp> select_gcp(const AmplitudeImage& amp, std::size_t count,
                            std::size_t min_separation) {
    if (count < 1) throw std::invalid_argument("GCP count must be >= 1");
    const std::size_t nx = amp.grid.nx();
    const std::size_t ny = amp.grid.ny();
    if (amp.values.empty() || amp.values.size() != nx * ny)
        throw std::invalid_argument("amplitude image is empty");

    struct Candidate {
        double amplitude;
        std::size_t row;
        std::size_t col;
    };
    std::vector<Candidate> candidates;
    for (std::size_t iy = 0; iy < ny; ++iy) {
        for (std::size_t ix = 0; ix < nx; ++ix) {
            const double a = amp.at(iy, ix);
            if (!(a > 0.0)) continue;
            bool is_max = true;
            for (int dy = -1; dy <= 1 && is_max; ++dy) {
                for (int dx = -1; dx <= 1; ++dx) {
                    if (dx == 0 && dy == 0) continue;
                    const auto yy = std::ptrdiff_t(iy) + dy;
                    const auto xx = std::ptrdiff_t(ix) + dx;
                    if (yy < 0 || xx < 0 || yy >= std::ptrdiff_t(ny) || xx >= std::ptrdiff_t(nx))
                        continue;
                    if (amp.at(std::size_t(yy), std::size_t(xx)) > a) {
                        is_max = false;
                        break;
                    }
                }
            }
            if (is_max) candidates.push_back({a, iy, ix});
        }
    }
    std::sort(candidates.begin(), candidates.end(), [](const Candidate& a, const Candidate& b) {
        if (a.amplitude != b.amplitude) return a.amplitude > b.amplitude;
        if (a.row != b.row) return a.row < b.row;
        return a.col < b.col;
    });

    std::vector<Gcp> out;
    for (const auto& c : candidates) {
        if (out.size() >= count) break;
        const bool far_enough = std::all_of(out.begin(), out.end(), [&](const Gcp& g) {
            const std::size_t dr = c.row > g.row ? c.row - g.row : g.row - c.row;
            const std::size_t dc = c.col > g.col ? c.col - g.col : g.col - c.col;
            return std::max(dr, dc) >= min_separation;
        });
        if (!far_enough) continue;
        Gcp g;
        g.row = c.row;
        g.col = c.col;
        g.position = amp.grid.pixel(c.row, c.col);
        g.amplitude = c.amplitude;
        out.push_back(g);
    }
    return out;
}

FrequencyEstimate estimate_frequency(std::span<const std::complex<double>> series, double pri,
                                     std::size_t pad_factor, PeakMode mode) {
    if (series.size() < 4) throw std::invalid_argument("frequency estimation needs M >= 4");
    if (pad_factor < 1) throw std::invalid_argument("pad factor must be >= 1");
    if (!(pri > 0.0)) throw std::invalid_argument("PRI must be > 0");
    if (std::all_of(series.begin(), series.end(),
                    [](const std::complex<double>& z) { return z == std::complex<double>{}; }))
        throw std::invalid_argument("slow-time series is all zero");

    const std::size_t len = series.size() * pad_factor;
    FftwBuffer in(fftw_alloc_complex(len));
    FftwBuffer out(fftw_alloc_complex(len));
    if (!in || !out) throw std::bad_alloc();
    fftw_plan plan;
    {
        std::lock_guard lock(fftw_planner_mutex());
        plan = fftw_plan_dft_1d(int(len), in.get(), out.get(), FFTW_FORWARD, FFTW_ESTIMATE);
    }
    for (std::size_t i = 0; i < len; ++i) {
        in[i][0] = i < series.size() ? series[i].real() : 0.0;
        in[i][1] = i < series.size() ? series[i].imag() : 0.0;
    }
    fftw_execute(plan);
    {
        std::lock_guard lock(fftw_planner_mutex());
        fftw_destroy_plan(plan);
    }

    std::vector<double> mag(len);
    for (std::size_t i = 0; i < len; ++i) mag[i] = std::hypot(out[i][0], out[i][1]);
    const std::size_t peak = std::size_t(std::max_element(mag.begin(), mag.end()) - mag.begin());

    double offset = 0.0;
    if (mode == PeakMode::parabolic) {
        const double a = mag[(peak + len - 1) % len];
        const double b = mag[peak];
        const double c = mag[(peak + 1) % len];
        if (a > 0.0 && c > 0.0) {
            const double la = std::log(a), lb = std::log(b), lc = std::log(c);
            const double denom = la - 2.0 * lb + lc;
            if (denom < 0.0) offset = 0.5 * (la - lc) / denom;
        }
    }
    // Spectrum bin k of exp(-j 2 pi k m / L) maps to the tone exp(+j w m PRI);
    // the residual Doppler is reported with the opposite sign.
    const double cycles = (double(peak) + offset) / double(len);
    const double omega_tone = wrap_to_pi(2.0 * kPi * cycles) / pri;

    const double med = median(mag);
    FrequencyEstimate est;
    est.omega = omega_tone == 0.0 ? 0.0 : -omega_tone;
    est.prominence = med > 0.0 ? mag[peak] / med : std::numeric_limits<double>::infinity();
    return est;
}

FrequencyEstimate estimate_gcp_frequency(const ImageStack& stack, const Gcp& gcp,
                                         std::size_t pad_factor, PeakMode mode) {
    const auto series = stack.series(gcp.row, gcp.col);
    const double pri = stack.pulses() > 1 ? stack.tau()[1] - stack.tau()[0] : 0.0;
    return estimate_frequency(series, pri, pad_factor, mode);
}

double outlier_threshold(double nav_accuracy, double wavelength, double margin) {
    if (margin < 1.0) throw std::invalid_argument("outlier margin must be >= 1");
    if (!(wavelength > 0.0)) throw std::invalid_argument("wavelength must be > 0");
    return margin * (4.0 * kPi / wavelength) * nav_accuracy;
}

std::vector<Gcp> reject_outliers(std::vector<Gcp> gcps, double nav_accuracy, double wavelength,
                                 double margin) {
    const double threshold = outlier_threshold(nav_accuracy, wavelength, margin);
    for (auto& g : gcps) g.outlier = std::abs(g.omega) > threshold;
    return gcps;
}

MocoReport solve_wls(std::span<const Gcp> gcps, const Vec3& aperture_center, double wavelength,
                     const WlsOptions& opts) {
    std::vector<int> columns{0};
    if (!opts.drop_y) columns.push_back(1);
    if (!opts.drop_z) columns.push_back(2);
    const auto p = Eigen::Index(columns.size());
    static constexpr const char* kAxisName[] = {"x", "y", "z"};

    MocoReport report;
    report.z_dropped = opts.drop_z;
    report.y_dropped = opts.drop_y;
    report.gcps.assign(gcps.begin(), gcps.end());

    std::vector<std::size_t> used;
    for (std::size_t i = 0; i < report.gcps.size(); ++i) {
        auto& g = report.gcps[i];
        switch (opts.weighting) {
            case Weighting::amplitude: g.weight = g.amplitude; break;
            case Weighting::prominence: g.weight = g.prominence; break;
            case Weighting::uniform: g.weight = 1.0; break;
        }
        if (!(g.weight >= 0.0) || !std::isfinite(g.weight))
            throw std::invalid_argument("GCP weight must be finite and >= 0");
        if (!g.outlier && g.weight > 0.0) used.push_back(i);
    }
    if (Eigen::Index(used.size()) < p) {
        std::ostringstream msg;
        msg << "WLS needs at least " << p << " usable GCPs, got " << used.size();
        throw NumericalError(msg.str());
    }

    const auto v = Eigen::Index(used.size());
    Eigen::MatrixXd K(v, p);
    Eigen::VectorXd omega(v);
    Eigen::VectorXd w(v);
    for (Eigen::Index i = 0; i < v; ++i) {
        const Gcp& g = report.gcps[used[std::size_t(i)]];
        const Vec3 k = wavevector(unit_vector(aperture_center, g.position), wavelength);
        const double kc[3] = {k.x, k.y, k.z};
        for (Eigen::Index j = 0; j < p; ++j) K(i, j) = kc[columns[std::size_t(j)]];
        omega(i) = g.omega;
        w(i) = g.weight;
    }

    const Eigen::MatrixXd normal = K.transpose() * w.asDiagonal() * K;
    Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> eig(normal);
    const Eigen::VectorXd ev = eig.eigenvalues();  // ascending
    const double ev_max = ev(p - 1);
    const double ev_min = ev(0);
    report.condition_number =
        ev_min > 0.0 ? ev_max / ev_min : std::numeric_limits<double>::infinity();
    if (!(ev_max > 0.0) || !(report.condition_number <= opts.max_condition)) {
        std::vector<std::string> names;
        for (Eigen::Index e = 0; e < p; ++e) {
            if (ev_max > 0.0 && ev(e) * opts.max_condition >= ev_max) continue;
            for (Eigen::Index j = 0; j < p; ++j) {
                const std::string n = kAxisName[columns[std::size_t(j)]];
                if (std::abs(eig.eigenvectors()(j, e)) > 0.3 &&
                    std::find(names.begin(), names.end(), n) == names.end())
                    names.push_back(n);
            }
        }
        std::ostringstream msg;
        msg << "velocity error unobservable along ";
        for (std::size_t i = 0; i < names.size(); ++i) msg << (i ? ", " : "") << names[i];
        msg << " (condition number " << report.condition_number << " exceeds "
            << opts.max_condition << ")";
        throw NumericalError(msg.str());
    }

    const Eigen::VectorXd rhs = K.transpose() * (w.asDiagonal() * omega);
    const Eigen::VectorXd dv = normal.ldlt().solve(rhs);

    const Eigen::VectorXd resid = omega - K * dv;
    double sigma2 = 0.0;
    if (v > p) sigma2 = resid.dot(w.asDiagonal() * resid) / double(v - p);
    // Floor at round-off level so accuracies stay strictly positive on
    // noiseless or exactly determined systems.
    const double scale = std::max(omega.cwiseAbs().maxCoeff(), 1.0) * DBL_EPSILON;
    sigma2 = std::max(sigma2, scale * scale * w.mean());
    const Eigen::MatrixXd cov = sigma2 * normal.inverse();

    double out[3] = {0.0, 0.0, 0.0};
    double acc[3] = {0.0, 0.0, 0.0};
    for (Eigen::Index j = 0; j < p; ++j) {
        out[columns[std::size_t(j)]] = dv(j);
        acc[columns[std::size_t(j)]] = std::sqrt(cov(j, j));
    }
    report.delta_v = {out[0], out[1], out[2]};
    report.accuracy = {acc[0], acc[1], acc[2]};
    report.gcps_used = used.size();
    return report;
}

PhaseScreenSet phase_screens(const GroundGrid& grid, const Vec3& delta_v,
                             std::span<const double> tau, double wavelength,
                             const Vec3& aperture_center) {
    if (!delta_v.is_finite()) throw std::invalid_argument("delta_v must be finite");
    std::vector<double> rates(grid.size());
    for (std::size_t iy = 0; iy < grid.ny(); ++iy) {
        for (std::size_t ix = 0; ix < grid.nx(); ++ix) {
            const Vec3 k = wavevector(unit_vector(aperture_center, grid.pixel(iy, ix)), wavelength);
            rates[iy * grid.nx() + ix] = k.dot(delta_v);
        }
    }
    return PhaseScreenSet(grid, std::vector<double>(tau.begin(), tau.end()), std::move(rates));
}

void compensate_in_place(ImageStack& stack, const PhaseScreenSet& screens, unsigned threads) {
    if (!(stack.grid() == screens.grid()) || stack.pulses() != screens.pulses())
        throw std::invalid_argument("phase screens do not match the image stack");
    const std::size_t nx = stack.grid().nx();
    detail::parallel_for(stack.grid().ny(), threads, [&](std::size_t begin, std::size_t end) {
        for (std::size_t m = 0; m < stack.pulses(); ++m) {
            for (std::size_t iy = begin; iy < end; ++iy) {
                for (std::size_t ix = 0; ix < nx; ++ix) {
                    const double psi = screens.at(m, iy, ix);
                    auto& px = stack.at(m, iy, ix);
                    px = std::complex<float>(std::complex<double>(px) *
                                             std::complex<double>(std::cos(psi), -std::sin(psi)));
                }
            }
        }
    });
}

ImageStack compensate(const ImageStack& stack, const PhaseScreenSet& screens) {
    ImageStack out = stack;
    compensate_in_place(out, screens);
    return out;
}

Trajectory integrate_residual_velocity(const Trajectory& nav, const Vec3& delta_v) {
    return Trajectory(nav.reference_position(), nav.velocity() - delta_v, nav.pulses(), nav.pri());
}

double residual_doppler_height(double v_x, double range, double theta, double delta_q,
                               double wavelength) {
    if (!(range > 0.0)) throw std::invalid_argument("range must be > 0");
    if (!(wavelength > 0.0)) throw std::invalid_argument("wavelength must be > 0");
    if (!(theta > 0.0 && theta < kPi)) throw std::invalid_argument("incidence angle outside (0, pi)");
    if (std::abs(theta - kPi / 2.0) < 1e-12) return 0.0;
    if (std::sin(theta) < 1e-6) throw std::invalid_argument("incidence angle too close to nadir/zenith");
    const double tan_theta = std::tan(theta);
    return (2.0 / wavelength) * v_x * delta_q / (range * tan_theta);
}

std::vector<double> unwrap_phase(std::span<const std::complex<double>> series) {
    if (series.size() < 2) throw std::invalid_argument("phase unwrapping needs M >= 2");
    std::vector<double> out(series.size());
    for (std::size_t m = 0; m < series.size(); ++m) {
        if (series[m] == std::complex<double>{})
            throw std::invalid_argument("zero-magnitude sample in phase history");
    }
    out[0] = std::arg(series[0]);
    for (std::size_t m = 1; m < series.size(); ++m) {
        const double step = std::arg(series[m] * std::conj(series[m - 1]));
        out[m] = out[m - 1] + step;
    }
    return out;
}

std::vector<double> unwrap_gcp_phase(const ImageStack& stack, const Gcp& gcp) {
    return unwrap_phase(stack.series(gcp.row, gcp.col));
}

MocoReport estimate_residual_velocity(const ImageStack& stack, const Trajectory& nav,
                                      const ArrayConfig& arr, const RadarConfig& radar,
                                      const MocoOptions& opts) {
    const AmplitudeImage amp = incoherent_mean(stack);
    std::vector<Gcp> gcps = select_gcp(amp, opts.gcp_count, opts.min_separation);
    detail::parallel_for(gcps.size(), opts.threads, [&](std::size_t begin, std::size_t end) {
        for (std::size_t i = begin; i < end; ++i) {
            const auto est = estimate_gcp_frequency(stack, gcps[i], opts.pad_factor, opts.peak_mode);
            gcps[i].omega = est.omega;
            gcps[i].prominence = est.prominence;
        }
    });
    gcps = reject_outliers(std::move(gcps), radar.nav_accuracy, radar.wavelength, opts.margin);
    MocoReport report = solve_wls(gcps, aperture_center(nav, arr), radar.wavelength, opts.wls);
    report.history.push_back(report.delta_v);
    return report;
}

namespace {

// Index of the largest value, refined by a parabola through its neighbours.
double refined_argmax(const std::vector<double>& v) {
    std::size_t best = 0;
    for (std::size_t i = 1; i < v.size(); ++i)
        if (v[i] > v[best]) best = i;
    if (best == 0 || best + 1 == v.size()) return double(best);
    const double a = v[best - 1], b = v[best], c = v[best + 1];
    const double den = a - 2.0 * b + c;
    if (!(den < 0.0)) return double(best);
    return double(best) + 0.5 * (a - c) / den;
}

// Off-grid localization of the scatterer behind `gcp`. Samples a polar patch
// (ground range x azimuth, seen from the aperture center) around it, takes
// the azimuth with the most range-integrated incoherent energy, then the
// range of the brightest sample along that azimuth, and measures the residual
// Doppler on the history of that exact point.
Gcp localize_gcp(const DataCube& cube, const Trajectory& nav, const ArrayConfig& arr,
                 const RadarConfig& radar, const GroundGrid& grid, const Vec3& center,
                 const Gcp& gcp, const MocoOptions& opts, const FocusOptions& focus) {
    const double gx = gcp.position.x - center.x, gy = gcp.position.y - center.y;
    const double h0 = std::hypot(gx, gy);
    const double b0 = std::atan2(gy, gx);
    const double dh = radar.range_resolution / 10.0;
    const double ds = radar.range_resolution / 2.0;
    const auto nr = static_cast<std::ptrdiff_t>(std::ceil(radar.range_resolution / dh));
    const auto nb = static_cast<std::ptrdiff_t>(std::ceil(opts.refine.half_width / ds));
    const double db = ds / h0;

    const auto point = [&](double h, double b) {
        return Vec3{center.x + h * std::cos(b), center.y + h * std::sin(b), gcp.position.z};
    };
    std::vector<Vec3> pts;
    pts.reserve(std::size_t((2 * nr + 1) * (2 * nb + 1)));
    for (std::ptrdiff_t j = -nb; j <= nb; ++j)
        for (std::ptrdiff_t i = -nr; i <= nr; ++i) pts.push_back(point(h0 + double(i) * dh, b0 + double(j) * db));

    FocusOptions fo = focus;
    fo.threads = 1;
    const PointHistories hist = backproject_points(cube, nav, arr, pts, radar, fo);
    std::vector<double> amp(pts.size(), 0.0);
    for (std::size_t m = 0; m < hist.pulses; ++m)
        for (std::size_t p = 0; p < pts.size(); ++p) amp[p] += std::abs(std::complex<double>(hist.at(m, p)));
    for (auto& a : amp) a /= double(hist.pulses);

    const std::size_t rows = std::size_t(2 * nr + 1);
    std::vector<double> energy(std::size_t(2 * nb + 1), 0.0);
    for (std::size_t j = 0; j < energy.size(); ++j)
        for (std::size_t i = 0; i < rows; ++i) energy[j] += amp[j * rows + i] * amp[j * rows + i];
    const double jb = refined_argmax(energy);
    const std::size_t jn = std::size_t(std::lround(jb));
    std::vector<double> cut(amp.begin() + std::ptrdiff_t(jn * rows),
                            amp.begin() + std::ptrdiff_t((jn + 1) * rows));
    const double ib = refined_argmax(cut);

    const double h = h0 + (ib - double(nr)) * dh;
    const double b = b0 + (jb - double(nb)) * db;
    const Vec3 best = point(h, b);
    const PointHistories at = backproject_points(cube, nav, arr, std::span<const Vec3>(&best, 1), radar, fo);
    std::vector<std::complex<double>> series(at.pulses);
    double mean_amp = 0.0;
    for (std::size_t m = 0; m < at.pulses; ++m) {
        series[m] = std::complex<double>(at.at(m, 0));
        mean_amp += std::abs(series[m]);
    }

    Gcp out = gcp;
    out.position = best;
    out.amplitude = mean_amp / double(at.pulses);
    const double fx = (best.x - grid.x_min()) / grid.dx();
    const double fy = (best.y - grid.y_min()) / grid.dy();
    out.col = std::size_t(std::clamp<double>(std::round(fx), 0.0, double(grid.nx() - 1)));
    out.row = std::size_t(std::clamp<double>(std::round(fy), 0.0, double(grid.ny() - 1)));
    const auto est = estimate_frequency(series, nav.pri(), opts.pad_factor, opts.peak_mode);
    out.omega = est.omega;
    out.prominence = est.prominence;
    out.outlier = false;
    return out;
}

// Relocated GCPs can converge on the same scatterer; keep the brightest of
// any group closer than min_separation.
std::vector<Gcp> drop_duplicates(std::vector<Gcp> gcps, std::size_t min_separation) {
    std::vector<std::size_t> order(gcps.size());
    for (std::size_t i = 0; i < order.size(); ++i) order[i] = i;
    std::stable_sort(order.begin(), order.end(), [&](std::size_t a, std::size_t b) {
        return gcps[a].amplitude > gcps[b].amplitude;
    });
    std::vector<Gcp> kept;
    for (std::size_t i : order) {
        const Gcp& g = gcps[i];
        bool clear = true;
        for (const Gcp& k : kept) {
            const std::size_t dr = g.row > k.row ? g.row - k.row : k.row - g.row;
            const std::size_t dc = g.col > k.col ? g.col - k.col : k.col - g.col;
            if (std::max(dr, dc) < min_separation) {
                clear = false;
                break;
            }
        }
        if (clear) kept.push_back(g);
    }
    return kept;
}

}  // namespace

MocoReport refine_residual_velocity(const DataCube& cube, const Trajectory& nav,
                                    const ArrayConfig& arr, const RadarConfig& radar,
                                    const GroundGrid& grid, const MocoReport& initial,
                                    const MocoOptions& opts, const FocusOptions& focus) {
    MocoReport report = initial;
    if (report.history.empty()) report.history.push_back(report.delta_v);
    Vec3 total = report.delta_v;
    const Vec3 center = aperture_center(nav, arr);
    for (std::size_t it = 0; it < opts.refine.iterations; ++it) {
        const Trajectory corrected = integrate_residual_velocity(nav, total);
        std::vector<Gcp> gcps = report.gcps;
        detail::parallel_for(gcps.size(), opts.threads, [&](std::size_t begin, std::size_t end) {
            for (std::size_t i = begin; i < end; ++i)
                gcps[i] = localize_gcp(cube, corrected, arr, radar, grid, center, gcps[i], opts,
                                       focus);
        });
        gcps = drop_duplicates(std::move(gcps), opts.min_separation);
        gcps = reject_outliers(std::move(gcps), radar.nav_accuracy, radar.wavelength, opts.margin);
        MocoReport step = solve_wls(gcps, center, radar.wavelength, opts.wls);
        total = total + step.delta_v;
        const Vec3 inc = step.delta_v;
        step.delta_v = total;
        step.history = std::move(report.history);
        step.history.push_back(total);
        report = std::move(step);
        if (std::abs(inc.x) < opts.refine.tolerance && std::abs(inc.y) < opts.refine.tolerance &&
            std::abs(inc.z) < opts.refine.tolerance)
            break;
    }
    return report;
}

std::string to_string(Weighting w) {
    switch (w) {
        case Weighting::amplitude: return "amplitude";
        case Weighting::prominence: return "prominence";
        case Weighting::uniform: return "uniform";
    }
    return "unknown";
}

std::string to_string(PeakMode p) {
    return p == PeakMode::parabolic ? "parabolic" : "raw";
}

}  // namespace sarmoco
