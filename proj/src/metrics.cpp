#include "sparsep/metrics.hpp"

#include "sparsep/error.hpp"

#include <Eigen/Dense>

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <limits>
#include <numeric>
#include <sstream>

namespace sparsep
{

namespace
{

constexpr double kInf = std::numeric_limits<double>::infinity();
// Energies below this fraction of the estimate's energy count as exact zeros.
constexpr double kZero = 1e-20;
// Stand-in for +-inf when averaging.
constexpr double kExtreme = 1e6;

double energy(std::span<const double> v)
{
    double s = 0.0;
    for (double x : v)
        s += x * x;
    return s;
}

double ratio_db(double num, double den, double scale)
{
    if (num <= kZero * scale)
        return -kInf;
    if (den <= kZero * scale)
        return kInf;
    return 10.0 * std::log10(num / den);
}

double clamp_extreme(double v)
{
    return std::clamp(v, -kExtreme, kExtreme);
}

double mean_of(const std::vector<double>& v)
{
    if (v.empty())
        return 0.0;
    bool pos = false;
    bool neg = false;
    double s = 0.0;
    for (double x : v)
    {
        pos = pos || x == kInf;
        neg = neg || x == -kInf;
        s += x;
    }
    if (pos && neg)
        return std::numeric_limits<double>::quiet_NaN();
    return s / static_cast<double>(v.size());
}

Eigen::MatrixXd basis_matrix(std::span<const std::vector<double>> basis, std::size_t len)
{
    Eigen::MatrixXd B(static_cast<Eigen::Index>(len), static_cast<Eigen::Index>(basis.size()));
    for (std::size_t k = 0; k < basis.size(); ++k)
    {
        if (basis[k].size() != len)
            throw DomainError("projection basis lengths differ");
        B.col(static_cast<Eigen::Index>(k)) =
            Eigen::Map<const Eigen::VectorXd>(basis[k].data(), static_cast<Eigen::Index>(len));
    }
    return B;
}

std::vector<double> fit_length(const std::vector<double>& x, std::size_t len)
{
    std::vector<double> out(len, 0.0);
    std::copy_n(x.begin(), std::min(len, x.size()), out.begin());
    return out;
}

}  // namespace

double BssScores::mean_sdr() const
{
    return mean_of(sdr_db);
}

double BssScores::mean_sir() const
{
    return mean_of(sir_db);
}

std::vector<double> project(std::span<const double> x, std::span<const std::vector<double>> basis)
{
    if (x.empty())
        throw DomainError("cannot project an empty signal");
    if (basis.empty())
        return std::vector<double>(x.size(), 0.0);
    const Eigen::MatrixXd B = basis_matrix(basis, x.size());
    const Eigen::Map<const Eigen::VectorXd> xv(x.data(), static_cast<Eigen::Index>(x.size()));
    const Eigen::VectorXd c = B.colPivHouseholderQr().solve(xv);
    const Eigen::VectorXd p = B * c;
    return {p.data(), p.data() + p.size()};
}

BssScores bss_eval(std::span<const std::vector<double>> references,
                   std::span<const std::vector<double>> estimates)
{
    const std::size_t n = references.size();
    if (n == 0)
        throw DomainError("no reference signals");
    if (estimates.size() != n)
        throw DomainError("got " + std::to_string(estimates.size()) + " estimates for " +
                          std::to_string(n) + " references");
    const std::size_t len = references[0].size();
    if (len == 0)
        throw DomainError("reference signals are empty");
    for (const auto& r : references)
        if (r.size() != len)
            throw DomainError("reference signals differ in length");

    std::vector<std::vector<double>> est(n);
    for (std::size_t e = 0; e < n; ++e)
        est[e] = fit_length(estimates[e], len);

    const Eigen::MatrixXd B = basis_matrix(references, len);
    const auto qr = B.colPivHouseholderQr();
    std::vector<double> ref_energy(n);
    for (std::size_t k = 0; k < n; ++k)
        ref_energy[k] = energy(references[k]);

    // Per-estimate projection onto all references, then per-pair scores.
    std::vector<double> sar(n);
    std::vector<double> sdr(n * n);
    std::vector<double> sir(n * n);
    std::vector<double> diff(len);
    for (std::size_t e = 0; e < n; ++e)
    {
        const Eigen::Map<const Eigen::VectorXd> xv(est[e].data(), static_cast<Eigen::Index>(len));
        const Eigen::VectorXd pall = B * qr.solve(xv);
        const double ex = energy(est[e]);
        for (std::size_t i = 0; i < len; ++i)
            diff[i] = pall[static_cast<Eigen::Index>(i)] - est[e][i];
        sar[e] = ratio_db(pall.squaredNorm(), energy(diff), ex);

        for (std::size_t r = 0; r < n; ++r)
        {
            const auto& ref = references[r];
            double dot = 0.0;
            for (std::size_t i = 0; i < len; ++i)
                dot += ref[i] * est[e][i];
            const double beta = ref_energy[r] > 0.0 ? dot / ref_energy[r] : 0.0;
            const double pe = beta * beta * ref_energy[r];
            double d_sdr = 0.0;
            double d_sir = 0.0;
            for (std::size_t i = 0; i < len; ++i)
            {
                const double p = beta * ref[i];
                const double a = p - est[e][i];
                const double b = p - pall[static_cast<Eigen::Index>(i)];
                d_sdr += a * a;
                d_sir += b * b;
            }
            sdr[r * n + e] = ratio_db(pe, d_sdr, ex);
            sir[r * n + e] = ratio_db(pe, d_sir, ex);
        }
    }

    std::vector<std::size_t> perm(n);
    std::iota(perm.begin(), perm.end(), 0);
    std::vector<std::size_t> best = perm;
    double best_score = -kInf;
    bool first = true;
    do
    {
        double s = 0.0;
        for (std::size_t r = 0; r < n; ++r)
            s += clamp_extreme(sir[r * n + perm[r]]);
        if (first || s > best_score)
        {
            best_score = s;
            best = perm;
            first = false;
        }
    } while (std::next_permutation(perm.begin(), perm.end()));

    BssScores out;
    out.permutation = best;
    for (std::size_t r = 0; r < n; ++r)
    {
        out.sdr_db.push_back(sdr[r * n + best[r]]);
        out.sir_db.push_back(sir[r * n + best[r]]);
        out.sar_db.push_back(sar[best[r]]);
    }
    return out;
}

BssScores bss_eval(std::span<const AudioClip> references, std::span<const AudioClip> estimates)
{
    std::vector<std::vector<double>> r;
    std::vector<std::vector<double>> e;
    for (const auto& c : references)
        r.push_back(c.samples);
    for (const auto& c : estimates)
        e.push_back(c.samples);
    return bss_eval(std::span<const std::vector<double>>(r), std::span<const std::vector<double>>(e));
}

std::string format_db(double value)
{
    if (value == kInf)
        return "inf";
    if (value == -kInf)
        return "-inf";
    if (std::isnan(value))
        return "nan";
    char buf[32];
    std::snprintf(buf, sizeof buf, "%.2f", value);
    return buf;
}

std::string format_report(const BssScores& scores)
{
    std::ostringstream os;
    os << "instrument  estimate       SDR       SIR       SAR\n";
    for (std::size_t r = 0; r < scores.sdr_db.size(); ++r)
    {
        char line[128];
        std::snprintf(line, sizeof line, "%10zu %9zu %9s %9s %9s\n", r, scores.permutation[r],
                      format_db(scores.sdr_db[r]).c_str(), format_db(scores.sir_db[r]).c_str(),
                      format_db(scores.sar_db[r]).c_str());
        os << line;
    }
    os << "mean SDR " << format_db(scores.mean_sdr()) << " dB, mean SIR " << format_db(scores.mean_sir())
       << " dB\n";
    for (std::size_t r = 0; r < scores.sdr_db.size(); ++r)
        os << "instrument=" << r << " estimate=" << scores.permutation[r]
           << " sdr=" << format_db(scores.sdr_db[r]) << " sir=" << format_db(scores.sir_db[r])
           << " sar=" << format_db(scores.sar_db[r]) << "\n";
    return os.str();
}

}  // namespace sparsep
