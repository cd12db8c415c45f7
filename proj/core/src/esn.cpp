#include "vrnet/esn.hpp"

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <cstring>
#include <istream>
#include <limits>
#include <ostream>
#include <stdexcept>

namespace vrnet {

Eigen::VectorXd EsnState::regressor() const {
    Eigen::VectorXd z(mu.size() + x.size());
    z << mu, x;
    return z;
}

bool operator==(const EsnState& a, const EsnState& b) {
    auto same = [](const auto& p, const auto& q) {
        return p.rows() == q.rows() && p.cols() == q.cols() &&
               std::memcmp(p.data(), q.data(), sizeof(double) * static_cast<std::size_t>(p.size())) == 0;
    };
    return same(a.w_in, b.w_in) && same(a.w_res, b.w_res) && same(a.w_out, b.w_out) && same(a.mu, b.mu) &&
           same(a.x, b.x) && same(a.bias, b.bias);
}

EsnState init_esn(std::size_t n_w, std::size_t n_sbs, std::size_t n_actions, Rng& rng, double in_scale,
                  double res_scale, double bias_scale) {
    if (n_w <= n_sbs) throw std::invalid_argument("reservoir must be larger than the input");
    if (n_actions == 0) throw std::invalid_argument("ESN needs at least one action");
    if (!(res_scale >= 0.0 && res_scale < 1.0)) throw std::invalid_argument("res_scale must lie in [0, 1)");
    if (!(in_scale >= 0.0)) throw std::invalid_argument("in_scale must be >= 0");
    if (!(bias_scale >= 0.0)) throw std::invalid_argument("bias_scale must be >= 0");
    const auto nw = static_cast<Eigen::Index>(n_w);
    const auto b = static_cast<Eigen::Index>(n_sbs);
    EsnState e;
    e.w_in.resize(nw, b);
    // column-major fill order is part of the determinism contract
    for (Eigen::Index c = 0; c < b; ++c)
        for (Eigen::Index r = 0; r < nw; ++r) e.w_in(r, c) = uniform(rng, -in_scale, in_scale);
    e.w_res.resize(nw);
    for (Eigen::Index r = 0; r < nw; ++r) e.w_res(r) = uniform(rng, -res_scale, res_scale);
    e.bias = Eigen::VectorXd::Zero(nw);
    if (bias_scale > 0.0)
        for (Eigen::Index r = 0; r < nw; ++r) e.bias(r) = uniform(rng, -bias_scale, bias_scale);
    e.w_out = Eigen::MatrixXd::Zero(static_cast<Eigen::Index>(n_actions), nw + b);
    e.mu = Eigen::VectorXd::Zero(nw);
    e.x = Eigen::VectorXd::Zero(b);
    return e;
}

const Eigen::VectorXd& update_reservoir(EsnState& esn, const Eigen::VectorXd& x) {
    if (x.size() != esn.w_in.cols()) throw std::invalid_argument("ESN input has the wrong length");
    esn.mu = (esn.w_res.cwiseProduct(esn.mu) + esn.w_in * x + esn.bias).array().tanh().matrix();
    esn.x = x;
    return esn.mu;
}

Eigen::VectorXd predict(const EsnState& esn, const Eigen::VectorXd& x) {
    if (x.size() != esn.w_in.cols()) throw std::invalid_argument("ESN input has the wrong length");
    const auto nw = esn.mu.size();
    return esn.w_out.leftCols(nw) * esn.mu + esn.w_out.rightCols(x.size()) * x;
}

Eigen::VectorXd predict(const EsnState& esn) { return predict(esn, esn.x); }

void train_step(EsnState& esn, std::size_t action, double actual_u, double lambda) {
    if (action >= esn.n_actions()) throw std::out_of_range("ESN action index out of range");
    if (!(lambda > 0.0)) throw std::invalid_argument("learning rate must be > 0");
    const Eigen::VectorXd z = esn.regressor();
    const auto row = static_cast<Eigen::Index>(action);
    const double y = esn.w_out.row(row).dot(z);
    esn.w_out.row(row) += (lambda * (actual_u - y)) * z.transpose();
}

std::optional<bool> check_unambiguity(const Eigen::MatrixXd& w_in, const std::vector<Eigen::VectorXd>& inputs) {
    std::vector<Eigen::VectorXd> distinct = inputs;
    const auto lex = [](const Eigen::VectorXd& a, const Eigen::VectorXd& b) {
        return std::lexicographical_compare(a.begin(), a.end(), b.begin(), b.end());
    };
    std::sort(distinct.begin(), distinct.end(), lex);
    distinct.erase(std::unique(distinct.begin(), distinct.end(),
                               [](const Eigen::VectorXd& a, const Eigen::VectorXd& b) { return a == b; }),
                   distinct.end());
    if (distinct.size() < 2) return std::nullopt;

    // per row, the closest pair of projections is adjacent after sorting
    Eigen::MatrixXd stacked(w_in.cols(), static_cast<Eigen::Index>(distinct.size()));
    for (std::size_t g = 0; g < distinct.size(); ++g) {
        if (distinct[g].size() != w_in.cols()) throw std::invalid_argument("ESN input has the wrong length");
        stacked.col(static_cast<Eigen::Index>(g)) = distinct[g];
    }
    std::vector<double> proj(distinct.size());
    for (Eigen::Index r = 0; r < w_in.rows(); ++r) {
        const Eigen::RowVectorXd values = w_in.row(r) * stacked;
        std::copy(values.begin(), values.end(), proj.begin());
        std::sort(proj.begin(), proj.end());
        for (std::size_t g = 1; g < proj.size(); ++g)
            if (proj[g] - proj[g - 1] < 2.0) return false;
    }
    return true;
}

std::vector<Eigen::VectorXd> strategy_input_grid(std::span<const std::size_t> action_counts) {
    const std::size_t b = action_counts.size();
    std::vector<Eigen::VectorXd> out;
    std::vector<std::size_t> idx(b, 0);
    while (true) {
        Eigen::VectorXd x(static_cast<Eigen::Index>(b));
        for (std::size_t j = 0; j < b; ++j)
            x(static_cast<Eigen::Index>(j)) = static_cast<double>(idx[j]) / static_cast<double>(action_counts[j]);
        out.push_back(std::move(x));
        std::size_t pos = b;
        while (pos > 0) {
            --pos;
            if (++idx[pos] <= action_counts[pos]) break;
            idx[pos] = 0;
            if (pos == 0) return out;
        }
        if (b == 0) return out;
    }
}

Eigen::MatrixXd unambiguous_input_weights(std::size_t n_w, std::span<const std::size_t> action_counts, Rng& rng) {
    const auto b = static_cast<Eigen::Index>(action_counts.size());
    Eigen::MatrixXd w(static_cast<Eigen::Index>(n_w), b);
    std::vector<double> radix(action_counts.size());
    double r = 1.0;
    for (std::size_t j = 0; j < action_counts.size(); ++j) {
        if (action_counts[j] == 0) throw std::invalid_argument("action count must be >= 1");
        radix[j] = r;
        r *= 2.0 * static_cast<double>(action_counts[j]) + 1.0;
    }
    for (Eigen::Index k = 0; k < w.rows(); ++k) {
        const double m = uniform(rng, 1.05, 2.0);  // margin over 2 for rounding in x = i / |A|
        for (Eigen::Index j = 0; j < b; ++j) {
            const double sign = bernoulli(rng, 0.5) ? 1.0 : -1.0;
            const auto ju = static_cast<std::size_t>(j);
            w(k, j) = m * sign * static_cast<double>(action_counts[ju]) * 2.0 * radix[ju];
        }
    }
    return w;
}

double robbins_monro_schedule(std::size_t t, double lambda0) {
    if (t == 0) throw std::invalid_argument("Robbins-Monro schedule starts at t = 1");
    return lambda0 / static_cast<double>(t);
}

namespace {

constexpr char kMagic[8] = {'V', 'R', 'N', 'E', 'S', 'N', '0', '2'};

void put_u64(std::ostream& out, std::uint64_t v) {
    unsigned char buf[8];
    for (int i = 0; i < 8; ++i) buf[i] = static_cast<unsigned char>(v >> (8 * i));
    out.write(reinterpret_cast<const char*>(buf), 8);
}

std::uint64_t get_u64(std::istream& in) {
    unsigned char buf[8];
    if (!in.read(reinterpret_cast<char*>(buf), 8)) throw std::runtime_error("truncated ESN checkpoint");
    std::uint64_t v = 0;
    for (int i = 0; i < 8; ++i) v |= static_cast<std::uint64_t>(buf[i]) << (8 * i);
    return v;
}

template <typename M>
void put_matrix(std::ostream& out, const M& m) {
    put_u64(out, static_cast<std::uint64_t>(m.rows()));
    put_u64(out, static_cast<std::uint64_t>(m.cols()));
    for (Eigen::Index i = 0; i < m.size(); ++i) {
        std::uint64_t bits;
        const double v = m.data()[i];
        std::memcpy(&bits, &v, sizeof bits);
        put_u64(out, bits);
    }
}

template <typename M>
M get_matrix(std::istream& in) {
    const auto rows = static_cast<Eigen::Index>(get_u64(in));
    const auto cols = static_cast<Eigen::Index>(get_u64(in));
    if (rows < 0 || cols < 0 || (rows > 0 && cols > (Eigen::Index{1} << 40) / rows))
        throw std::runtime_error("corrupt ESN checkpoint dimensions");
    M m(rows, cols);
    for (Eigen::Index i = 0; i < m.size(); ++i) {
        const std::uint64_t bits = get_u64(in);
        double v;
        std::memcpy(&v, &bits, sizeof v);
        m.data()[i] = v;
    }
    return m;
}

}  // namespace

void save_esn(const EsnState& esn, std::ostream& out) {
    out.write(kMagic, sizeof kMagic);
    put_matrix(out, esn.w_in);
    put_matrix(out, Eigen::MatrixXd(esn.w_res));
    put_matrix(out, esn.w_out);
    put_matrix(out, Eigen::MatrixXd(esn.mu));
    put_matrix(out, Eigen::MatrixXd(esn.x));
    put_matrix(out, Eigen::MatrixXd(esn.bias));
    if (!out) throw std::runtime_error("failed writing ESN checkpoint");
}

EsnState load_esn(std::istream& in) {
    char magic[sizeof kMagic];
    if (!in.read(magic, sizeof magic) || std::memcmp(magic, kMagic, sizeof kMagic) != 0)
        throw std::runtime_error("not an ESN checkpoint");
    EsnState e;
    e.w_in = get_matrix<Eigen::MatrixXd>(in);
    e.w_res = get_matrix<Eigen::MatrixXd>(in);
    e.w_out = get_matrix<Eigen::MatrixXd>(in);
    e.mu = get_matrix<Eigen::MatrixXd>(in);
    e.x = get_matrix<Eigen::MatrixXd>(in);
    e.bias = get_matrix<Eigen::MatrixXd>(in);
    const auto nw = e.w_in.rows();
    const auto b = e.w_in.cols();
    if (e.w_res.size() != nw || e.mu.size() != nw || e.x.size() != b || e.bias.size() != nw ||
        e.w_out.cols() != nw + b)
        throw std::runtime_error("inconsistent ESN checkpoint dimensions");
    return e;
}

}  // namespace vrnet
